//! Polynomial expressions in generators and their adjoints, such as
//! `g0* g0 + g0 g0* - 1` or `0.5 (g1 + g1*)`.
//!
//! Factors are juxtaposed to multiply. A trailing `*` takes the adjoint of
//! the preceding factor. Identifiers name generators: either a supplied name
//! or `g<k>` for the zero-based index `k`; `i` is the imaginary unit unless a
//! generator is called `i`.

use std::fmt;

use crate::error::{Error, Result};
use crate::fdca::{BlockElement, BlockShape};
use crate::matcore::{C64, I, ONE};

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Scalar(C64),
    Generator(usize),
    Adjoint(Box<Expr>),
    Product(Vec<Expr>),
    Sum(Vec<(f64, Expr)>),
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    text: String,
    expr: Expr,
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::WordParse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += self.peek().unwrap().len_utf8();
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut sign = 1.0;
        if let Some(c @ ('+' | '-')) = self.peek() {
            sign = if c == '-' { -1.0 } else { 1.0 };
            self.pos += 1;
        }
        loop {
            let t = self.product()?;
            terms.push((sign, t));
            self.skip_ws();
            match self.peek() {
                Some('+') => sign = 1.0,
                Some('-') => sign = -1.0,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(if terms.len() == 1 && terms[0].0 == 1.0 {
            terms.pop().unwrap().1
        } else {
            Expr::Sum(terms)
        })
    }

    fn product(&mut self) -> Result<Expr> {
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c == '(' || c == '.' || c.is_ascii_alphanumeric() || c == '_' => {
                    let mut f = self.atom()?;
                    loop {
                        self.skip_ws();
                        if self.peek() == Some('*') {
                            self.pos += 1;
                            f = Expr::Adjoint(Box::new(f));
                        } else {
                            break;
                        }
                    }
                    factors.push(f);
                }
                _ => break,
            }
        }
        match factors.len() {
            0 => self.err("expected a factor"),
            1 => Ok(factors.pop().unwrap()),
            _ => Ok(Expr::Product(factors)),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = self.pos;
        let c = self.peek().unwrap();
        if c == '(' {
            self.pos += 1;
            let inner = self.sum()?;
            self.skip_ws();
            if self.peek() != Some(')') {
                return self.err("expected ')'");
            }
            self.pos += 1;
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == '.' {
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() || c == '.' {
                    self.pos += 1;
                } else if c == 'e' || c == 'E' {
                    self.pos += 1;
                    if let Some('+' | '-') = self.peek() {
                        self.pos += 1;
                    }
                } else {
                    break;
                }
            }
            let text = &self.src[start..self.pos];
            return match text.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Expr::Scalar(C64::new(x, 0.0))),
                _ => {
                    self.pos = start;
                    self.err(format!("invalid number '{text}'"))
                }
            };
        }
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        let ident = &self.src[start..self.pos];
        if let Some(k) = self.names.iter().position(|n| n == ident) {
            return Ok(Expr::Generator(k));
        }
        if ident == "i" {
            return Ok(Expr::Scalar(I));
        }
        if let Some(k) = ident.strip_prefix('g').and_then(|d| d.parse::<usize>().ok()) {
            return Ok(Expr::Generator(k));
        }
        self.pos = start;
        self.err(format!("unknown generator '{ident}'"))
    }
}

impl Word {
    pub fn parse(text: &str) -> Result<Word> {
        Self::parse_with_names(text, &[])
    }

    /// Parses with generator names resolved against `names`.
    pub fn parse_with_names(text: &str, names: &[String]) -> Result<Word> {
        let mut p = Parser { src: text, pos: 0, names };
        let expr = p.sum()?;
        p.skip_ws();
        if p.pos != text.len() {
            return p.err("unexpected trailing input");
        }
        Ok(Word {
            text: text.trim().to_string(),
            expr,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Largest generator index used.
    pub fn max_generator(&self) -> Option<usize> {
        fn walk(e: &Expr) -> Option<usize> {
            match e {
                Expr::Scalar(_) => None,
                Expr::Generator(k) => Some(*k),
                Expr::Adjoint(x) => walk(x),
                Expr::Product(v) => v.iter().filter_map(walk).max(),
                Expr::Sum(v) => v.iter().filter_map(|(_, x)| walk(x)).max(),
            }
        }
        walk(&self.expr)
    }

    /// Evaluates the expression with `g<k>` replaced by `images[k]`.
    pub fn evaluate(&self, shape: &BlockShape, images: &[BlockElement]) -> Result<BlockElement> {
        if let Some(k) = self.max_generator() {
            if k >= images.len() {
                return Err(Error::ShapeMismatch(format!(
                    "expression uses generator {k} but only {} are available",
                    images.len()
                )));
            }
        }
        for x in images {
            if x.shape() != shape {
                return Err(Error::ShapeMismatch(format!("image in {} for {shape}", x.shape())));
            }
        }
        Ok(eval(&self.expr, shape, images))
    }
}

fn eval(e: &Expr, shape: &BlockShape, images: &[BlockElement]) -> BlockElement {
    match e {
        Expr::Scalar(c) => BlockElement::scalar(shape, *c),
        Expr::Generator(k) => images[*k].clone(),
        Expr::Adjoint(x) => eval(x, shape, images).adjoint(),
        Expr::Product(v) => v
            .iter()
            .fold(BlockElement::scalar(shape, ONE), |acc, f| acc.mul(&eval(f, shape, images))),
        Expr::Sum(v) => v.iter().fold(BlockElement::zeros(shape), |acc, (s, t)| {
            acc.add(&eval(t, shape, images).scale(C64::new(*s, 0.0)))
        }),
    }
}

/// `g<k>* g<k>` and `g<k> g<k>*` for every generator.
pub fn default_fingerprint_words(generators: usize) -> Vec<Word> {
    (0..generators)
        .flat_map(|k| [format!("g{k}* g{k}"), format!("g{k} g{k}*")])
        .map(|t| Word::parse(&t).expect("well-formed"))
        .collect()
}
