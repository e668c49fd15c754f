//! JSON documents describing operator algebras, covers and representations.
//!
//! ```json
//! {
//!   "shape": [1, 2],
//!   "generators": [
//!     {"name": "e11", "blocks": [{"re": [[1]]}, {"re": [[1, 0], [0, 0]]}]}
//!   ],
//!   "tolerances": {"eps_norm": 1e-7},
//!   "cover": {"shape": [2], "images": [{"blocks": [{"re": [[1, 0], [0, 0]]}]}]},
//!   "representation": {"images": [{"re": [[1]]}], "split": 1}
//! }
//! ```
//!
//! `im` parts default to zero. `cover` and `representation` are optional.

use cstarlab::fdca::{BlockElement, BlockShape};
use cstarlab::matcore::{ComplexMatrix, ToleranceConfig, C64};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    #[serde(default)]
    pub name: Option<String>,
    pub blocks: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceDoc {
    pub eps_eq: Option<f64>,
    pub eps_norm: Option<f64>,
    pub eps_psd: Option<f64>,
    pub optimizer_restarts: Option<usize>,
    pub rng_seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub shape: Vec<usize>,
    pub images: Vec<GeneratorDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationDoc {
    pub images: Vec<MatrixDoc>,
    #[serde(default)]
    pub split: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub shape: Vec<usize>,
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub tolerances: Option<ToleranceDoc>,
    #[serde(default)]
    pub cover: Option<CoverDoc>,
    #[serde(default)]
    pub representation: Option<RepresentationDoc>,
}

/// A validated algebra document.
#[derive(Debug, Clone)]
pub struct ParsedAlgebra {
    pub shape: BlockShape,
    pub names: Vec<String>,
    pub generators: Vec<BlockElement>,
    pub tol: ToleranceConfig,
    pub cover: Option<(BlockShape, Vec<BlockElement>)>,
    pub representation: Option<ParsedRepresentation>,
}

#[derive(Debug, Clone)]
pub struct ParsedRepresentation {
    pub images: Vec<ComplexMatrix>,
    pub split: Option<usize>,
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

fn rectangular(rows: &[Vec<f64>], path: &str) -> CliResult<(usize, usize)> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(CliError::shape(path, "matrix must be nonempty"));
    }
    if let Some(bad) = rows.iter().position(|row| row.len() != c) {
        return Err(CliError::shape(
            format!("{path}[{bad}]"),
            format!("row has {} entries, expected {c}", rows[bad].len()),
        ));
    }
    Ok((r, c))
}

pub fn matrix(doc: &MatrixDoc, path: &str) -> CliResult<ComplexMatrix> {
    let (r, c) = rectangular(&doc.re, &format!("{path}.re"))?;
    if let Some(im) = &doc.im {
        let dims = rectangular(im, &format!("{path}.im"))?;
        if dims != (r, c) {
            return Err(CliError::shape(
                format!("{path}.im"),
                format!("imaginary part is {}x{}, real part {r}x{c}", dims.0, dims.1),
            ));
        }
    }
    let m = ComplexMatrix::from_fn(r, c, |i, j| {
        let im = doc.im.as_ref().map_or(0.0, |m| m[i][j]);
        C64::new(doc.re[i][j], im)
    })?;
    Ok(m)
}

fn block_shape(sizes: &[usize], path: &str) -> CliResult<BlockShape> {
    BlockShape::new(sizes.to_vec()).map_err(|e| CliError::shape(path, e.to_string()))
}

fn element(shape: &BlockShape, doc: &GeneratorDoc, path: &str) -> CliResult<BlockElement> {
    if doc.blocks.len() != shape.num_blocks() {
        return Err(CliError::shape(
            format!("{path}.blocks"),
            format!("{} blocks for shape {:?}", doc.blocks.len(), shape.sizes()),
        ));
    }
    let mut blocks = Vec::with_capacity(doc.blocks.len());
    for (i, b) in doc.blocks.iter().enumerate() {
        let p = format!("{path}.blocks[{i}]");
        let m = matrix(b, &p)?;
        let n = shape.size(i);
        if m.rows() != n || m.cols() != n {
            return Err(CliError::shape(p, format!("entry is {}x{}, block needs {n}x{n}", m.rows(), m.cols())));
        }
        blocks.push(m);
    }
    Ok(BlockElement::new(shape, blocks)?)
}

fn tolerances(doc: Option<&ToleranceDoc>) -> CliResult<ToleranceConfig> {
    let mut tol = ToleranceConfig::default();
    if let Some(d) = doc {
        tol.eps_eq = d.eps_eq.unwrap_or(tol.eps_eq);
        tol.eps_norm = d.eps_norm.unwrap_or(tol.eps_norm);
        tol.eps_psd = d.eps_psd.unwrap_or(tol.eps_psd);
        tol.optimizer_restarts = d.optimizer_restarts.unwrap_or(tol.optimizer_restarts);
        tol.rng_seed = d.rng_seed.unwrap_or(tol.rng_seed);
    }
    tol.validate()?;
    Ok(tol)
}

pub fn parse_representation(doc: &RepresentationDoc, path: &str) -> CliResult<ParsedRepresentation> {
    if doc.images.is_empty() {
        return Err(CliError::shape(format!("{path}.images"), "no images"));
    }
    let images = doc
        .images
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, &format!("{path}.images[{i}]")))
        .collect::<CliResult<Vec<_>>>()?;
    let d = images[0].rows();
    for (i, m) in images.iter().enumerate() {
        if m.rows() != d || m.cols() != d {
            return Err(CliError::shape(
                format!("{path}.images[{i}]"),
                format!("image is {}x{}, expected {d}x{d}", m.rows(), m.cols()),
            ));
        }
    }
    Ok(ParsedRepresentation {
        images,
        split: doc.split,
    })
}

/// Parses and validates an algebra document.
pub fn parse_algebra(text: &str) -> CliResult<ParsedAlgebra> {
    let doc: AlgebraDoc = from_json(text)?;
    let shape = block_shape(&doc.shape, "shape")?;
    if doc.generators.is_empty() {
        return Err(CliError::shape("generators", "at least one generator is required"));
    }
    let generators = doc
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| element(&shape, g, &format!("generators[{i}]")))
        .collect::<CliResult<Vec<_>>>()?;
    let names = doc
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| g.name.clone().unwrap_or_else(|| format!("g{i}")))
        .collect();
    let cover = match &doc.cover {
        None => None,
        Some(c) => {
            let sh = block_shape(&c.shape, "cover.shape")?;
            if c.images.len() != generators.len() {
                return Err(CliError::shape(
                    "cover.images",
                    format!("{} images for {} generators", c.images.len(), generators.len()),
                ));
            }
            let images = c
                .images
                .iter()
                .enumerate()
                .map(|(i, g)| element(&sh, g, &format!("cover.images[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            Some((sh, images))
        }
    };
    let representation = doc
        .representation
        .as_ref()
        .map(|r| parse_representation(r, "representation"))
        .transpose()?;
    Ok(ParsedAlgebra {
        shape,
        names,
        generators,
        tol: tolerances(doc.tolerances.as_ref())?,
        cover,
        representation,
    })
}

/// Parses a standalone representation document `{"images": [...], "split": k}`.
pub fn parse_representation_doc(text: &str) -> CliResult<ParsedRepresentation> {
    let doc: RepresentationDoc = from_json(text)?;
    parse_representation(&doc, "")
}
