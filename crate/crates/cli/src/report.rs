use std::fmt::Write as _;

/// Text report with named checks, plus an optional CSV table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    title: String,
    lines: Vec<String>,
    failures: usize,
    pub csv: Option<Csv>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    /// Records a check; returns `ok` so callers can chain on it.
    pub fn check(&mut self, name: impl AsRef<str>, ok: bool) -> bool {
        if !ok {
            self.failures += 1;
        }
        self.lines
            .push(format!("[{}] {}", if ok { "PASS" } else { "FAIL" }, name.as_ref()));
        ok
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "== {} ==", self.title).unwrap();
        for l in &self.lines {
            writeln!(out, "{l}").unwrap();
        }
        writeln!(out, "result: {}", if self.passed() { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}

/// CSV with a header row and LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Fixed-precision float with negative zero folded to zero.
pub fn num(x: f64) -> String {
    let s = format!("{x:.10}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Short form for values in report lines.
pub fn short(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}
