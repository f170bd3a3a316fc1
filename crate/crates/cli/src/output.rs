use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use crate::CliError;

/// CSV table with a `#` metadata header. Floats are written with 17
/// significant digits so the text round-trips.
pub struct Table {
    header: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<String>,
    footer: Vec<String>,
}

pub enum Cell {
    F(f64),
    I(usize),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v)
    }
}

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Table {
            header: vec![format!("lgt-renyi {} {command}", env!("CARGO_PKG_VERSION"))],
            columns: columns.to_vec(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn meta(&mut self, line: impl Into<String>) {
        self.header.push(line.into());
    }

    pub fn summary(&mut self, line: impl Into<String>) {
        self.footer.push(line.into());
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            match c {
                Cell::F(v) => s.push_str(&float(*v)),
                Cell::I(v) => write!(s, "{v}").unwrap(),
                Cell::S(v) => s.push_str(v),
            }
        }
        self.rows.push(s);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            writeln!(out, "# {h}").unwrap();
        }
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for r in &self.rows {
            writeln!(out, "{r}").unwrap();
        }
        for f in &self.footer {
            writeln!(out, "# summary {f}").unwrap();
        }
        out
    }

    pub fn emit(&self, out: Option<&PathBuf>) -> Result<(), CliError> {
        let text = self.render();
        match out {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))
            }
            None => {
                let mut h = std::io::stdout().lock();
                h.write_all(text.as_bytes()).map_err(|e| CliError::Compute(format!("stdout: {e}")))
            }
        }
    }
}
