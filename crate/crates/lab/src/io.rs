//! Artifact emission and sample ingestion.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! CSV value parses back to the identical `f64`. Nothing time- or
//! thread-dependent enters an artifact: identical configurations give
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use qcl_core::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(&'static str),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => (*s).to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

/// Shortest decimal that round-trips, e.g. `0.1`, `1e-10`, `-2.5`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// A written file and its digest, as listed in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Output directory of one run.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| LabError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<Artifact> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| LabError::io(&path, e))?;
        Ok(Artifact {
            file: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        })
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> Result<Artifact> {
        let bytes = csv_bytes(header, rows).map_err(|e| LabError::io(self.path(name), e))?;
        self.write_bytes(name, &bytes)
    }

    /// Pretty JSON with a trailing newline.
    pub fn write_json(&self, name: &str, value: &impl Serialize) -> Result<Artifact> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn csv_bytes(header: &[&str], rows: &[Vec<Cell>]) -> std::io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

/// Samples `(x, ψ(x))` read from a CSV with header `x,re,im`.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub xs: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Read a samples file. Errors name the offending line (header is line 1).
pub fn read_samples(path: &Path) -> Result<Samples> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_samples(&text, path)
}

pub fn parse_samples(text: &str, path: &Path) -> Result<Samples> {
    let err = |line: u64, msg: String| LabError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols != ["x", "re", "im"] {
        return Err(err(1, format!("expected header x,re,im, found {}", cols.join(","))));
    }
    let mut out = Samples {
        xs: Vec::new(),
        values: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize, name: &str| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            let v: f64 = s.parse().map_err(|_| err(line, format!("{name}: cannot parse {s:?} as a number")))?;
            if !v.is_finite() {
                return Err(err(line, format!("{name}: value must be finite")));
            }
            Ok(v)
        };
        out.xs.push(num(0, "x")?);
        out.values.push(Complex64::new(num(1, "re")?, num(2, "im")?));
    }
    if out.xs.len() < 2 {
        return Err(err(1, "need at least two samples".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1e-300, -2.5e17, std::f64::consts::PI, 5e-324, 1.0 / 3.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_is_plain() {
        let b = csv_bytes(&["a", "b"], &[vec![Cell::Num(0.5), Cell::Text("x")], vec![Cell::Int(3), Cell::Empty]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\n0.5,x\n3,\n");
    }

    #[test]
    fn samples_parse() {
        let s = parse_samples("x,re,im\n-1,1,0\n-0.5, 0.5 ,0.25\n0,0,0\n", Path::new("s.csv")).unwrap();
        assert_eq!(s.xs, vec![-1.0, -0.5, 0.0]);
        assert_eq!(s.values[1], Complex64::new(0.5, 0.25));
    }

    #[test]
    fn bad_sample_names_the_line() {
        let e = parse_samples("x,re,im\n-1,1,0\n-0.5,oops,0\n", Path::new("s.csv")).unwrap_err();
        match e {
            LabError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let e = parse_samples("x,re,im\n-1,1,0\n-0.5,1\n", Path::new("s.csv")).unwrap_err();
        assert!(matches!(e, LabError::Parse { line: 3, .. }), "{e:?}");
        let e = parse_samples("x,y,z\n", Path::new("s.csv")).unwrap_err();
        assert!(matches!(e, LabError::Parse { line: 1, .. }));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
