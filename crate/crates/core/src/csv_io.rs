//! CSV formats for step functions and matrices.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::monocalc::StepFunction;

/// Atoms as `lambda,weight`, ascending.
pub fn step_to_csv(f: &StepFunction) -> String {
    let mut out = String::from("lambda,weight\n");
    for (l, w) in f.atoms() {
        let _ = writeln!(out, "{l},{w}");
    }
    out
}

/// Atoms as `lambda,weight,stderr`; `stderr` is the standard error of the
/// cumulative value at each atom.
pub fn step_with_errors_to_csv(f: &StepFunction, stderr: &[f64]) -> Result<String> {
    if stderr.len() != f.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), got: stderr.len() });
    }
    let mut out = String::from("lambda,weight,stderr\n");
    for ((l, w), e) in f.atoms().zip(stderr) {
        let _ = writeln!(out, "{l},{w},{e}");
    }
    Ok(out)
}

/// Parses `lambda,weight` rows. Lines starting with `#` are skipped.
pub fn step_from_csv(text: &str) -> Result<StepFunction> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut atoms = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| -> Result<f64> {
            rec.get(j)
                .ok_or_else(|| parse_err(i + 2, format!("missing column {j}")))?
                .parse::<f64>()
                .map_err(|e| parse_err(i + 2, e.to_string()))
        };
        atoms.push((field(0)?, field(1)?));
    }
    StepFunction::from_atoms(atoms)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { location: format!("line {line}"), message: message.into() }
}

/// Reads a symmetric matrix from either a dense CSV (one row per line) or a
/// triplet file (zero-based `i,j,value` rows under an `i,j,value` header; the
/// upper triangle suffices and mirrored entries must agree).
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text).map_err(|e| match e {
        Error::Parse { location, message } => {
            Error::Parse { location: format!("{}:{location}", path.display()), message }
        }
        other => other,
    })
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split(',').map(str::trim).collect()))
        .collect();
    if rows.is_empty() {
        return Err(Error::InvalidInput("matrix file is empty".into()));
    }
    if rows[0].1 == ["i", "j", "value"] {
        parse_triplets(&rows[1..])
    } else {
        parse_dense(&rows)
    }
}

fn number(line: usize, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|e| parse_err(line, format!("{s:?}: {e}")))
}

fn parse_dense(rows: &[(usize, Vec<&str>)]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let mut m = DMatrix::zeros(n, n);
    for (r, (line, fields)) in rows.iter().enumerate() {
        if fields.len() != n {
            return Err(parse_err(*line, format!("expected {n} columns, got {}", fields.len())));
        }
        for (c, s) in fields.iter().enumerate() {
            m[(r, c)] = number(*line, s)?;
        }
    }
    Ok(m)
}

fn parse_triplets(rows: &[(usize, Vec<&str>)]) -> Result<DMatrix<f64>> {
    let mut entries = Vec::with_capacity(rows.len());
    let mut n = 0;
    for (line, f) in rows {
        if f.len() != 3 {
            return Err(parse_err(*line, format!("expected 3 fields, got {}", f.len())));
        }
        let index = |s: &str| s.parse::<usize>().map_err(|e| parse_err(*line, format!("{s:?}: {e}")));
        let (i, j) = (index(f[0])?, index(f[1])?);
        entries.push((*line, i, j, number(*line, f[2])?));
        n = n.max(i + 1).max(j + 1);
    }
    let mut m = DMatrix::zeros(n, n);
    let mut set = DMatrix::from_element(n, n, false);
    for (line, i, j, v) in entries {
        for (a, b) in [(i, j), (j, i)] {
            if set[(a, b)] && m[(a, b)] != v {
                return Err(parse_err(line, format!("conflicting values for entry ({i}, {j})")));
            }
            m[(a, b)] = v;
            set[(a, b)] = true;
        }
    }
    Ok(m)
}
