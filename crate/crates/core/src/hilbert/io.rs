//! Plain-text matrix format.
//!
//! ```text
//! dim <rows> <cols>
//! <re> <im>        # one line per entry, row-major
//! ```
//!
//! Entries are written with 17 significant digits so that every `f64`
//! survives a write/read cycle bit for bit. State vectors use `cols = 1`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Complex;

use super::{CMat, CVec, StateVector};
use crate::error::{Error, Result};

pub fn format_matrix(m: &CMat<f64>) -> String {
    let mut out = String::with_capacity(48 * m.len() + 16);
    writeln!(out, "dim {} {}", m.nrows(), m.ncols()).unwrap();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            writeln!(out, "{:.16e} {:.16e}", z.re, z.im).unwrap();
        }
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<CMat<f64>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (rows, cols) = match fields.as_slice() {
        ["dim", r, c] => (parse_usize(r, hline)?, parse_usize(c, hline)?),
        _ => {
            return Err(Error::Parse { line: hline, message: format!("expected `dim <rows> <cols>`, found {header:?}") })
        }
    };
    if rows == 0 || cols == 0 {
        return Err(Error::Parse { line: hline, message: "dimensions must be positive".into() });
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (line, l) in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let [re, im] = parts.as_slice() else {
            return Err(Error::Parse { line, message: format!("expected `re im`, found {l:?}") });
        };
        data.push(Complex::new(parse_f64(re, line)?, parse_f64(im, line)?));
    }
    if data.len() != rows * cols {
        return Err(Error::Parse {
            line: hline,
            message: format!("header announces {} entries, found {}", rows * cols, data.len()),
        });
    }
    Ok(CMat::from_row_slice(rows, cols, &data))
}

pub fn format_state(psi: &StateVector<f64>) -> String {
    let v = psi.amplitudes();
    format_matrix(&CMat::from_column_slice(v.len(), 1, v.as_slice()))
}

/// Reads a column vector; amplitudes are rescaled to unit norm.
pub fn parse_state(text: &str) -> Result<StateVector<f64>> {
    let m = parse_matrix(text)?;
    if m.ncols() != 1 {
        return Err(Error::Parse { line: 1, message: format!("state must have one column, found {}", m.ncols()) });
    }
    StateVector::normalized(CVec::from_column_slice(m.as_slice()))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMat<f64>> {
    parse_matrix(&read(path.as_ref())?)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<StateVector<f64>> {
    parse_state(&read(path.as_ref())?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { line: 0, message: format!("{}: {e}", path.display()) })
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("invalid integer {s:?}") })
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("invalid number {s:?}") })
}
