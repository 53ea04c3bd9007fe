//! Text exchange formats.
//!
//! Sparse row format (binary matrices):
//!
//! ```text
//! # rows=<m> cols=<n>
//! 0 3 7        <- 0-based column indices of the ones in row 0, ascending
//!              <- empty row
//! 2
//! ```
//!
//! Each row is terminated by `\n`. Readers accept any whitespace between
//! indices and treat missing trailing rows as empty. Signed matrices use the
//! header `# rows=<m> cols=<n> signed` and tokens `+i` / `-i`.
//!
//! Dense format (real matrices): the same header followed by one line per
//! row of space-separated decimals, printed with the shortest representation
//! that round-trips.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, RealMatrix, SignedMatrix};

fn header(rows: usize, cols: usize, signed: bool) -> String {
    if signed {
        format!("# rows={rows} cols={cols} signed\n")
    } else {
        format!("# rows={rows} cols={cols}\n")
    }
}

/// Returns `(rows, cols, signed)`.
fn parse_header(line: Option<&str>) -> Result<(usize, usize, bool)> {
    let line = line.ok_or_else(|| Error::parse(1, "missing header"))?;
    let rest = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(1, "header must start with '#'"))?;
    let mut rows = None;
    let mut cols = None;
    let mut signed = false;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("rows=") {
            rows = Some(v.parse().map_err(|_| Error::parse(1, "bad rows value"))?);
        } else if let Some(v) = tok.strip_prefix("cols=") {
            cols = Some(v.parse().map_err(|_| Error::parse(1, "bad cols value"))?);
        } else if tok == "signed" {
            signed = true;
        } else {
            return Err(Error::parse(1, format!("unexpected header token '{tok}'")));
        }
    }
    match (rows, cols) {
        (Some(r), Some(c)) => Ok((r, c, signed)),
        _ => Err(Error::parse(1, "header needs rows= and cols=")),
    }
}

pub fn write_sparse(m: &BinaryMatrix) -> String {
    let mut out = header(m.rows(), m.cols(), false);
    for j in 0..m.rows() {
        let mut first = true;
        for i in m.row_ones(j) {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{i}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_sparse(text: &str) -> Result<BinaryMatrix> {
    let mut lines = text.lines();
    let (rows, cols, signed) = parse_header(lines.next())?;
    if signed {
        return Err(Error::parse(1, "expected an unsigned matrix"));
    }
    let mut m = BinaryMatrix::zeros(rows, cols);
    for (j, line) in lines.enumerate() {
        let lineno = j + 2;
        if j >= rows {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(lineno, format!("more than {rows} rows")));
        }
        for tok in line.split_whitespace() {
            let i: usize = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad column index '{tok}'")))?;
            if i >= cols {
                return Err(Error::parse(
                    lineno,
                    format!("column {i} out of range (cols={cols})"),
                ));
            }
            m.set(j, i, true);
        }
    }
    Ok(m)
}

pub fn write_signed(m: &SignedMatrix) -> String {
    let mut out = header(m.rows(), m.cols(), true);
    for j in 0..m.rows() {
        let mut first = true;
        for (i, &v) in m.row(j).iter().enumerate() {
            if v == 0 {
                continue;
            }
            if !first {
                out.push(' ');
            }
            first = false;
            let sign = if v > 0 { '+' } else { '-' };
            write!(out, "{sign}{i}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_signed(text: &str) -> Result<SignedMatrix> {
    let mut lines = text.lines();
    let (rows, cols, _) = parse_header(lines.next())?;
    let mut m = SignedMatrix::zeros(rows, cols);
    for (j, line) in lines.enumerate() {
        let lineno = j + 2;
        if j >= rows {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(lineno, format!("more than {rows} rows")));
        }
        for tok in line.split_whitespace() {
            let (value, idx) = match tok.as_bytes().first() {
                Some(b'+') => (1, &tok[1..]),
                Some(b'-') => (-1, &tok[1..]),
                _ => return Err(Error::parse(lineno, format!("token '{tok}' needs a sign"))),
            };
            let i: usize = idx
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad column index '{tok}'")))?;
            if i >= cols {
                return Err(Error::parse(lineno, format!("column {i} out of range")));
            }
            m.set(j, i, value);
        }
    }
    Ok(m)
}

pub fn write_dense(m: &RealMatrix) -> String {
    let mut out = header(m.rows(), m.cols(), false);
    for j in 0..m.rows() {
        for (k, v) in m.row(j).iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn read_dense(text: &str) -> Result<RealMatrix> {
    let mut lines = text.lines();
    let (rows, cols, _) = parse_header(lines.next())?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (j, line) in lines.enumerate() {
        let lineno = j + 2;
        if line.trim().is_empty() && cols > 0 {
            continue;
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad number '{tok}'")))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::parse(
                lineno,
                format!("expected {cols} values, got {}", data.len() - before),
            ));
        }
        seen += 1;
    }
    if seen != rows && cols > 0 {
        return Err(Error::parse(0, format!("expected {rows} rows, got {seen}")));
    }
    data.resize(rows * cols, 0.0);
    RealMatrix::from_vec(rows, cols, data)
}

pub fn load_sparse(path: impl AsRef<Path>) -> Result<BinaryMatrix> {
    read_sparse(&fs::read_to_string(path)?)
}

pub fn save_sparse(path: impl AsRef<Path>, m: &BinaryMatrix) -> Result<()> {
    fs::write(path, write_sparse(m))?;
    Ok(())
}

pub fn load_signed(path: impl AsRef<Path>) -> Result<SignedMatrix> {
    read_signed(&fs::read_to_string(path)?)
}

pub fn save_signed(path: impl AsRef<Path>, m: &SignedMatrix) -> Result<()> {
    fs::write(path, write_signed(m))?;
    Ok(())
}

pub fn load_dense(path: impl AsRef<Path>) -> Result<RealMatrix> {
    read_dense(&fs::read_to_string(path)?)
}

pub fn save_dense(path: impl AsRef<Path>, m: &RealMatrix) -> Result<()> {
    fs::write(path, write_dense(m))?;
    Ok(())
}
