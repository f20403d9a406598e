//! Shared text format for dense matrices: a `rows,cols` header line followed by
//! one line per row of comma-separated decimals.
//!
//! Values are written with Rust's shortest round-trip float formatting, so
//! `parse(write(m))` is bit-exact.

use ndarray::Array2;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub fn write_grid(values: &Array2<f64>) -> String {
    let (rows, cols) = values.dim();
    let mut out = String::new();
    let _ = writeln!(out, "{rows},{cols}");
    for row in values.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_grid(text: &str) -> Result<Array2<f64>, GridError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(GridError::Malformed {
        line: 1,
        msg: "missing header".into(),
    })?;
    let dims: Vec<&str> = header.split(',').map(str::trim).collect();
    if dims.len() != 2 {
        return Err(GridError::Malformed {
            line: hline,
            msg: format!("expected `rows,cols` header, got `{header}`"),
        });
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|_| GridError::Malformed {
            line: hline,
            msg: format!("invalid dimension `{s}`"),
        })
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    for (line, content) in lines {
        seen_rows += 1;
        if seen_rows > rows {
            return Err(GridError::DimensionMismatch(format!(
                "header declares {rows} rows but line {line} holds an extra row"
            )));
        }
        let before = data.len();
        for field in content.split(',') {
            let field = field.trim();
            let v = field.parse::<f64>().map_err(|_| GridError::Malformed {
                line,
                msg: format!("invalid number `{field}`"),
            })?;
            data.push(v);
        }
        let got = data.len() - before;
        if got != cols {
            return Err(GridError::DimensionMismatch(format!(
                "line {line} has {got} values, header declares {cols}"
            )));
        }
    }
    if seen_rows != rows {
        return Err(GridError::DimensionMismatch(format!(
            "header declares {rows} rows, found {seen_rows}"
        )));
    }
    Ok(Array2::from_shape_vec((rows, cols), data).expect("shape checked above"))
}
