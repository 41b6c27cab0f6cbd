//! Plain-text matrix format: a `rows cols` header line followed by `rows`
//! lines of `cols` whitespace-separated decimals. Lines starting with `#` are
//! comments; a `# factor` comment marks the matrix as a factor `R` of the form
//! `h(u, v) = (Ru, Rv)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// A parsed matrix file.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile<T> {
    pub matrix: DenseMatrix<T>,
    pub is_factor: bool,
}

pub fn parse_matrix<T: Real>(text: &str, source_name: &str) -> Result<MatrixFile<T>> {
    let err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut is_factor = false;
    let mut shape: Option<(usize, usize)> = None;
    let mut data: Vec<T> = Vec::new();
    let mut rows_seen = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if comment.trim().eq_ignore_ascii_case("factor") {
                is_factor = true;
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match shape {
            None => {
                if fields.len() != 2 {
                    return Err(err(lineno, format!("expected `rows cols`, found {line:?}")));
                }
                let r: usize = fields[0]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad row count {:?}", fields[0])))?;
                let c: usize = fields[1]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad column count {:?}", fields[1])))?;
                if r == 0 || c == 0 {
                    return Err(err(lineno, "matrix dimensions must be positive".into()));
                }
                shape = Some((r, c));
                data.reserve(r * c);
            }
            Some((r, c)) => {
                if rows_seen == r {
                    return Err(err(lineno, format!("unexpected data after {r} rows")));
                }
                if fields.len() != c {
                    return Err(err(
                        lineno,
                        format!("expected {c} entries, found {}", fields.len()),
                    ));
                }
                for f in fields {
                    let v: f64 = f
                        .parse()
                        .map_err(|_| err(lineno, format!("bad number {f:?}")))?;
                    if !v.is_finite() {
                        return Err(err(lineno, format!("non-finite entry {f:?}")));
                    }
                    data.push(T::c(v));
                }
                rows_seen += 1;
            }
        }
    }
    let (r, c) = shape.ok_or_else(|| err(1, "missing `rows cols` header".into()))?;
    if rows_seen != r {
        return Err(err(
            text.lines().count().max(1),
            format!("expected {r} rows, found {rows_seen}"),
        ));
    }
    Ok(MatrixFile {
        matrix: DenseMatrix::from_row_major(r, c, data)?,
        is_factor,
    })
}

/// Writes a matrix with round-trip (shortest exact) decimal formatting.
pub fn format_matrix<T: Real>(m: &DenseMatrix<T>, is_factor: bool) -> String {
    let mut out = String::new();
    if is_factor {
        out.push_str("# factor\n");
    }
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m
            .row(i)
            .iter()
            .map(|x| format!("{:?}", x.as_f64()))
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}
