use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("`{}`: {e}", tok.trim()),
            })
        })
        .collect()
}

/// Reads a comma-separated matrix, one row per line. A leading
/// `# rows cols` comment is checked against the data when present; other
/// `#` lines and blank lines are ignored.
pub fn read_matrix_csv<T: Scalar, R: BufRead>(reader: R) -> Result<Matrix<T>> {
    let mut declared: Option<(usize, usize)> = None;
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if rows.is_empty() && declared.is_none() {
                let dims: Vec<usize> = comment
                    .split_whitespace()
                    .filter_map(|t| t.parse().ok())
                    .collect();
                if dims.len() == 2 {
                    declared = Some((dims[0], dims[1]));
                }
            }
            continue;
        }
        let row = parse_row(trimmed, lineno)?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("{} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row.into_iter().map(T::lit).collect());
    }
    let m = Matrix::from_rows(&rows)?;
    if let Some((r, c)) = declared {
        if (r, c) != (m.rows(), m.cols()) {
            return Err(Error::Parse {
                line: 1,
                message: format!(
                    "header declares {r}x{c} but data is {}x{}",
                    m.rows(),
                    m.cols()
                ),
            });
        }
    }
    Ok(m)
}

/// Reads a vector stored either as one row or as one column.
pub fn read_vector_csv<T: Scalar, R: BufRead>(reader: R) -> Result<Vec<T>> {
    let m: Matrix<T> = read_matrix_csv(reader)?;
    if m.rows() == 1 {
        Ok(m.row(0).to_vec())
    } else if m.cols() == 1 {
        Ok(m.column(0))
    } else {
        Err(Error::DimensionMismatch(format!(
            "expected a vector, got a {}x{} matrix",
            m.rows(),
            m.cols()
        )))
    }
}

/// Writes `# rows cols` followed by the rows. Values use the shortest
/// representation that round-trips exactly.
pub fn write_matrix_csv<T: Scalar, W: Write>(m: &Matrix<T>, mut w: W) -> Result<()> {
    writeln!(w, "# {} {}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        let line = m.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Writes a vector as a single column.
pub fn write_vector_csv<T: Scalar, W: Write>(v: &[T], mut w: W) -> Result<()> {
    for x in v {
        writeln!(w, "{x}")?;
    }
    Ok(())
}
