//! Plain CSV matrix I/O: no header row, '.' decimal separator, comma-separated
//! columns, newline-separated rows. Values are written with 17 significant
//! digits so that every f64 round-trips exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{MaRomError, Result};

/// Format one value at full (round-trip) precision.
pub fn format_full(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Read a dense matrix from a headerless CSV file.
///
/// Every row must have the same number of columns and every cell must parse
/// to a finite f64; violations are reported with 1-based row/column location.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|source| MaRomError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text, path)
}

fn parse_matrix(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(width);
        for (j, cell) in line.split(',').enumerate() {
            let value: f64 = cell.trim().parse().map_err(|e| MaRomError::MalformedCsv {
                path: path.to_path_buf(),
                row: i + 1,
                col: j + 1,
                detail: format!("{e} in {cell:?}"),
            })?;
            if !value.is_finite() {
                return Err(MaRomError::NonFinite {
                    path: path.to_path_buf(),
                    row: i + 1,
                    col: j + 1,
                });
            }
            row.push(value);
        }
        if rows.is_empty() {
            width = row.len();
        } else if row.len() != width {
            return Err(MaRomError::MalformedCsv {
                path: path.to_path_buf(),
                row: i + 1,
                col: row.len(),
                detail: format!("expected {width} columns, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(MaRomError::MalformedCsv {
            path: path.to_path_buf(),
            row: 1,
            col: 1,
            detail: "empty file".to_string(),
        });
    }
    let nrows = rows.len();
    Ok(DMatrix::from_fn(nrows, width, |r, c| rows[r][c]))
}

/// Write a dense matrix as headerless CSV at full precision.
pub fn write_matrix(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let mut out = String::with_capacity(matrix.len() * 24);
    for r in 0..matrix.nrows() {
        for c in 0..matrix.ncols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format_full(matrix[(r, c)]));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Write bytes, reporting the path in the error.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|source| MaRomError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(bytes).map_err(|source| MaRomError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn parse_rejects_nan_with_location() {
        let err = parse_matrix("1.0,2.0\n3.0,NaN\n", &PathBuf::from("x.csv")).unwrap_err();
        match err {
            MaRomError::NonFinite { row, col, .. } => {
                assert_eq!((row, col), (2, 2));
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_garbage_with_location() {
        let err = parse_matrix("1.0,2.0\n3.0,abc\n", &PathBuf::from("x.csv")).unwrap_err();
        match err {
            MaRomError::MalformedCsv { row, col, .. } => {
                assert_eq!((row, col), (2, 2));
            }
            other => panic!("expected MalformedCsv, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        let err = parse_matrix("1,2,3\n4,5\n", &PathBuf::from("x.csv")).unwrap_err();
        assert!(matches!(err, MaRomError::MalformedCsv { row: 2, .. }));
    }

    #[test]
    fn roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = DMatrix::from_row_slice(
            2,
            3,
            &[1.0, -2.5e-17, std::f64::consts::PI, 0.0, 1e300, -3.125],
        );
        write_matrix(&path, &m).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(m, back);
    }
}
