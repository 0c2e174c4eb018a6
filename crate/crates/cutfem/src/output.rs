//! Atomic file output and Matrix Market dumps.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use cutfem_core::assembly::SparseOperator;

use crate::error::{AppError, AppResult};

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partially written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> AppResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| AppError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| AppError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| AppError::io(path, e))?;
    tmp.persist(path).map_err(|e| AppError::io(path, e.error))?;
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> AppResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

/// Coordinate-format Matrix Market text, 1-based indices.
pub fn matrix_market(op: &SparseOperator) -> String {
    let mut out = String::with_capacity(32 * op.nnz() + 64);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", op.rows, op.cols, op.nnz());
    for r in 0..op.rows {
        let (cols, vals) = op.row(r);
        for (c, v) in cols.iter().zip(vals) {
            let _ = writeln!(out, "{} {} {:e}", r + 1, c + 1, v);
        }
    }
    out
}

/// Dense vector as a Matrix Market array.
pub fn matrix_market_vector(values: &[f64]) -> String {
    let mut out = String::with_capacity(24 * values.len() + 64);
    out.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} 1", values.len());
    for v in values {
        let _ = writeln!(out, "{v:e}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cutfem_core::assembly::TripletBuilder;

    #[test]
    fn atomic_write_replaces_and_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/table.csv");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        let entries = std::fs::read_dir(path.parent().unwrap()).unwrap().count();
        assert_eq!(entries, 1);
    }

    #[test]
    fn matrix_market_lists_entries() {
        let mut b = TripletBuilder::new(2, 3);
        b.add(0, 2, 1.5);
        b.add(1, 0, -0.25);
        let text = matrix_market(&b.build());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "2 3 2");
        assert_eq!(lines[2], "1 3 1.5e0");
        let parsed: f64 = lines[3].split_whitespace().nth(2).unwrap().parse().unwrap();
        assert_eq!(parsed, -0.25);
        assert_eq!(matrix_market_vector(&[1.0, 2.0]).lines().count(), 4);
    }
}
