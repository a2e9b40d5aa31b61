use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Reads a numeric CSV with a header row. `label_column` becomes `y`, the
/// remaining columns form `A` in file order.
pub fn read_csv(path: &Path, label_column: &str) -> Result<(DenseMatrix, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Format(format!("{}: no column named `{label_column}`", path.display())))?;

    let mut y = Vec::new();
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(r + 2, |p| p.line() as usize);
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        if record.len() != header.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                header.len(),
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(header.len() - 1);
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| err(format!("non-numeric cell `{cell}` in column `{}`", header[c])))?;
            if c == label_idx {
                y.push(v);
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format(format!("{}: no data rows", path.display())));
    }
    let a = DenseMatrix::from_rows(&rows)?;
    Ok((a, y))
}
