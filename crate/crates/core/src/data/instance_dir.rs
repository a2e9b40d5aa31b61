use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Contents of an instance directory `{A.csv, y.csv, xtrue.csv, meta.json}`.
/// The CSV files have no header; `xtrue.csv` is optional on load.
#[derive(Debug, Clone)]
pub struct StoredInstance {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    pub x_true: Option<Vec<f64>>,
    pub meta: serde_json::Value,
}

fn write_rows(path: &Path, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: r + 1,
                    msg: format!("non-numeric cell `{cell}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let rows = read_rows(path)?;
    if rows.iter().any(|r| r.len() != 1) {
        return Err(Error::Format(format!("{}: expected one value per line", path.display())));
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

pub fn save_instance_dir(
    dir: &Path,
    a: &DenseMatrix,
    y: &[f64],
    x_true: Option<&[f64]>,
    meta: &serde_json::Value,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_rows(&dir.join("A.csv"), (0..a.rows()).map(|r| a.row(r)))?;
    write_rows(&dir.join("y.csv"), y.iter().map(|&v| vec![v]))?;
    if let Some(x) = x_true {
        write_rows(&dir.join("xtrue.csv"), x.iter().map(|&v| vec![v]))?;
    }
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(meta)? + "\n")?;
    Ok(())
}

pub fn load_instance_dir(dir: &Path) -> Result<StoredInstance> {
    let rows = read_rows(&dir.join("A.csv"))?;
    if rows.is_empty() {
        return Err(Error::Format(format!("{}: A.csv has no rows", dir.display())));
    }
    let a = DenseMatrix::from_rows(&rows)?;
    let y = read_vector(&dir.join("y.csv"))?;
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "y.csv has {} entries, A.csv has {} rows",
            y.len(),
            a.rows()
        )));
    }
    let xt_path = dir.join("xtrue.csv");
    let x_true = if xt_path.exists() {
        Some(read_vector(&xt_path)?)
    } else {
        None
    };
    let meta_path = dir.join("meta.json");
    let meta = if meta_path.exists() {
        serde_json::from_str(&fs::read_to_string(meta_path)?)?
    } else {
        serde_json::Value::Null
    };
    Ok(StoredInstance { a, y, x_true, meta })
}
