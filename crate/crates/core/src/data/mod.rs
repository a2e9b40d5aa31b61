//! Instance generation and dataset readers/writers.

mod csv_table;
mod instance_dir;
mod svmlight;
mod synthetic;

pub use csv_table::read_csv;
pub use instance_dir::{load_instance_dir, save_instance_dir, StoredInstance};
pub use svmlight::{read_svmlight, read_svmlight_with, write_svmlight, LabelMode, SvmlightOptions};
pub use synthetic::{generate, AmplitudeSign, SyntheticInstance, SyntheticSpec};

use std::path::Path;

use crate::error::Result;
use crate::matrix::DenseMatrix;

/// Loads `(A, y)` from an instance directory, a `.csv` file (labels in
/// `label_column`) or an svmlight file.
pub fn load_any(path: &Path, label_column: &str) -> Result<(DenseMatrix, Vec<f64>)> {
    if path.is_dir() {
        let stored = load_instance_dir(path)?;
        return Ok((stored.a, stored.y));
    }
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        read_csv(path, label_column)
    } else {
        read_svmlight(path)
    }
}
