use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// How labels are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    /// `{0,1}` or `{−1,1}` label sets are classification labels, anything
    /// else is a regression target.
    #[default]
    Auto,
    Regression,
    /// Labels must be `{0,1}` or `{−1,1}`; mapped to `±1`.
    Classification,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SvmlightOptions {
    pub labels: LabelMode,
    /// Minimum number of columns; the inferred width is the largest index.
    pub n_features: Option<usize>,
}

pub fn read_svmlight(path: &Path) -> Result<(DenseMatrix, Vec<f64>)> {
    read_svmlight_with(path, SvmlightOptions::default())
}

pub fn read_svmlight_with(path: &Path, opts: SvmlightOptions) -> Result<(DenseMatrix, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut width = 0usize;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(line_no, format!("invalid label `{label_tok}`")))?;
        if !label.is_finite() {
            return Err(err(line_no, format!("non-finite label `{label_tok}`")));
        }
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(line_no, format!("expected index:value, found `{tok}`")))?;
            if idx == "qid" {
                continue;
            }
            let idx: usize = idx
                .parse()
                .map_err(|_| err(line_no, format!("invalid feature index `{idx}`")))?;
            if idx == 0 {
                return Err(err(line_no, "feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| err(line_no, format!("invalid feature value `{val}`")))?;
            if !val.is_finite() {
                return Err(err(line_no, format!("non-finite feature value `{val}`")));
            }
            width = width.max(idx);
            entries.push((idx - 1, val));
        }
        labels.push(label);
        rows.push(entries);
    }

    let n = width.max(opts.n_features.unwrap_or(0));
    let mut a = DenseMatrix::zeros(rows.len(), n);
    for (r, entries) in rows.iter().enumerate() {
        for &(c, v) in entries {
            a.set(r, c, v);
        }
    }
    let y = map_labels(&labels, opts.labels).map_err(|msg| Error::Format(format!("{}: {msg}", path.display())))?;
    Ok((a, y))
}

fn map_labels(labels: &[f64], mode: LabelMode) -> std::result::Result<Vec<f64>, String> {
    let all_in = |set: &[f64]| labels.iter().all(|l| set.contains(l));
    let zero_one = all_in(&[0.0, 1.0]);
    let pm_one = all_in(&[-1.0, 1.0]);
    let to_pm = |l: f64| if l == 0.0 { -1.0 } else { l };
    match mode {
        LabelMode::Regression => Ok(labels.to_vec()),
        LabelMode::Classification | LabelMode::Auto if zero_one => Ok(labels.iter().map(|&l| to_pm(l)).collect()),
        LabelMode::Classification | LabelMode::Auto if pm_one => Ok(labels.to_vec()),
        LabelMode::Auto if all_in(&[-1.0, 0.0, 1.0]) => {
            Err("inconsistent label set: both 0 and -1 present".into())
        }
        LabelMode::Auto => Ok(labels.to_vec()),
        LabelMode::Classification => Err("inconsistent label set: expected {0,1} or {-1,1}".into()),
    }
}

/// Writes `(A, y)` with 17 significant digits; zero entries are omitted.
pub fn write_svmlight(path: &Path, a: &DenseMatrix, y: &[f64]) -> Result<()> {
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} rows",
            y.len(),
            a.rows()
        )));
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    for (r, label) in y.iter().enumerate() {
        write!(out, "{label:.16e}")?;
        for c in 0..a.cols() {
            let v = a.get(r, c);
            if v != 0.0 {
                write!(out, " {}:{v:.16e}", c + 1)?;
            }
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
