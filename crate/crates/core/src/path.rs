//! Regularization path: a geometric sequence of `λ` values, each solve
//! warm-started from the previous solution.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bnb::{solve, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::problem::ProblemInstance;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PathConfig {
    /// Ratio between consecutive `λ` values, in `(0, 1)`.
    pub lambda_factor: f64,
    pub max_points: usize,
    pub per_point_time_limit: Option<f64>,
    /// Budget for the whole path; no new point starts once it is spent.
    pub total_time_limit: Option<f64>,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            lambda_factor: 0.7,
            max_points: 10,
            per_point_time_limit: None,
            total_time_limit: None,
        }
    }
}

/// One line of the path CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub lambda: f64,
    pub objective: f64,
    pub support_size: usize,
    pub nodes: u64,
    pub relaxations: u64,
    pub fixed_by_simpruning: u64,
    pub time_s: f64,
    pub status: String,
}

impl From<&SolveReport> for PathRow {
    fn from(r: &SolveReport) -> Self {
        PathRow {
            lambda: r.lambda,
            objective: r.objective,
            support_size: r.support_size,
            nodes: r.nodes_explored,
            relaxations: r.relaxations_solved,
            fixed_by_simpruning: r.indices_fixed_by_simpruning,
            time_s: r.wall_time,
            status: r.status.as_str().to_string(),
        }
    }
}

/// Writes one row per path point, with a header.
pub fn write_path_csv<W: std::io::Write>(out: W, reports: &[SolveReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(PathRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

/// `maxᵢ h*(aᵢᵀ(−∇f(0)))`: above this value the zero vector passes every
/// root-level test for making an index nonzero.
pub fn lambda_max(instance: &ProblemInstance) -> f64 {
    let zeros = vec![0.0; instance.m()];
    let u: Vec<f64> = instance.loss_gradient(&zeros).iter().map(|g| -g).collect();
    (0..instance.n())
        .map(|i| instance.penalty.conjugate(instance.col_dot(i, &u)))
        .fold(0.0, f64::max)
}

/// Solves at `λ_max · factorᵏ` for `k = 0, 1, …`; `instance.lambda` is
/// ignored.
pub fn path_solve(
    instance: &ProblemInstance,
    path: &PathConfig,
    solver: &SolverConfig,
) -> Result<Vec<SolveReport>> {
    if !(path.lambda_factor > 0.0 && path.lambda_factor < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda_factor must lie in (0, 1), got {}",
            path.lambda_factor
        )));
    }
    if path.max_points == 0 {
        return Err(Error::InvalidArgument("max_points must be at least 1".into()));
    }
    let start = Instant::now();
    let lmax = lambda_max(instance);
    if !(lmax > 0.0 && lmax.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda_max = {lmax}: the zero vector is optimal for every lambda"
        )));
    }
    let mut config = solver.clone();
    config.time_limit = path.per_point_time_limit;

    let mut reports: Vec<SolveReport> = Vec::with_capacity(path.max_points);
    let mut lambda = lmax;
    while reports.len() < path.max_points {
        if let Some(total) = path.total_time_limit {
            if start.elapsed().as_secs_f64() >= total {
                break;
            }
        }
        let inst = instance.with_lambda(lambda);
        let warm = reports.last().map(|r| r.x.as_slice());
        reports.push(solve(&inst, &config, warm)?);
        lambda *= path.lambda_factor;
    }
    Ok(reports)
}
