//! Benchmark harness: performance profiles, sensibility sweeps and
//! regularization paths over synthetic instances.
//!
//! Reported times cover the solver call only; instance generation is
//! excluded.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bnb::{solve, SolveStatus, SolverConfig};
use crate::data::{generate, AmplitudeSign, SyntheticSpec};
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::path::{lambda_max, path_solve, PathConfig};
use crate::penalty::PenaltyKind;
use crate::problem::ProblemInstance;

/// Environment variable setting the worker count.
pub const THREADS_ENV: &str = "L0PRUNE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    PerfProfile,
    Sensibility,
    Path,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseInstance {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub snr_db: f64,
    #[serde(default)]
    pub amplitude_sign: AmplitudeSign,
    pub loss: LossKind,
    pub penalty: PenaltyKind,
    /// `λ = lambda_ratio · λ_max`.
    pub lambda_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sweep {
    /// One of `m`, `n`, `k`, `rho`, `snr_db`, `lambda_ratio`, `big_m`,
    /// `alpha`.
    pub name: String,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Variant {
    pub name: String,
    #[serde(default)]
    pub config: SolverConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub scenario: Scenario,
    pub base: BaseInstance,
    pub sweep: Sweep,
    /// Timed runs per (instance, variant); the fastest is kept.
    #[serde(default = "one")]
    pub repetitions: usize,
    pub seeds: Vec<u64>,
    /// Per-solve limit in seconds; overrides the variants' own limits.
    pub time_limit: Option<f64>,
    pub variants: Vec<Variant>,
    /// Variant that acceleration factors are measured against.
    pub baseline: String,
    /// Time budgets of the performance profile; defaults to a log grid.
    #[serde(default)]
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub path: PathConfig,
}

fn one() -> usize {
    1
}

const PARAMS: [&str; 8] = ["m", "n", "k", "rho", "snr_db", "lambda_ratio", "big_m", "alpha"];

impl BenchConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let cfg: BenchConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.sweep.grid.is_empty() {
            problems.push("sweep grid is empty".to_string());
        }
        if !PARAMS.contains(&self.sweep.name.as_str()) {
            problems.push(format!(
                "unknown sweep parameter `{}` (expected one of {})",
                self.sweep.name,
                PARAMS.join(", ")
            ));
        }
        if self.repetitions < 1 {
            problems.push("repetitions must be at least 1".to_string());
        }
        if self.seeds.is_empty() {
            problems.push("seeds is empty".to_string());
        }
        if self.variants.is_empty() {
            problems.push("no solver variants".to_string());
        }
        if !self.variants.iter().any(|v| v.name == self.baseline) {
            problems.push(format!("baseline `{}` is not a variant name", self.baseline));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(problems.join("; ")))
        }
    }

    fn instance_at(&self, value: f64, seed: u64) -> Result<ProblemInstance> {
        let b = &self.base;
        let mut spec = SyntheticSpec {
            m: b.m,
            n: b.n,
            k: b.k,
            rho: b.rho,
            snr_db: b.snr_db,
            seed,
            amplitude_sign: b.amplitude_sign,
        };
        let mut penalty = b.penalty;
        let mut ratio = b.lambda_ratio;
        let count = || -> Result<usize> {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::InvalidArgument(format!("`{}` grid value {value} is not a count", self.sweep.name)))
            }
        };
        match self.sweep.name.as_str() {
            "m" => spec.m = count()?,
            "n" => spec.n = count()?,
            "k" => spec.k = count()?,
            "rho" => spec.rho = value,
            "snr_db" => spec.snr_db = value,
            "lambda_ratio" => ratio = value,
            "big_m" => match &mut penalty {
                PenaltyKind::BigM { big_m }
                | PenaltyKind::BigML1 { big_m, .. }
                | PenaltyKind::BigML2 { big_m, .. } => *big_m = value,
            },
            "alpha" => match &mut penalty {
                PenaltyKind::BigM { .. } => {
                    return Err(Error::InvalidArgument("the Big-M penalty has no alpha".into()))
                }
                PenaltyKind::BigML1 { alpha, .. } | PenaltyKind::BigML2 { alpha, .. } => *alpha = value,
            },
            other => return Err(Error::InvalidArgument(format!("unknown sweep parameter `{other}`"))),
        }
        let data = generate(&spec)?;
        let y = if b.loss.is_classification() {
            data.y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect()
        } else {
            data.y
        };
        let inst = ProblemInstance::new(data.a, y, b.loss, penalty, 1.0)?;
        let lambda = ratio * lambda_max(&inst);
        let inst = inst.with_lambda(lambda);
        inst.ensure_valid()?;
        Ok(inst)
    }
}

/// One row per (grid point, seed, variant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub scenario: String,
    pub param: String,
    pub grid_value: f64,
    pub seed: u64,
    pub variant: String,
    pub lambda: f64,
    pub time_s: f64,
    pub nodes: u64,
    pub relaxations: u64,
    pub fixed_by_simpruning: u64,
    pub objective: f64,
    pub support_size: usize,
    pub status: String,
}

/// Acceleration summary of one variant at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelerationRow {
    pub grid_value: f64,
    pub variant: String,
    pub count: usize,
    pub mean_time_s: f64,
    pub mean_acceleration: f64,
    pub std_acceleration: f64,
}

/// Fraction of instances one variant solves within a time budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub grid_value: f64,
    pub variant: String,
    pub budget_s: f64,
    pub solved_fraction: f64,
}

#[derive(Debug, Clone)]
pub enum Summary {
    Acceleration(Vec<AccelerationRow>),
    Profile(Vec<ProfileRow>),
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub raw: Vec<RawRow>,
    pub summary: Summary,
}

/// Runs every (grid point, seed, variant) combination on a worker pool.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutput> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;

    let mut instances = Vec::new();
    for (g, &value) in cfg.sweep.grid.iter().enumerate() {
        for &seed in &cfg.seeds {
            instances.push((g, value, seed, cfg.instance_at(value, seed)?));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..cfg.variants.len()).map(move |v| (i, v)))
        .collect();
    let mut rows: Vec<((usize, u64, usize), RawRow)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, v)| {
                let (g, value, seed, inst) = &instances[i];
                let row = run_one(cfg, inst, *value, *seed, &cfg.variants[v])?;
                Ok(((*g, *seed, v), row))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let raw: Vec<RawRow> = rows.into_iter().map(|(_, r)| r).collect();
    let summary = match cfg.scenario {
        Scenario::PerfProfile => Summary::Profile(profile(cfg, &raw)),
        Scenario::Sensibility | Scenario::Path => Summary::Acceleration(acceleration(cfg, &raw)),
    };
    Ok(BenchOutput { raw, summary })
}

fn run_one(cfg: &BenchConfig, inst: &ProblemInstance, value: f64, seed: u64, variant: &Variant) -> Result<RawRow> {
    let mut config = variant.config.clone();
    if cfg.time_limit.is_some() {
        config.time_limit = cfg.time_limit;
    }
    let mut best: Option<RawRow> = None;
    for _ in 0..cfg.repetitions {
        let row = match cfg.scenario {
            Scenario::Path => {
                let mut path = cfg.path.clone();
                if config.time_limit.is_some() {
                    path.per_point_time_limit = config.time_limit;
                }
                let reps = path_solve(inst, &path, &config)?;
                let last = reps.last().expect("at least one path point");
                let all_optimal = reps.iter().all(|r| r.status == SolveStatus::Optimal);
                RawRow {
                    scenario: "Path".into(),
                    param: cfg.sweep.name.clone(),
                    grid_value: value,
                    seed,
                    variant: variant.name.clone(),
                    lambda: last.lambda,
                    time_s: reps.iter().map(|r| r.wall_time).sum(),
                    nodes: reps.iter().map(|r| r.nodes_explored).sum(),
                    relaxations: reps.iter().map(|r| r.relaxations_solved).sum(),
                    fixed_by_simpruning: reps.iter().map(|r| r.indices_fixed_by_simpruning).sum(),
                    objective: last.objective,
                    support_size: last.support_size,
                    status: if all_optimal { "Optimal" } else { "TimeLimit" }.into(),
                }
            }
            scenario => {
                let r = solve(inst, &config, None)?;
                RawRow {
                    scenario: format!("{scenario:?}"),
                    param: cfg.sweep.name.clone(),
                    grid_value: value,
                    seed,
                    variant: variant.name.clone(),
                    lambda: inst.lambda,
                    time_s: r.wall_time,
                    nodes: r.nodes_explored,
                    relaxations: r.relaxations_solved,
                    fixed_by_simpruning: r.indices_fixed_by_simpruning,
                    objective: r.objective,
                    support_size: r.support_size,
                    status: r.status.as_str().into(),
                }
            }
        };
        if best.as_ref().is_none_or(|b| row.time_s < b.time_s) {
            best = Some(row);
        }
    }
    Ok(best.expect("repetitions >= 1"))
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn acceleration(cfg: &BenchConfig, raw: &[RawRow]) -> Vec<AccelerationRow> {
    let mut out = Vec::new();
    for &value in &cfg.sweep.grid {
        let at: Vec<&RawRow> = raw.iter().filter(|r| r.grid_value == value).collect();
        for variant in cfg.variants.iter().filter(|v| v.name != cfg.baseline) {
            let mut ratios = Vec::new();
            let mut times = Vec::new();
            for &seed in &cfg.seeds {
                let find = |name: &str| at.iter().find(|r| r.seed == seed && r.variant == name);
                if let (Some(base), Some(this)) = (find(&cfg.baseline), find(&variant.name)) {
                    ratios.push(base.time_s / this.time_s);
                    times.push(this.time_s);
                }
            }
            let (mean_acceleration, std_acceleration) = mean_std(&ratios);
            out.push(AccelerationRow {
                grid_value: value,
                variant: variant.name.clone(),
                count: ratios.len(),
                mean_time_s: mean_std(&times).0,
                mean_acceleration,
                std_acceleration,
            });
        }
    }
    out
}

fn profile(cfg: &BenchConfig, raw: &[RawRow]) -> Vec<ProfileRow> {
    let budgets = if cfg.budgets.is_empty() {
        let hi = cfg
            .time_limit
            .unwrap_or_else(|| raw.iter().map(|r| r.time_s).fold(1e-3, f64::max));
        let lo = (hi * 1e-3).max(1e-4);
        (0..20).map(|i| lo * (hi / lo).powf(i as f64 / 19.0)).collect()
    } else {
        cfg.budgets.clone()
    };
    let mut out = Vec::new();
    for &value in &cfg.sweep.grid {
        for variant in &cfg.variants {
            let runs: Vec<&RawRow> = raw
                .iter()
                .filter(|r| r.grid_value == value && r.variant == variant.name)
                .collect();
            for &budget in &budgets {
                let solved = runs
                    .iter()
                    .filter(|r| r.status == "Optimal" && r.time_s <= budget)
                    .count();
                out.push(ProfileRow {
                    grid_value: value,
                    variant: variant.name.clone(),
                    budget_s: budget,
                    solved_fraction: solved as f64 / runs.len().max(1) as f64,
                });
            }
        }
    }
    out
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_raw_csv(path: &Path, raw: &[RawRow]) -> Result<()> {
    write_rows(path, raw)
}

pub fn write_summary_csv(path: &Path, summary: &Summary) -> Result<()> {
    match summary {
        Summary::Acceleration(rows) => write_rows(path, rows),
        Summary::Profile(rows) => write_rows(path, rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }
}
