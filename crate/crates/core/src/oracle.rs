//! Brute-force reference solver over every support set.
//!
//! Each support is solved by accelerated proximal gradient with restarts, an
//! algorithm deliberately different from the coordinate descent used by the
//! branch-and-bound solver.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{dot, norm_sq, DenseMatrix};
use crate::penalty::PenaltyKind;
use crate::problem::ProblemInstance;

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub objective: f64,
    pub support: Vec<usize>,
    pub x: Vec<f64>,
}

pub const DEFAULT_MAX_N: usize = 16;
pub const DEFAULT_INNER_TOL: f64 = 1e-10;

const MAX_ITERS: usize = 200_000;

/// Exact minimizer by enumeration of all `2ⁿ` supports.
pub fn brute_force(instance: &ProblemInstance, max_n: usize, inner_tol: f64) -> Result<OracleResult> {
    let n = instance.n();
    if n > max_n {
        return Err(Error::TooLarge { n, max_n });
    }
    instance.ensure_valid()?;
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let results: Vec<(f64, usize, Vec<f64>)> = masks
        .par_iter()
        .enumerate()
        .map(|(rank, &mask)| {
            let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let x = solve_support(instance, &support, inner_tol);
            (instance.objective(&x), rank, x)
        })
        .collect();
    let (objective, _, x) = results
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least the empty support");
    let support = (0..n).filter(|&i| x[i] != 0.0).collect();
    Ok(OracleResult { objective, support, x })
}

/// Prox of `s·h` for one coordinate, written independently of the solver's.
fn prox_h(pen: &PenaltyKind, s: f64, t: f64) -> f64 {
    match *pen {
        PenaltyKind::BigM { big_m } => t.clamp(-big_m, big_m),
        PenaltyKind::BigML1 { big_m, alpha } => {
            let v = t.signum() * (t.abs() - s * alpha).max(0.0);
            v.clamp(-big_m, big_m)
        }
        PenaltyKind::BigML2 { big_m, alpha } => (t / (1.0 + 2.0 * s * alpha)).clamp(-big_m, big_m),
    }
}

fn largest_eigenvalue_bound(a_s: &DenseMatrix) -> f64 {
    let k = a_s.cols();
    let fro: f64 = a_s.as_col_major().iter().map(|v| v * v).sum();
    if k == 0 || fro == 0.0 {
        return fro;
    }
    let mut v = vec![1.0 / (k as f64).sqrt(); k];
    let mut est = 0.0;
    for _ in 0..500 {
        let av = a_s.mul_vec(&v);
        let w = a_s.tr_mul_vec(&av);
        let nw = norm_sq(&w).sqrt();
        if nw == 0.0 {
            break;
        }
        est = dot(&v, &w);
        v = w.iter().map(|x| x / nw).collect();
    }
    (1.02 * est).min(fro).max(f64::MIN_POSITIVE)
}

/// Minimizes `f(A_S z) + Σ h(zᵢ)` and scatters the result into `ℝⁿ`.
pub fn solve_support(instance: &ProblemInstance, support: &[usize], tol: f64) -> Vec<f64> {
    let n = instance.n();
    let mut x = vec![0.0; n];
    if support.is_empty() {
        return x;
    }
    let a_s = instance.a.select_columns(support);
    let pen = instance.penalty;
    let loss = instance.loss;
    let y = &instance.y;
    let l = loss.lipschitz() * largest_eigenvalue_bound(&a_s);
    if l == 0.0 {
        return x;
    }
    let step = 1.0 / l;
    let k = support.len();
    let smooth_grad = |z: &[f64]| -> Vec<f64> {
        let w = a_s.mul_vec(z);
        a_s.tr_mul_vec(&loss.gradient(y, &w).expect("labels validated"))
    };
    let composite = |z: &[f64]| -> f64 {
        let w = a_s.mul_vec(z);
        loss.value(y, &w).expect("labels validated") + z.iter().map(|&v| pen.value(v)).sum::<f64>()
    };

    let gradient_map_norm = |z: &[f64]| -> f64 {
        let g = smooth_grad(z);
        z.iter()
            .zip(&g)
            .map(|(&v, &gi)| {
                let d = (v - prox_h(&pen, step, v - step * gi)) / step;
                d * d
            })
            .sum::<f64>()
            .sqrt()
    };

    let mut z = vec![0.0; k];
    let mut z_prev = z.clone();
    let mut t = 1.0_f64;
    let mut f_prev = composite(&z);
    for _ in 0..MAX_ITERS {
        if gradient_map_norm(&z) <= tol {
            break;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        let yk: Vec<f64> = z.iter().zip(&z_prev).map(|(a, b)| a + beta * (a - b)).collect();
        let g = smooth_grad(&yk);
        let z_new: Vec<f64> = yk
            .iter()
            .zip(&g)
            .map(|(&v, &gi)| prox_h(&pen, step, v - step * gi))
            .collect();
        let f_new = composite(&z_new);
        if beta > 0.0 && f_new > f_prev {
            // drop the momentum and retry from the last iterate
            t = 1.0;
            z_prev = z.clone();
            continue;
        }
        z_prev = std::mem::replace(&mut z, z_new);
        f_prev = f_new;
        t = t_next;
    }
    for (j, &i) in support.iter().enumerate() {
        x[i] = z[j];
    }
    x
}
