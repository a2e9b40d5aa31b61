//! Node relaxation solver: proximal coordinate descent on a growing working
//! set.
//!
//! The relaxation replaces the node regularizer by its biconjugate. It is
//! solved as a sequence of sub-problems restricted to a working set `W`;
//! after each sub-problem the dual point `u = −∇f(Ax)` and `Aᵀu` are handed
//! to a hook, then `W` grows by every coordinate violating its optimality
//! condition.

use crate::dual::dual_value;
use crate::matrix::{axpy, dot, norm_inf};
use crate::node::Node;
use crate::penalty::IndexClass;
use crate::problem::ProblemInstance;

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct RelaxSettings {
    /// Relative primal-dual gap accepted as converged.
    pub rel_gap_tol: f64,
    /// Coordinate descent stops when no coordinate moves more than
    /// `cd_tol · (1 + ‖x‖∞)` over a sweep.
    pub cd_tol: f64,
    pub max_sweeps_per_subproblem: usize,
    pub max_workingset_rounds: usize,
}

impl Default for RelaxSettings {
    fn default() -> Self {
        Self {
            rel_gap_tol: 1e-8,
            cd_tol: 1e-8,
            max_sweeps_per_subproblem: 10_000,
            max_workingset_rounds: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RelaxStatus {
    Converged,
    EarlyStoppedByPruning,
    IterLimit,
}

#[derive(Debug, Clone)]
pub struct RelaxOutcome {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// `f(Ax) + ĝ(x)` at the final iterate.
    pub primal_value: f64,
    /// `D(u)`, a certified lower bound on the node problem.
    pub dual_value: f64,
    pub status: RelaxStatus,
    pub subproblems: usize,
}

/// What the hook sees after each sub-problem.
#[derive(Debug)]
pub struct DualPoint<'a> {
    pub u: &'a [f64],
    /// `aᵢᵀu` for every column.
    pub inner: &'a [f64],
    pub dual_value: f64,
    pub primal_value: f64,
    /// The incumbent value the caller passed in.
    pub upper_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookAction {
    Continue,
    /// Abandon the relaxation; the caller has already dealt with the node.
    Stop,
}

const FERMAT_TOL: f64 = 1e-10;

/// `f(Ax) + Σ ĝᵢ(xᵢ)`.
pub fn relaxed_objective(instance: &ProblemInstance, node: &Node, x: &[f64], ax: &[f64]) -> f64 {
    let lambda = instance.lambda;
    let g: f64 = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| instance.penalty.node_biconjugate(lambda, node.class(i), xi))
        .sum();
    instance.loss.value_unchecked(&instance.y, ax) + g
}

/// Indices outside the working set whose optimality condition
/// `0 ∈ grad_term[i] + ∂ĝᵢ(xᵢ)` fails, with `grad_term[i] = aᵢᵀ∇f(Ax)`.
pub fn fermat_violation(
    instance: &ProblemInstance,
    node: &Node,
    x: &[f64],
    grad_term: &[f64],
) -> Vec<usize> {
    let mut in_ws = vec![false; node.n()];
    for &i in &node.working_set {
        in_ws[i] = true;
    }
    violators(instance, node, x, grad_term, &in_ws)
}

fn violators(
    instance: &ProblemInstance,
    node: &Node,
    x: &[f64],
    grad_term: &[f64],
    in_ws: &[bool],
) -> Vec<usize> {
    let norms = instance.column_norms_sq();
    (0..node.n())
        .filter(|&i| !in_ws[i] && node.class(i) != IndexClass::Zero && norms[i] > 0.0)
        .filter(|&i| {
            let (lo, hi) =
                instance
                    .penalty
                    .node_subdifferential(instance.lambda, node.class(i), x[i]);
            let target = -grad_term[i];
            target < lo - FERMAT_TOL || target > hi + FERMAT_TOL
        })
        .collect()
}

/// Solves the relaxation of `node`, updating `node.x`, `node.ax` and
/// `node.working_set` in place.
pub fn solve_relaxation<H>(
    instance: &ProblemInstance,
    node: &mut Node,
    upper_bound: f64,
    settings: &RelaxSettings,
    mut hook: H,
) -> RelaxOutcome
where
    H: FnMut(&Node, &DualPoint<'_>) -> HookAction,
{
    let n = node.n();
    let lambda = instance.lambda;
    let pen = instance.penalty;
    let loss = instance.loss;
    let norms = instance.column_norms_sq();
    let lf = loss.lipschitz();
    let usable = |node: &Node, i: usize| node.class(i) != IndexClass::Zero && norms[i] > 0.0;

    // Zero-class coordinates are pinned.
    for i in 0..n {
        if node.class(i) == IndexClass::Zero && node.x[i] != 0.0 {
            axpy(-node.x[i], instance.a.col(i), &mut node.ax);
            node.x[i] = 0.0;
        }
    }

    let mut in_ws = vec![false; n];
    let mut ws: Vec<usize> = Vec::new();
    for i in 0..n {
        if node.x[i] != 0.0 && usable(node, i) {
            in_ws[i] = true;
            ws.push(i);
        }
    }
    if let Some(b) = node.last_branched {
        if !in_ws[b] && usable(node, b) {
            in_ws[b] = true;
            ws.push(b);
        }
    }
    if ws.is_empty() {
        let grad = instance.loss_gradient(&node.ax);
        let seed = (0..n)
            .filter(|&i| usable(node, i))
            .map(|i| (i, instance.col_dot(i, &grad).abs()))
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((i, v)),
            });
        if let Some((i, _)) = seed {
            in_ws[i] = true;
            ws.push(i);
        }
    }

    let mut subproblems = 0;
    let mut status = RelaxStatus::IterLimit;
    let mut last: Option<(Vec<f64>, f64, f64)> = None;

    for _round in 0..settings.max_workingset_rounds {
        ws.sort_unstable();
        let mut sweep_limit_hit = true;
        for _ in 0..settings.max_sweeps_per_subproblem {
            let mut max_change = 0.0_f64;
            for &i in &ws {
                let class = node.class(i);
                let col = instance.a.col(i);
                let li = lf * norms[i];
                let g: f64 = col
                    .iter()
                    .zip(instance.y.iter().zip(&node.ax))
                    .map(|(&aji, (&yj, &wj))| aji * loss.grad_coord(yj, wj))
                    .sum();
                let old = node.x[i];
                let new = pen.node_prox(lambda, class, 1.0 / li, old - g / li);
                let d = new - old;
                if d != 0.0 {
                    axpy(d, col, &mut node.ax);
                    node.x[i] = new;
                    max_change = max_change.max(d.abs());
                }
            }
            if max_change <= settings.cd_tol * (1.0 + norm_inf(&node.x)) {
                sweep_limit_hit = false;
                break;
            }
        }
        subproblems += 1;

        let grad = instance.loss_gradient(&node.ax);
        let u: Vec<f64> = grad.iter().map(|g| -g).collect();
        let inner: Vec<f64> = (0..n).map(|i| dot(instance.a.col(i), &u)).collect();
        let primal = relaxed_objective(instance, node, &node.x, &node.ax);
        let dual = dual_value(instance, node, &u, &inner);
        node.working_set = ws.clone();

        let action = hook(
            node,
            &DualPoint {
                u: &u,
                inner: &inner,
                dual_value: dual,
                primal_value: primal,
                upper_bound,
            },
        );
        if action == HookAction::Stop {
            return RelaxOutcome {
                x: node.x.clone(),
                u,
                primal_value: primal,
                dual_value: dual,
                status: RelaxStatus::EarlyStoppedByPruning,
                subproblems,
            };
        }

        let gap_ok = primal - dual <= settings.rel_gap_tol * (1.0 + primal.abs());
        let grad_term: Vec<f64> = inner.iter().map(|v| -v).collect();
        let new = violators(instance, node, &node.x, &grad_term, &in_ws);
        last = Some((u, primal, dual));
        if new.is_empty() {
            status = if sweep_limit_hit && !gap_ok {
                RelaxStatus::IterLimit
            } else {
                RelaxStatus::Converged
            };
            break;
        }
        if gap_ok {
            status = RelaxStatus::Converged;
            break;
        }
        for i in new {
            in_ws[i] = true;
            ws.push(i);
        }
    }

    let (u, primal_value, dual_value) = last.unwrap_or_else(|| {
        let grad = instance.loss_gradient(&node.ax);
        let u: Vec<f64> = grad.iter().map(|g| -g).collect();
        let inner = instance.a.tr_mul_vec(&u);
        let p = relaxed_objective(instance, node, &node.x, &node.ax);
        let d = dual_value(instance, node, &u, &inner);
        (u, p, d)
    });
    node.working_set = ws;
    RelaxOutcome {
        x: node.x.clone(),
        u,
        primal_value,
        dual_value,
        status,
        subproblems,
    }
}
