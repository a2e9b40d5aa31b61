//! Dual lower bounds and simultaneous pruning of direct successors.
//!
//! For any `u ∈ ℝᵐ` the node dual function is
//!
//! ```text
//! D(u) = −f*(−u) − Σ_{S1} (h*(aᵢᵀu) − λ) − Σ_{S•} [h*(aᵢᵀu) − λ]₊
//! ```
//!
//! and the dual function of any successor differs from it only by a sum of
//! pivot terms, one per newly fixed index. Given the inner products
//! `aᵢᵀu`, the bounds of all `2|S•|` direct successors therefore cost
//! `O(m + n)` on top of a single evaluation of `D(u)`.

use crate::error::Result;
use crate::node::{Node, SuccessorSpec};
use crate::penalty::IndexClass;
use crate::problem::ProblemInstance;

/// Safety margin added to the strict inequality of a dual pruning test.
pub fn pruning_slack(upper_bound: f64) -> f64 {
    1e-10 * (1.0 + upper_bound.abs())
}

/// `D(u)` for the partition of `node`; `inner[i]` must hold `aᵢᵀu`.
/// Returns `−∞` when `−u` lies outside the domain of `f*`.
pub fn dual_value(instance: &ProblemInstance, node: &Node, u: &[f64], inner: &[f64]) -> f64 {
    dual_value_for_classes(instance, node.classes(), u, inner)
}

pub(crate) fn dual_value_for_classes(
    instance: &ProblemInstance,
    classes: &[IndexClass],
    u: &[f64],
    inner: &[f64],
) -> f64 {
    let fstar = instance.loss.conjugate_neg_unchecked(&instance.y, u);
    if fstar == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    let lambda = instance.lambda;
    let g: f64 = classes
        .iter()
        .zip(inner)
        .map(|(&c, &v)| instance.penalty.node_conjugate(lambda, c, v))
        .sum();
    -fstar - g
}

/// Dual bounds of every direct successor of a node at one dual point.
#[derive(Debug, Clone)]
pub struct DualBoundSweep {
    /// `D(u)` at the node itself.
    pub base: f64,
    /// `aᵢᵀu` for every column.
    pub inner: Vec<f64>,
    /// Free indices, ascending; `d0`/`d1` are aligned with it.
    pub free: Vec<usize>,
    /// Bound of the successor fixing `free[k]` to zero.
    pub d0: Vec<f64>,
    /// Bound of the successor fixing `free[k]` to nonzero.
    pub d1: Vec<f64>,
    /// Free indices whose zero-successor passes the test.
    pub i0: Vec<usize>,
    /// Free indices whose one-successor passes the test.
    pub i1: Vec<usize>,
}

impl DualBoundSweep {
    pub fn passed_any(&self) -> bool {
        !self.i0.is_empty() || !self.i1.is_empty()
    }
}

/// Evaluates the dual bound of all direct successors of `node` at `u`, and
/// collects those exceeding `upper_bound + slack`.
pub fn sweep_direct_successors(
    instance: &ProblemInstance,
    node: &Node,
    u: &[f64],
    inner: &[f64],
    upper_bound: f64,
    slack: f64,
) -> DualBoundSweep {
    let base = dual_value(instance, node, u, inner);
    let free = node.free_indices();
    let lambda = instance.lambda;
    let pen = &instance.penalty;
    let mut d0 = Vec::with_capacity(free.len());
    let mut d1 = Vec::with_capacity(free.len());
    let mut i0 = Vec::new();
    let mut i1 = Vec::new();
    let threshold = upper_bound + slack;
    for &i in &free {
        let (b0, b1) = if base == f64::NEG_INFINITY {
            (base, base)
        } else {
            (
                base + pen.pivot0(lambda, inner[i]),
                base + pen.pivot1(lambda, inner[i]),
            )
        };
        if b0 > threshold {
            i0.push(i);
        }
        if b1 > threshold {
            i1.push(i);
        }
        d0.push(b0);
        d1.push(b1);
    }
    DualBoundSweep {
        base,
        inner: inner.to_vec(),
        free,
        d0,
        d1,
        i0,
        i1,
    }
}

#[derive(Debug, Clone)]
pub enum ExpansionOutcome {
    /// Both successors of some index fail, so the whole region goes.
    PruneWholeNode,
    /// The unique surviving deep successor after discarding every failed
    /// direct successor.
    Refined {
        node: Node,
        fixed_to_zero: Vec<usize>,
        fixed_to_one: Vec<usize>,
    },
    NoChange,
}

/// Expands the tree below `node` from the outcome of a sweep.
///
/// An index in `I0` can only be nonzero and one in `I1` can only be zero;
/// since a passed test stays passed on every successor keeping the index
/// free, all fixings can be applied one after the other.
pub fn expand_tree(
    instance: &ProblemInstance,
    node: &Node,
    sweep: &DualBoundSweep,
) -> Result<ExpansionOutcome> {
    if sweep.i0.iter().any(|i| sweep.i1.binary_search(i).is_ok()) {
        return Ok(ExpansionOutcome::PruneWholeNode);
    }
    if !sweep.passed_any() {
        return Ok(ExpansionOutcome::NoChange);
    }
    let mut fixes: Vec<SuccessorSpec> = sweep
        .i0
        .iter()
        .map(|&i| SuccessorSpec::to_one(i))
        .chain(sweep.i1.iter().map(|&i| SuccessorSpec::to_zero(i)))
        .collect();
    fixes.sort_by_key(|s| s.index);

    let mut bound = sweep.base;
    let mut current = node.clone();
    for spec in fixes {
        current = current.apply_successor(instance, spec)?;
        let v = sweep.inner[spec.index];
        bound += match spec.branch {
            crate::node::Branch::ToZero => instance.penalty.pivot0(instance.lambda, v),
            crate::node::Branch::ToOne => instance.penalty.pivot1(instance.lambda, v),
        };
    }
    current.parent_id = Some(node.id);
    current.lower_bound = node.lower_bound.max(bound);
    Ok(ExpansionOutcome::Refined {
        node: current,
        fixed_to_zero: sweep.i1.clone(),
        fixed_to_one: sweep.i0.clone(),
    })
}
