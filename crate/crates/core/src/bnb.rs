//! Depth-first branch-and-bound driver.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dual::{expand_tree, pruning_slack, sweep_direct_successors, ExpansionOutcome};
use crate::error::{Error, Result};
use crate::node::{Node, SuccessorSpec};
use crate::penalty::IndexClass;
use crate::problem::ProblemInstance;
use crate::relax::{solve_relaxation, HookAction, RelaxSettings, RelaxStatus};
use crate::trace::{TraceEvent, TraceSink};

/// Best feasible point found so far.
#[derive(Debug, Clone, Serialize)]
pub struct Incumbent {
    pub x_best: Vec<f64>,
    pub p_bar: f64,
    pub support: Vec<usize>,
}

impl Incumbent {
    /// The all-zero point, always feasible.
    pub fn zero(instance: &ProblemInstance) -> Self {
        let x = vec![0.0; instance.n()];
        Incumbent {
            p_bar: instance.objective(&x),
            x_best: x,
            support: Vec::new(),
        }
    }

    fn replace_if_better(&mut self, instance: &ProblemInstance, x: Vec<f64>) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let value = instance.objective(&x);
        if value < self.p_bar - 1e-12 {
            self.support = support_of(&x);
            self.x_best = x;
            self.p_bar = value;
            true
        } else {
            false
        }
    }
}

pub fn support_of(x: &[f64]) -> Vec<usize> {
    (0..x.len()).filter(|&i| x[i] != 0.0).collect()
}

/// Zeroes entries with `|xᵢ| ≤ threshold` and clamps the rest to the box.
pub fn round_candidate(instance: &ProblemInstance, x: &[f64], threshold: f64) -> Vec<f64> {
    let big_m = instance.penalty.big_m();
    x.iter()
        .map(|&v| if v.abs() <= threshold { 0.0 } else { v.clamp(-big_m, big_m) })
        .collect()
}

/// Rounds `x_candidate` to a feasible point and keeps it if it beats the
/// current incumbent by more than `1e-12`.
pub fn update_incumbent(
    instance: &ProblemInstance,
    incumbent: &Incumbent,
    x_candidate: &[f64],
    threshold: f64,
) -> Incumbent {
    let mut next = incumbent.clone();
    next.replace_if_better(instance, round_candidate(instance, x_candidate, threshold));
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChildOrder {
    OneFirst,
    ZeroFirst,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Relative tolerance of the standard pruning test and of the final gap.
    pub gap_tol: f64,
    /// Seconds; `None` means unlimited.
    pub time_limit: Option<f64>,
    pub simultaneous_pruning: bool,
    pub relax: RelaxSettings,
    pub branch_child_order: ChildOrder,
    pub seed: u64,
    /// Entries of a candidate at or below this magnitude are set to zero.
    pub incumbent_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            time_limit: None,
            simultaneous_pruning: true,
            relax: RelaxSettings::default(),
            branch_child_order: ChildOrder::OneFirst,
            seed: 0,
            incumbent_threshold: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::TimeLimit => "TimeLimit",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub lambda: f64,
    pub objective: f64,
    pub x: Vec<f64>,
    pub support: Vec<usize>,
    pub support_size: usize,
    /// Certified global lower bound on the optimum.
    pub lower_bound: f64,
    pub nodes_explored: u64,
    /// Relaxations run to termination.
    pub relaxations_solved: u64,
    /// Relaxations abandoned early because a successor test passed.
    pub relaxations_interrupted: u64,
    pub subproblems_solved: u64,
    pub indices_fixed_by_simpruning: u64,
    pub wholenode_simprunes: u64,
    pub wall_time: f64,
    pub final_gap: f64,
}

pub fn solve(
    instance: &ProblemInstance,
    config: &SolverConfig,
    warm_start: Option<&[f64]>,
) -> Result<SolveReport> {
    solve_traced(instance, config, warm_start, None)
}

/// Incumbent bookkeeping with a support-restricted polish step.
struct IncumbentKeeper<'a> {
    instance: &'a ProblemInstance,
    threshold: f64,
    inc: Incumbent,
    polished: HashSet<Vec<usize>>,
}

const POLISH_MARGIN: f64 = 1e-4;

impl<'a> IncumbentKeeper<'a> {
    /// Offers a candidate; returns whether the incumbent changed.
    fn offer(&mut self, x: &[f64]) -> bool {
        let rounded = round_candidate(self.instance, x, self.threshold);
        if rounded.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let value = self.instance.objective(&rounded);
        let mut improved = self.inc.replace_if_better(self.instance, rounded.clone());
        let p_bar = self.inc.p_bar;
        if value <= p_bar + POLISH_MARGIN * (1.0 + p_bar.abs()) {
            let support = support_of(&rounded);
            if !support.is_empty() && self.polished.insert(support.clone()) {
                if let Some(x) = polish(self.instance, &rounded, &support) {
                    let x = round_candidate(self.instance, &x, self.threshold);
                    improved |= self.inc.replace_if_better(self.instance, x);
                }
            }
        }
        improved
    }
}

/// Minimizes the objective over points supported on `support`, starting
/// from `x0`.
fn polish(instance: &ProblemInstance, x0: &[f64], support: &[usize]) -> Option<Vec<f64>> {
    let mut classes = vec![IndexClass::Zero; instance.n()];
    for &i in support {
        classes[i] = IndexClass::One;
    }
    let mut leaf = Node::with_classes(classes, instance.m()).ok()?;
    leaf.x = x0.to_vec();
    leaf.ax = instance.a.mul_vec(&leaf.x);
    let settings = RelaxSettings {
        rel_gap_tol: 1e-14,
        cd_tol: 1e-12,
        ..RelaxSettings::default()
    };
    let out = solve_relaxation(instance, &mut leaf, f64::INFINITY, &settings, |_, _| {
        HookAction::Continue
    });
    Some(out.x)
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Region class strings discarded while descending from `node` through the
/// fixings of a refined expansion.
fn discarded_regions(node: &Node, to_zero: &[usize], to_one: &[usize]) -> Vec<String> {
    let mut classes = node.classes().to_vec();
    let mut fixes: Vec<(usize, IndexClass)> = to_zero
        .iter()
        .map(|&i| (i, IndexClass::Zero))
        .chain(to_one.iter().map(|&i| (i, IndexClass::One)))
        .collect();
    fixes.sort_by_key(|f| f.0);
    let mut regions = Vec::with_capacity(fixes.len());
    for (i, keep) in fixes {
        let dropped = if keep == IndexClass::Zero {
            IndexClass::One
        } else {
            IndexClass::Zero
        };
        classes[i] = dropped;
        regions.push(classes.iter().map(|c| c.symbol()).collect());
        classes[i] = keep;
    }
    regions
}

/// [`solve`] with an optional sink receiving one event per node action.
pub fn solve_traced(
    instance: &ProblemInstance,
    config: &SolverConfig,
    warm_start: Option<&[f64]>,
    mut trace: Option<&mut dyn TraceSink>,
) -> Result<SolveReport> {
    if !(config.gap_tol > 0.0) {
        return Err(Error::InvalidArgument("gap_tol must be positive".into()));
    }
    instance.ensure_valid()?;
    let start = Instant::now();
    let n = instance.n();
    let tol = |p: f64| config.gap_tol * (1.0 + p.abs());
    let mut emit = |ev: TraceEvent| {
        if let Some(sink) = trace.as_deref_mut() {
            sink.record(&ev);
        }
    };

    let mut keeper = IncumbentKeeper {
        instance,
        threshold: config.incumbent_threshold,
        inc: Incumbent::zero(instance),
        polished: HashSet::new(),
    };
    let root = match warm_start {
        Some(x0) => {
            let root = Node::root_with_start(instance, x0)?;
            if keeper.offer(x0) {
                emit(TraceEvent::IncumbentUpdate {
                    node: 0,
                    p_bar: keeper.inc.p_bar,
                    support: keeper.inc.support.clone(),
                });
            }
            root
        }
        None => Node::root(n, instance.m())?,
    };

    let mut stack = vec![root];
    let mut next_id = 1u64;
    let mut nodes_explored = 0u64;
    let mut relaxations_solved = 0u64;
    let mut relaxations_interrupted = 0u64;
    let mut subproblems_solved = 0u64;
    let mut indices_fixed = 0u64;
    let mut wholenode = 0u64;
    let mut status = SolveStatus::Optimal;

    while let Some(mut node) = stack.pop() {
        if let Some(limit) = config.time_limit {
            if start.elapsed().as_secs_f64() >= limit {
                stack.push(node);
                status = SolveStatus::TimeLimit;
                break;
            }
        }
        nodes_explored += 1;
        emit(TraceEvent::Enter {
            node: node.id,
            parent: node.parent_id,
            depth: node.depth,
            classes: node.class_string(),
            bound: finite(node.lower_bound),
        });
        let p_bar = keeper.inc.p_bar;
        if node.lower_bound > p_bar - tol(p_bar) {
            emit(TraceEvent::PruneStandard {
                node: node.id,
                classes: node.class_string(),
                bound: finite(node.lower_bound),
                p_bar,
            });
            continue;
        }

        let mut expansion: Option<ExpansionOutcome> = None;
        let outcome = solve_relaxation(instance, &mut node, p_bar, &config.relax, |nd, dp| {
            if !config.simultaneous_pruning {
                return HookAction::Continue;
            }
            let sweep = sweep_direct_successors(
                instance,
                nd,
                dp.u,
                dp.inner,
                dp.upper_bound,
                pruning_slack(dp.upper_bound),
            );
            if !sweep.passed_any() {
                return HookAction::Continue;
            }
            match expand_tree(instance, nd, &sweep) {
                Ok(ExpansionOutcome::NoChange) | Err(_) => HookAction::Continue,
                Ok(out) => {
                    expansion = Some(out);
                    HookAction::Stop
                }
            }
        });
        subproblems_solved += outcome.subproblems as u64;
        if outcome.status == RelaxStatus::EarlyStoppedByPruning {
            relaxations_interrupted += 1;
        } else {
            relaxations_solved += 1;
        }
        node.lower_bound = node.lower_bound.max(outcome.dual_value);

        if keeper.offer(&outcome.x) {
            emit(TraceEvent::IncumbentUpdate {
                node: node.id,
                p_bar: keeper.inc.p_bar,
                support: keeper.inc.support.clone(),
            });
        }

        match expansion {
            Some(ExpansionOutcome::PruneWholeNode) => {
                wholenode += 1;
                emit(TraceEvent::PruneSimultaneous {
                    node: node.id,
                    whole: true,
                    regions: vec![node.class_string()],
                    fixed_to_zero: Vec::new(),
                    fixed_to_one: Vec::new(),
                    p_bar,
                });
                continue;
            }
            Some(ExpansionOutcome::Refined {
                node: mut refined,
                fixed_to_zero,
                fixed_to_one,
            }) => {
                indices_fixed += (fixed_to_zero.len() + fixed_to_one.len()) as u64;
                emit(TraceEvent::PruneSimultaneous {
                    node: node.id,
                    whole: false,
                    regions: discarded_regions(&node, &fixed_to_zero, &fixed_to_one),
                    fixed_to_zero,
                    fixed_to_one,
                    p_bar,
                });
                refined.id = next_id;
                next_id += 1;
                stack.push(refined);
                continue;
            }
            _ => {}
        }

        let p_bar = keeper.inc.p_bar;
        if node.lower_bound > p_bar - tol(p_bar) {
            emit(TraceEvent::PruneStandard {
                node: node.id,
                classes: node.class_string(),
                bound: finite(node.lower_bound),
                p_bar,
            });
            continue;
        }
        if node.is_leaf() {
            continue;
        }

        let mut branch = None;
        let mut best = f64::NEG_INFINITY;
        for i in node.free_indices() {
            if node.x[i].abs() > best {
                best = node.x[i].abs();
                branch = Some(i);
            }
        }
        let Some(i) = branch else { continue };
        let mut zero = node.apply_successor(instance, SuccessorSpec::to_zero(i))?;
        let mut one = node.apply_successor(instance, SuccessorSpec::to_one(i))?;
        zero.id = next_id;
        one.id = next_id + 1;
        next_id += 2;
        emit(TraceEvent::Branch {
            node: node.id,
            index: i,
            zero_child: zero.id,
            one_child: one.id,
        });
        match config.branch_child_order {
            ChildOrder::OneFirst => {
                stack.push(zero);
                stack.push(one);
            }
            ChildOrder::ZeroFirst => {
                stack.push(one);
                stack.push(zero);
            }
        }
    }

    let inc = keeper.inc;
    let lower_bound = if status == SolveStatus::Optimal {
        inc.p_bar
    } else {
        stack
            .iter()
            .map(|nd| nd.lower_bound)
            .fold(inc.p_bar, f64::min)
    };
    let final_gap = if status == SolveStatus::Optimal {
        0.0
    } else {
        (inc.p_bar - lower_bound) / (1.0 + inc.p_bar.abs())
    };
    Ok(SolveReport {
        status,
        lambda: instance.lambda,
        objective: inc.p_bar,
        support_size: inc.support.len(),
        support: inc.support,
        x: inc.x_best,
        lower_bound,
        nodes_explored,
        relaxations_solved,
        relaxations_interrupted,
        subproblems_solved,
        indices_fixed_by_simpruning: indices_fixed,
        wholenode_simprunes: wholenode,
        wall_time: start.elapsed().as_secs_f64(),
        final_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::LossKind;
    use crate::matrix::DenseMatrix;
    use crate::penalty::PenaltyKind;

    #[test]
    fn one_dimensional_example() {
        let a = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        let inst = ProblemInstance::new(
            a,
            vec![1.0],
            LossKind::LeastSquares,
            PenaltyKind::BigM { big_m: 10.0 },
            0.1,
        )
        .unwrap();
        let rep = solve(&inst, &SolverConfig::default(), None).unwrap();
        assert_eq!(rep.status, SolveStatus::Optimal);
        assert!((rep.x[0] - 1.0).abs() < 1e-9);
        assert!((rep.objective - 0.1).abs() < 1e-12);
        assert_eq!(rep.support, vec![0]);
    }

    fn tiny() -> ProblemInstance {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        ProblemInstance::new(
            a,
            vec![1.0, 1.0],
            LossKind::LeastSquares,
            PenaltyKind::BigM { big_m: 5.0 },
            0.2,
        )
        .unwrap()
    }

    #[test]
    fn update_incumbent_rules() {
        let inst = tiny();
        let zero = Incumbent::zero(&inst);
        assert_eq!(zero.p_bar, 1.0);
        let same = update_incumbent(&inst, &zero, &[0.0, 0.0], 1e-8);
        assert_eq!(same.p_bar, zero.p_bar);
        let thresholded = update_incumbent(&inst, &zero, &[1e-9, 1.0], 1e-8);
        assert_eq!(thresholded.x_best[0], 0.0);
        assert_eq!(thresholded.support, vec![1]);
        let clamped = update_incumbent(&inst, &zero, &[0.0, 100.0], 1e-8);
        assert_eq!(clamped.p_bar, zero.p_bar);
    }

    #[test]
    fn rejects_bad_gap_tol() {
        let cfg = SolverConfig {
            gap_tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(solve(&tiny(), &cfg, None).is_err());
    }

    #[test]
    fn child_orders_agree() {
        let inst = tiny();
        let a = solve(&inst, &SolverConfig::default(), None).unwrap();
        let cfg = SolverConfig {
            branch_child_order: ChildOrder::ZeroFirst,
            simultaneous_pruning: false,
            ..SolverConfig::default()
        };
        let b = solve(&inst, &cfg, None).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-12);
    }
}
