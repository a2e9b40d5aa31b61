//! Branch-and-bound nodes `ν = (S0, S1, S•)` and the successor relation.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::matrix::axpy;
use crate::penalty::IndexClass;
use crate::problem::ProblemInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    ToZero,
    ToOne,
}

/// Moves one free index of a node to `S0` or `S1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuccessorSpec {
    pub branch: Branch,
    pub index: usize,
}

impl SuccessorSpec {
    pub fn to_zero(index: usize) -> Self {
        Self {
            branch: Branch::ToZero,
            index,
        }
    }

    pub fn to_one(index: usize) -> Self {
        Self {
            branch: Branch::ToOne,
            index,
        }
    }
}

/// A node of the search tree together with the relaxation state it carries
/// as a warm start.
#[derive(Debug, Clone)]
pub struct Node {
    pub id: u64,
    pub parent_id: Option<u64>,
    pub depth: usize,
    class_of: Vec<IndexClass>,
    /// Relaxation iterate.
    pub x: Vec<f64>,
    /// Cached `A x`.
    pub ax: Vec<f64>,
    pub working_set: Vec<usize>,
    /// Best certified lower bound on the node problem known so far.
    pub lower_bound: f64,
    pub last_branched: Option<usize>,
}

impl Node {
    /// `(∅, ∅, [n])` with `x = 0`. `m` is the number of samples.
    pub fn root(n: usize, m: usize) -> Result<Node> {
        if n < 1 {
            return Err(Error::InvalidArgument("a node needs at least one index".into()));
        }
        Ok(Node {
            id: 0,
            parent_id: None,
            depth: 0,
            class_of: vec![IndexClass::Free; n],
            x: vec![0.0; n],
            ax: vec![0.0; m],
            working_set: Vec::new(),
            lower_bound: f64::NEG_INFINITY,
            last_branched: None,
        })
    }

    /// Root node whose relaxation starts from `x0` (clamped to the box).
    pub fn root_with_start(instance: &ProblemInstance, x0: &[f64]) -> Result<Node> {
        if x0.len() != instance.n() {
            return Err(Error::DimensionMismatch(format!(
                "warm start has length {}, expected {}",
                x0.len(),
                instance.n()
            )));
        }
        let mut node = Node::root(instance.n(), instance.m())?;
        let big_m = instance.penalty.big_m();
        node.x = x0.iter().map(|v| v.clamp(-big_m, big_m)).collect();
        node.ax = instance.a.mul_vec(&node.x);
        Ok(node)
    }

    /// Builds a node with an explicit partition and `x = 0`.
    pub fn with_classes(classes: Vec<IndexClass>, m: usize) -> Result<Node> {
        let mut node = Node::root(classes.len(), m)?;
        node.depth = classes.iter().filter(|c| **c != IndexClass::Free).count();
        node.class_of = classes;
        Ok(node)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.class_of.len()
    }

    #[inline]
    pub fn class(&self, i: usize) -> IndexClass {
        self.class_of[i]
    }

    pub fn classes(&self) -> &[IndexClass] {
        &self.class_of
    }

    pub fn indices_of(&self, class: IndexClass) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.class_of[i] == class).collect()
    }

    pub fn free_indices(&self) -> Vec<usize> {
        self.indices_of(IndexClass::Free)
    }

    pub fn is_leaf(&self) -> bool {
        self.class_of.iter().all(|c| *c != IndexClass::Free)
    }

    /// Child obtained by fixing one free index. The child inherits the
    /// parent's relaxation state; fixing to zero also zeroes `xᵢ` and
    /// updates `Ax` incrementally.
    pub fn apply_successor(&self, instance: &ProblemInstance, spec: SuccessorSpec) -> Result<Node> {
        let i = spec.index;
        if i >= self.n() || self.class_of[i] != IndexClass::Free {
            return Err(Error::IndexNotFree(i));
        }
        let mut child = self.clone();
        child.parent_id = Some(self.id);
        child.depth += 1;
        child.last_branched = Some(i);
        match spec.branch {
            Branch::ToZero => {
                child.class_of[i] = IndexClass::Zero;
                let xi = child.x[i];
                if xi != 0.0 {
                    axpy(-xi, instance.a.col(i), &mut child.ax);
                    child.x[i] = 0.0;
                }
                child.working_set.retain(|&j| j != i);
            }
            Branch::ToOne => child.class_of[i] = IndexClass::One,
        }
        Ok(child)
    }

    /// Whether `other` is a successor of `self` (`S0 ⊆ S0'` and `S1 ⊆ S1'`).
    pub fn is_successor(&self, other: &Node) -> Result<bool> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "nodes over {} and {} indices",
                self.n(),
                other.n()
            )));
        }
        Ok(self.class_of.iter().zip(&other.class_of).all(|(a, b)| match a {
            IndexClass::Free => true,
            fixed => fixed == b,
        }))
    }

    /// Partition as a string over `{0, 1, •}`.
    pub fn class_string(&self) -> String {
        self.class_of.iter().map(|c| c.symbol()).collect()
    }

    /// Whether `x` lies in the closure of this node's region.
    pub fn contains_support_of(&self, x: &[f64]) -> bool {
        self.class_of.iter().zip(x).all(|(c, &xi)| match c {
            IndexClass::Zero => xi == 0.0,
            IndexClass::One => xi != 0.0,
            IndexClass::Free => true,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "id": self.id,
            "classes": self.class_string(),
            "depth": self.depth,
            "bound": finite_or_null(self.lower_bound),
        })
    }
}

pub(crate) fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}
