//! Problem data: `min_x f(Ax) + λ‖x‖₀ + Σ h(xᵢ)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::matrix::{dot, DenseMatrix};
use crate::penalty::PenaltyKind;

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    pub loss: LossKind,
    pub penalty: PenaltyKind,
    pub lambda: f64,
    column_norms_sq: Vec<f64>,
}

/// A broken precondition found by [`ProblemInstance::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LambdaNotPositive,
    NonFiniteMatrix,
    NonFiniteObservations,
    BoundNotPositive,
    AlphaNegative,
    AlphaRequiredPositive,
    LabelsNotBinary,
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Violation::LambdaNotPositive => "lambda must be positive",
            Violation::NonFiniteMatrix => "matrix entries must be finite",
            Violation::NonFiniteObservations => "observations must be finite",
            Violation::BoundNotPositive => "M must be positive",
            Violation::AlphaNegative => "alpha must be nonnegative",
            Violation::AlphaRequiredPositive => "alpha must be positive for the L2 + Big-M penalty",
            Violation::LabelsNotBinary => "labels must be ±1",
            Violation::Empty => "matrix must have at least one row and one column",
        };
        f.write_str(msg)
    }
}

impl ProblemInstance {
    /// Assembles an instance. Only shapes are checked here; call
    /// [`validate`](Self::validate) for the remaining preconditions.
    pub fn new(
        a: DenseMatrix,
        y: Vec<f64>,
        loss: LossKind,
        penalty: PenaltyKind,
        lambda: f64,
    ) -> Result<Self> {
        if a.rows() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but y has {} entries",
                a.rows(),
                y.len()
            )));
        }
        let column_norms_sq = a.column_norms_sq();
        Ok(Self {
            a,
            y,
            loss,
            penalty,
            lambda,
            column_norms_sq,
        })
    }

    /// Same data, different `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    #[inline]
    pub fn column_norms_sq(&self) -> &[f64] {
        &self.column_norms_sq
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.m() == 0 || self.n() == 0 {
            out.push(Violation::Empty);
        }
        if !(self.lambda > 0.0) {
            out.push(Violation::LambdaNotPositive);
        }
        if self.a.as_col_major().iter().any(|v| !v.is_finite()) {
            out.push(Violation::NonFiniteMatrix);
        }
        if self.y.iter().any(|v| !v.is_finite()) {
            out.push(Violation::NonFiniteObservations);
        }
        let big_m = self.penalty.big_m();
        if !(big_m > 0.0) || !big_m.is_finite() {
            out.push(Violation::BoundNotPositive);
        }
        match self.penalty {
            PenaltyKind::BigM { .. } => {}
            PenaltyKind::BigML1 { alpha, .. } => {
                if !(alpha >= 0.0) || !alpha.is_finite() {
                    out.push(Violation::AlphaNegative);
                }
            }
            PenaltyKind::BigML2 { alpha, .. } => {
                if !(alpha >= 0.0) || !alpha.is_finite() {
                    out.push(Violation::AlphaNegative);
                } else if alpha == 0.0 {
                    out.push(Violation::AlphaRequiredPositive);
                }
            }
        }
        if self.loss.check_labels(&self.y).is_err() {
            out.push(Violation::LabelsNotBinary);
        }
        out
    }

    /// Errors with the full violation list when the instance is invalid.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(v.iter().map(ToString::to_string).collect()))
        }
    }

    /// `aᵢᵀ v`
    #[inline]
    pub fn col_dot(&self, i: usize, v: &[f64]) -> f64 {
        dot(self.a.col(i), v)
    }

    /// Objective of the original problem at `x`; `+∞` if outside the box.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let w = self.a.mul_vec(x);
        self.objective_with_ax(x, &w)
    }

    pub(crate) fn objective_with_ax(&self, x: &[f64], ax: &[f64]) -> f64 {
        let mut g = 0.0;
        for &xi in x {
            if xi != 0.0 {
                g += self.lambda + self.penalty.value(xi);
            }
        }
        self.loss.value_unchecked(&self.y, ax) + g
    }

    /// `∇f(Ax)` given `Ax`.
    pub(crate) fn loss_gradient(&self, ax: &[f64]) -> Vec<f64> {
        self.y
            .iter()
            .zip(ax)
            .map(|(&yj, &wj)| self.loss.grad_coord(yj, wj))
            .collect()
    }
}
