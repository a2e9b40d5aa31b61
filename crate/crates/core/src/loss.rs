//! Data-fidelity losses `f(w)` with `w = A x`.
//!
//! All three losses are separable across samples, differentiable and
//! have gradients Lipschitz with constant [`LossKind::lipschitz`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `½‖y − w‖²`
    LeastSquares,
    /// `Σ log(1 + exp(−yᵢwᵢ))`
    Logistic,
    /// `Σ [1 − yᵢwᵢ]₊²`
    SquaredHinge,
}

impl LossKind {
    /// Lipschitz constant of the gradient.
    pub fn lipschitz(self) -> f64 {
        match self {
            LossKind::LeastSquares => 1.0,
            LossKind::Logistic => 0.25,
            LossKind::SquaredHinge => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LossKind::LeastSquares => "least-squares",
            LossKind::Logistic => "logistic",
            LossKind::SquaredHinge => "squared-hinge",
        }
    }

    pub fn is_classification(self) -> bool {
        !matches!(self, LossKind::LeastSquares)
    }

    /// Checks that `y` is admissible for this loss.
    pub fn check_labels(self, y: &[f64]) -> Result<()> {
        if self.is_classification() && y.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidLabels(self.name()));
        }
        Ok(())
    }

    fn check(self, y: &[f64], w: &[f64]) -> Result<()> {
        if y.len() != w.len() {
            return Err(Error::DimensionMismatch(format!(
                "loss argument has length {}, observations have length {}",
                w.len(),
                y.len()
            )));
        }
        self.check_labels(y)
    }

    pub fn value(self, y: &[f64], w: &[f64]) -> Result<f64> {
        self.check(y, w)?;
        Ok(self.value_unchecked(y, w))
    }

    pub fn gradient(self, y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        self.check(y, w)?;
        Ok(y.iter().zip(w).map(|(&yj, &wj)| self.grad_coord(yj, wj)).collect())
    }

    /// `f*(u) = sup_w ⟨u, w⟩ − f(w)`; `+∞` outside the domain.
    pub fn conjugate(self, y: &[f64], u: &[f64]) -> Result<f64> {
        if y.len() != u.len() {
            return Err(Error::DimensionMismatch(format!(
                "conjugate argument has length {}, observations have length {}",
                u.len(),
                y.len()
            )));
        }
        self.check_labels(y)?;
        Ok(self.conjugate_unchecked(y, u))
    }

    pub(crate) fn value_unchecked(self, y: &[f64], w: &[f64]) -> f64 {
        y.iter().zip(w).map(|(&yj, &wj)| self.value_coord(yj, wj)).sum()
    }

    pub(crate) fn conjugate_unchecked(self, y: &[f64], u: &[f64]) -> f64 {
        y.iter().zip(u).map(|(&yj, &uj)| self.conj_coord(yj, uj)).sum()
    }

    /// `f*(−u)`, the term entering the dual objective.
    pub(crate) fn conjugate_neg_unchecked(self, y: &[f64], u: &[f64]) -> f64 {
        y.iter().zip(u).map(|(&yj, &uj)| self.conj_coord(yj, -uj)).sum()
    }

    #[inline]
    pub(crate) fn value_coord(self, y: f64, w: f64) -> f64 {
        match self {
            LossKind::LeastSquares => 0.5 * (y - w) * (y - w),
            LossKind::Logistic => softplus(-y * w),
            LossKind::SquaredHinge => {
                let r = (1.0 - y * w).max(0.0);
                r * r
            }
        }
    }

    #[inline]
    pub(crate) fn grad_coord(self, y: f64, w: f64) -> f64 {
        match self {
            LossKind::LeastSquares => w - y,
            LossKind::Logistic => -y * sigmoid(-y * w),
            LossKind::SquaredHinge => -2.0 * y * (1.0 - y * w).max(0.0),
        }
    }

    #[inline]
    pub(crate) fn conj_coord(self, y: f64, u: f64) -> f64 {
        match self {
            LossKind::LeastSquares => u * y + 0.5 * u * u,
            LossKind::Logistic => {
                let q = -u * y;
                if !(0.0..=1.0).contains(&q) {
                    f64::INFINITY
                } else {
                    xlogx(q) + xlogx(1.0 - q)
                }
            }
            LossKind::SquaredHinge => {
                let s = u * y;
                if s > 0.0 {
                    f64::INFINITY
                } else {
                    s + 0.25 * s * s
                }
            }
        }
    }
}

#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn xlogx(q: f64) -> f64 {
    if q <= 0.0 {
        0.0
    } else {
        q * q.ln()
    }
}
