//! Penalty calculus: `h`, its conjugate, the node-restricted conjugate and
//! biconjugate of `g = λ‖·‖₀ + Σ h`, per-coordinate proximal operators and
//! the pivot functions that drive simultaneous pruning.
//!
//! Every penalty is a box `|x| ≤ M` plus an optional `α|x|` or `αx²` term, so
//! `h(0) = 0`, `h ≥ 0` and `h*` is finite everywhere.

use serde::{Deserialize, Serialize};

/// Role of a coordinate inside a branch-and-bound node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexClass {
    /// Forced to zero.
    Zero,
    /// Forced to be nonzero.
    One,
    /// Not yet decided.
    Free,
}

impl IndexClass {
    pub fn symbol(self) -> char {
        match self {
            IndexClass::Zero => '0',
            IndexClass::One => '1',
            IndexClass::Free => '•',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PenaltyKind {
    /// `η(|x| ≤ M)`
    BigM { big_m: f64 },
    /// `α|x| + η(|x| ≤ M)`
    BigML1 { big_m: f64, alpha: f64 },
    /// `αx² + η(|x| ≤ M)`
    BigML2 { big_m: f64, alpha: f64 },
}

/// Shape of the free-class biconjugate on `[0, M]`.
enum FreeShape {
    /// `k|x|`
    Linear { slope: f64 },
    /// `c|x|` up to `r`, then `αx² + λ`.
    Curved { r: f64, c: f64, alpha: f64 },
}

impl PenaltyKind {
    pub fn big_m(&self) -> f64 {
        match *self {
            PenaltyKind::BigM { big_m }
            | PenaltyKind::BigML1 { big_m, .. }
            | PenaltyKind::BigML2 { big_m, .. } => big_m,
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            PenaltyKind::BigM { .. } => 0.0,
            PenaltyKind::BigML1 { alpha, .. } | PenaltyKind::BigML2 { alpha, .. } => alpha,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PenaltyKind::BigM { .. } => "bigm",
            PenaltyKind::BigML1 { .. } => "bigml1",
            PenaltyKind::BigML2 { .. } => "bigml2",
        }
    }

    /// `h(x)`; `+∞` outside the box.
    pub fn value(&self, x: f64) -> f64 {
        if x.abs() > self.big_m() {
            return f64::INFINITY;
        }
        match *self {
            PenaltyKind::BigM { .. } => 0.0,
            PenaltyKind::BigML1 { alpha, .. } => alpha * x.abs(),
            PenaltyKind::BigML2 { alpha, .. } => alpha * x * x,
        }
    }

    /// `h*(v)`.
    pub fn conjugate(&self, v: f64) -> f64 {
        let a = v.abs();
        match *self {
            PenaltyKind::BigM { big_m } => big_m * a,
            PenaltyKind::BigML1 { big_m, alpha } => big_m * (a - alpha).max(0.0),
            PenaltyKind::BigML2 { big_m, alpha } => {
                if alpha <= 0.0 || a > 2.0 * alpha * big_m {
                    big_m * a - alpha * big_m * big_m
                } else {
                    a * a / (4.0 * alpha)
                }
            }
        }
    }

    /// Coordinate-wise conjugate of the node-restricted regularizer.
    pub fn node_conjugate(&self, lambda: f64, class: IndexClass, v: f64) -> f64 {
        match class {
            IndexClass::Zero => 0.0,
            IndexClass::One => self.conjugate(v) - lambda,
            IndexClass::Free => (self.conjugate(v) - lambda).max(0.0),
        }
    }

    /// `[h*(v) − λ]₊`
    pub fn pivot0(&self, lambda: f64, v: f64) -> f64 {
        (self.conjugate(v) - lambda).max(0.0)
    }

    /// `[λ − h*(v)]₊`
    pub fn pivot1(&self, lambda: f64, v: f64) -> f64 {
        (lambda - self.conjugate(v)).max(0.0)
    }

    fn free_shape(&self, lambda: f64) -> FreeShape {
        match *self {
            PenaltyKind::BigM { big_m } => FreeShape::Linear {
                slope: lambda / big_m,
            },
            PenaltyKind::BigML1 { big_m, alpha } => FreeShape::Linear {
                slope: alpha + lambda / big_m,
            },
            PenaltyKind::BigML2 { big_m, alpha } => {
                if alpha > 0.0 && big_m > (lambda / alpha).sqrt() {
                    FreeShape::Curved {
                        r: (lambda / alpha).sqrt(),
                        c: 2.0 * (lambda * alpha).sqrt(),
                        alpha,
                    }
                } else {
                    FreeShape::Linear {
                        slope: alpha * big_m + lambda / big_m,
                    }
                }
            }
        }
    }

    /// Coordinate-wise biconjugate of the node-restricted regularizer, i.e.
    /// the convex surrogate used in the node relaxation.
    pub fn node_biconjugate(&self, lambda: f64, class: IndexClass, x: f64) -> f64 {
        match class {
            IndexClass::Zero => {
                if x == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            IndexClass::One => self.value(x) + lambda,
            IndexClass::Free => {
                let a = x.abs();
                if a > self.big_m() {
                    return f64::INFINITY;
                }
                match self.free_shape(lambda) {
                    FreeShape::Linear { slope } => slope * a,
                    FreeShape::Curved { r, c, alpha } => {
                        if a <= r {
                            c * a
                        } else {
                            alpha * a * a + lambda
                        }
                    }
                }
            }
        }
    }

    /// `argmin_x ½(x − t)² + step·ĝ(x)` for the node biconjugate `ĝ` of `class`.
    pub fn node_prox(&self, lambda: f64, class: IndexClass, step: f64, t: f64) -> f64 {
        let m = self.big_m();
        match class {
            IndexClass::Zero => 0.0,
            IndexClass::One => {
                let z = match *self {
                    PenaltyKind::BigM { .. } => t,
                    PenaltyKind::BigML1 { alpha, .. } => soft_threshold(t, step * alpha),
                    PenaltyKind::BigML2 { alpha, .. } => t / (1.0 + 2.0 * step * alpha),
                };
                z.clamp(-m, m)
            }
            IndexClass::Free => match self.free_shape(lambda) {
                FreeShape::Linear { slope } => soft_threshold(t, step * slope).clamp(-m, m),
                FreeShape::Curved { r, c, alpha } => {
                    let a = t.abs();
                    let z = if a <= step * c {
                        return 0.0;
                    } else if a <= r + step * c {
                        a - step * c
                    } else {
                        (a / (1.0 + 2.0 * step * alpha)).min(m)
                    };
                    z.copysign(t)
                }
            },
        }
    }

    /// Subdifferential `[lo, hi]` of the node biconjugate at `x` (assumed
    /// inside its domain). Unbounded ends are `±∞`.
    pub fn node_subdifferential(&self, lambda: f64, class: IndexClass, x: f64) -> (f64, f64) {
        let m = self.big_m();
        // (kink slope at 0, quadratic coefficient) of the piece containing x
        let (k, q) = match class {
            IndexClass::Zero => return (f64::NEG_INFINITY, f64::INFINITY),
            IndexClass::One => match *self {
                PenaltyKind::BigM { .. } => (0.0, 0.0),
                PenaltyKind::BigML1 { alpha, .. } => (alpha, 0.0),
                PenaltyKind::BigML2 { alpha, .. } => (0.0, alpha),
            },
            IndexClass::Free => match self.free_shape(lambda) {
                FreeShape::Linear { slope } => (slope, 0.0),
                FreeShape::Curved { r, c, alpha } => {
                    if x.abs() <= r {
                        (c, 0.0)
                    } else {
                        (0.0, alpha)
                    }
                }
            },
        };
        let (mut lo, mut hi) = if x == 0.0 {
            (-k, k)
        } else {
            let d = k * x.signum() + 2.0 * q * x;
            (d, d)
        };
        if x >= m {
            hi = f64::INFINITY;
        }
        if x <= -m {
            lo = f64::NEG_INFINITY;
        }
        (lo, hi)
    }
}

#[inline]
pub fn soft_threshold(t: f64, thr: f64) -> f64 {
    if t > thr {
        t - thr
    } else if t < -thr {
        t + thr
    } else {
        0.0
    }
}
