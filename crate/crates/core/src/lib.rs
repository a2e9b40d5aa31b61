//! Exact solver for `min_x f(Ax) + λ‖x‖₀ + Σᵢ h(xᵢ)` by depth-first
//! branch-and-bound, with dual bounds that test every direct successor of a
//! node at once.
//!
//! ```
//! use l0prune::{bnb, DenseMatrix, LossKind, PenaltyKind, ProblemInstance};
//!
//! let a = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
//! let inst = ProblemInstance::new(a, vec![1.0], LossKind::LeastSquares,
//!     PenaltyKind::BigM { big_m: 10.0 }, 0.1).unwrap();
//! let report = bnb::solve(&inst, &bnb::SolverConfig::default(), None).unwrap();
//! assert_eq!(report.support, vec![0]);
//! ```

pub mod bench;
pub mod bnb;
pub mod data;
pub mod dual;
pub mod error;
pub mod loss;
pub mod matrix;
pub mod node;
pub mod oracle;
pub mod path;
pub mod penalty;
pub mod problem;
pub mod relax;
pub mod trace;

pub use bnb::{solve, SolveReport, SolveStatus, SolverConfig};
pub use error::{Error, Result};
pub use loss::LossKind;
pub use matrix::DenseMatrix;
pub use node::Node;
pub use penalty::{IndexClass, PenaltyKind};
pub use problem::{ProblemInstance, Violation};
