//! Variational calculus of convexly generated spectral max functions.
//!
//! A spectral max function is `φ(X) = max { f(λ) : det(λI − X) = 0 }` for a
//! proper, convex, lsc generator `f: ℂ → ℝ ∪ {+∞}`. The crate provides
//! evaluation, regular-subdifferential and recession-cone membership tests on
//! both the polynomial and the matrix side, subderivative formulas, and
//! finite-difference oracles that check those formulas independently.
//!
//! Jordan structure is always declared by the caller through [`JordanSpec`];
//! it is never inferred from a raw defective matrix.

pub mod complex_poly;
pub mod error;
pub mod factorization;
pub mod generators;
pub mod json;
pub mod linalg;
pub mod matrix_jordan;
pub mod oracles;
pub mod poly_subdiff;
pub mod spec_subdiff;
pub mod stabilize;

pub use complex_poly::{Poly, RootCluster, C64};
pub use error::{Error, Result};
pub use generators::{Builtin, Condition, ConvexSet2D, Generator};
pub use linalg::CMatrix;
pub use matrix_jordan::{EigenBlocks, JordanSpec};
pub use spec_subdiff::{MembershipReport, Tolerances};
