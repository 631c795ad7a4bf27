//! Dense complex linear algebra for a family of structured 2x2 block
//! operator matrices.
//!
//! The crate computes absolute values `|Q| = (Q*Q)^{1/2}`, positive and
//! negative parts, and support projections of block matrices of the form
//!
//! ```text
//!     [ lambda*I   B    ]
//!     [   B*     mu*I   ]
//! ```
//!
//! through closed formulas built from functions of `BB*` and `B*B`, and
//! checks every structured result against brute-force spectral oracles.
//! On top of that sits a calculus for idempotents `E` and symmetries `J`
//! (`J = J* = J^{-1}`): deciding when `E` is a J-projection, finding the
//! minimal symmetry with `JE >= 0`, and splitting `E` into J-positive and
//! J-negative idempotent summands.
//!
//! Modules:
//! - [`matrix`]: validated dense complex matrix types.
//! - [`linalg`]: eigendecomposition kernel, square roots, polar factors,
//!   spectral splits, and the brute-force oracles.
//! - [`absval`]: closed-form absolute values of the block family above.
//! - [`suppproj`]: positive/negative parts and their support projections.
//! - [`krein`]: J-projection calculus for idempotents.
//! - [`testgen`]: seeded generators for matrices, idempotents and
//!   admissible symmetry pairs.

pub mod absval;
pub mod error;
pub mod krein;
pub mod linalg;
pub mod matrix;
pub mod suppproj;
pub mod testgen;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, HermitianMatrix, C64};
pub use tol::Tolerance;
