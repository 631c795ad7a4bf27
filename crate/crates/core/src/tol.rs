//! Tolerance policy used across the crate.
//!
//! Every approximate comparison goes through this module so the
//! conventions live in one place:
//!
//! - matrix closeness is measured in Frobenius norm, relative to the
//!   reference: `‖X − Y‖_F ≤ tol · (1 + ‖Y‖_F)`;
//! - rank decisions threshold the spectrum of the positive semidefinite
//!   matrix at hand relative to its largest eigenvalue (for `B B*` that
//!   largest eigenvalue is the squared largest singular value of `B`);
//! - positive semidefiniteness allows eigenvalues down to `-psd_tol`.

/// Numerical thresholds for validation, rank decisions and comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Allowed relative asymmetry `‖A − A*‖_F / (1 + ‖A‖_F)` when
    /// constructing a Hermitian matrix.
    pub herm_tol: f64,
    /// Relative threshold for rank decisions and spectral-split ties.
    pub rank_tol: f64,
    /// Slack below zero allowed when certifying positive semidefiniteness.
    pub psd_tol: f64,
    /// Relative Frobenius tolerance for matrix equality checks.
    pub compare_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            herm_tol: 1e-10,
            rank_tol: 1e-10,
            psd_tol: 1e-9,
            compare_tol: 1e-8,
        }
    }
}

impl Tolerance {
    /// Default thresholds with `compare_tol` replaced by `tol`.
    pub fn with_compare_tol(tol: f64) -> Self {
        Tolerance {
            compare_tol: tol,
            ..Tolerance::default()
        }
    }
}

/// Relative Frobenius distance `‖X − Y‖_F / (1 + ‖Y‖_F)`.
pub fn rel_fro(x: &nalgebra::DMatrix<crate::matrix::C64>, y: &nalgebra::DMatrix<crate::matrix::C64>) -> f64 {
    (x - y).norm() / (1.0 + y.norm())
}
