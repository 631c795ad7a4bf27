//! Validated dense complex matrices.
//!
//! Two wrappers around `nalgebra::DMatrix<Complex<f64>>`:
//! [`ComplexMatrix`] guarantees every entry is finite, and
//! [`HermitianMatrix`] additionally guarantees exact Hermitian symmetry
//! (inputs within `herm_tol` of Hermitian are symmetrized on
//! construction, anything worse is rejected).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tol::Tolerance;

pub type C64 = nalgebra::Complex<f64>;

/// Dense complex matrix with finite entries. Entries are exposed in
/// row-major order to callers; storage is delegated to `nalgebra`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds from row-major entries. Fails if `entries.len() != rows*cols`
    /// or any entry is non-finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries for a {}x{} matrix", rows * cols, rows, cols),
                got: format!("{}", entries.len()),
            });
        }
        let m = DMatrix::from_row_iterator(rows, cols, entries.into_iter());
        Self::from_dmatrix(m)
    }

    /// Wraps an existing matrix, validating finiteness.
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(ComplexMatrix { m })
    }

    /// Real row-major entries, zero imaginary parts. Test convenience.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            m: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.m.nrows() == self.m.ncols()
    }

    pub fn at(&self, row: usize, col: usize) -> C64 {
        self.m[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn entries_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.m.nrows() * self.m.ncols());
        for i in 0..self.m.nrows() {
            for j in 0..self.m.ncols() {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix {
            m: self.m.adjoint(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }
}

/// Square complex matrix with `A = A*` holding exactly.
///
/// Construction symmetrizes `(A + A*)/2` after checking that the
/// relative asymmetry is within `herm_tol`; the stored matrix therefore
/// satisfies the invariant to machine precision.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch {
                expected: "square matrix".into(),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        let dm = m.as_dmatrix();
        let asym = (dm - dm.adjoint()).norm() / (1.0 + dm.norm());
        if asym > tol.herm_tol {
            return Err(Error::NotHermitian {
                asym,
                tol: tol.herm_tol,
            });
        }
        Ok(Self::symmetrized(m.into_dmatrix()))
    }

    /// Takes the Hermitian part `(A + A*)/2` without an asymmetry check.
    /// For results that are Hermitian by construction up to rounding;
    /// use `new` when the input needs validation.
    pub fn symmetrized(dm: DMatrix<C64>) -> Self {
        let sym = (&dm + dm.adjoint()) * C64::new(0.5, 0.0);
        HermitianMatrix {
            m: ComplexMatrix { m: sym },
        }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        HermitianMatrix {
            m: ComplexMatrix { m },
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            m: ComplexMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            m: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        self.m.as_dmatrix()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }
}
