//! Idempotents as projections in an indefinite inner product.
//!
//! A symmetry `J` (Hermitian, `J² = I`) turns `C^n` into a Krein space
//! with product `[x, y] = <Jx, y>`. An idempotent `E` is a J-projection
//! when `E = J E* J`, and J-positive when `JE >= 0` in the usual
//! Loewner order. Everything here runs through the canonical reduction
//! `E = W [[I, E1], [0, 0]] W*` with unitary `W`: symmetries making `E`
//! a J-projection correspond to pairs `(J1, J2)` with
//! `J1 E1 = -E1 J2`, positivity of `JE` is an order relation against a
//! minimal symmetry, and the J-positive/J-negative parts of `E` split
//! off the spectral projections of the compressed symmetry.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    check_orthonormal_cols, herm_eig, herm_rank, loewner_geq, min_eigenvalue,
    orthonormal_complement,
};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::suppproj::support_pos_part_esum;
use crate::tol::Tolerance;

/// A validated idempotent: square with `E² = E` within tolerance.
#[derive(Debug, Clone)]
pub struct Idempotent {
    m: ComplexMatrix,
}

impl Idempotent {
    pub fn new(m: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch {
                expected: "square matrix".into(),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        let dm = m.as_dmatrix();
        let residual = (dm * dm - dm).norm();
        let scale = 1.0 + dm.norm() * dm.norm();
        if residual > tol.compare_tol * scale {
            return Err(Error::NotIdempotent { residual });
        }
        Ok(Idempotent { m })
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
}

/// A validated symmetry: Hermitian with `J² = I`.
#[derive(Debug, Clone)]
pub struct SymmetryMatrix {
    m: HermitianMatrix,
}

impl SymmetryMatrix {
    pub fn new(m: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let h = HermitianMatrix::new(m, tol)?;
        let n = h.dim();
        let dm = h.as_dmatrix();
        let residual = (dm * dm - DMatrix::<C64>::identity(n, n)).norm();
        if residual > tol.compare_tol * (1.0 + (n as f64).sqrt()) {
            return Err(Error::NotSymmetry { residual });
        }
        Ok(SymmetryMatrix { m: h })
    }

    pub fn identity(n: usize) -> Self {
        SymmetryMatrix {
            m: HermitianMatrix::identity(n),
        }
    }

    /// Diagonal symmetry from a sign pattern.
    pub fn from_signs(signs: &[f64]) -> Result<Self> {
        if signs.iter().any(|s| s.abs() != 1.0) {
            return Err(Error::Precondition {
                what: "sign pattern entries must be +1 or -1".into(),
            });
        }
        Ok(SymmetryMatrix {
            m: HermitianMatrix::from_diagonal(signs),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.m
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.m.matrix()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        self.m.as_dmatrix()
    }
}

/// Canonical reduction of an idempotent: `E = W [[I, E1], [0, 0]] W*`
/// with `W` unitary. The first `rank` columns of `W` span `range(E)`.
#[derive(Debug, Clone)]
pub struct CanonicalIdempotent {
    w: ComplexMatrix,
    e1: ComplexMatrix,
    rank: usize,
}

impl CanonicalIdempotent {
    /// Builds the form from an explicit unitary and coupling block.
    pub fn from_parts(w: ComplexMatrix, e1: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !w.is_square() || w.rows() != e1.rows() + e1.cols() {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n} unitary for an {r}x{s} coupling block",
                    n = e1.rows() + e1.cols(), r = e1.rows(), s = e1.cols()),
                got: format!("{}x{}", w.rows(), w.cols()),
            });
        }
        check_orthonormal_cols(w.as_dmatrix(), tol)?;
        let rank = e1.rows();
        Ok(CanonicalIdempotent { w, e1, rank })
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn e1(&self) -> &ComplexMatrix {
        &self.e1
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    /// Reassembles the idempotent `W [[I, E1], [0, 0]] W*`.
    pub fn assemble(&self, tol: &Tolerance) -> Result<Idempotent> {
        let wdm = self.w.as_dmatrix();
        let canon = self.canonical_matrix();
        Idempotent::new(
            ComplexMatrix::from_dmatrix(wdm * canon * wdm.adjoint())?,
            tol,
        )
    }

    fn canonical_matrix(&self) -> DMatrix<C64> {
        let (n, r) = (self.dim(), self.rank);
        let mut canon = DMatrix::zeros(n, n);
        canon
            .view_mut((0, 0), (r, r))
            .copy_from(&DMatrix::identity(r, r));
        canon
            .view_mut((0, r), (r, n - r))
            .copy_from(self.e1.as_dmatrix());
        canon
    }
}

/// Computes the canonical reduction of an idempotent.
///
/// The unitary comes from the eigenbasis of `EE*`, whose spectrum for
/// an idempotent consists of zeros and values at least 1; eigenvalues
/// caught between the rank cutoff and 1/2 mean the input is too far
/// from an idempotent to classify and raise `RankInstability`.
pub fn canonical_form(e: &Idempotent, tol: &Tolerance) -> Result<CanonicalIdempotent> {
    let n = e.dim();
    let edm = e.as_dmatrix();
    if n == 0 {
        return CanonicalIdempotent::from_parts(
            ComplexMatrix::zeros(0, 0),
            ComplexMatrix::zeros(0, 0),
            tol,
        );
    }
    let eig = herm_eig(&HermitianMatrix::symmetrized(edm * edm.adjoint()))?;
    let cutoff = tol.rank_tol * eig.max_eigenvalue().max(1.0);
    let mut range_side = vec![];
    let mut null_side = vec![];
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l >= 0.5 {
            range_side.push(i);
        } else if l < cutoff {
            null_side.push(i);
        } else {
            return Err(Error::RankInstability {
                detail: format!(
                    "eigenvalue {l:.3e} of E E* sits between the rank cutoff {cutoff:.3e} and 1/2"
                ),
            });
        }
    }
    range_side.reverse();
    let vecs = eig.vectors.as_dmatrix();
    let mut w = DMatrix::zeros(n, n);
    for (j, &i) in range_side.iter().chain(null_side.iter()).enumerate() {
        w.set_column(j, &vecs.column(i));
    }
    let r = range_side.len();
    let e1 = w.columns(0, r).adjoint() * edm * w.columns(r, n - r);
    let c = CanonicalIdempotent {
        w: ComplexMatrix::from_dmatrix(w)?,
        e1: ComplexMatrix::from_dmatrix(e1)?,
        rank: r,
    };
    let wdm = c.w.as_dmatrix();
    let residual = (wdm.adjoint() * edm * wdm - c.canonical_matrix()).norm();
    if residual > tol.compare_tol * (1.0 + edm.norm()) {
        return Err(Error::RankInstability {
            detail: format!("canonical reduction residual {residual:.3e}"),
        });
    }
    Ok(c)
}

/// Assembles the symmetry determined by a pair `(J1, J2)` with
/// `J1 E1 = -E1 J2`:
/// `J = W [[J1 C, J1 C E1], [E1* C J1, J2 D]] W*` with
/// `C = (I + E1 E1*)^{-1/2}` and `D = (I + E1* E1)^{-1/2}`.
/// Every symmetry making the idempotent a J-projection arises this way.
pub fn build_symmetry(
    c: &CanonicalIdempotent,
    j1: &SymmetryMatrix,
    j2: &SymmetryMatrix,
    tol: &Tolerance,
) -> Result<SymmetryMatrix> {
    let (r, n) = (c.rank(), c.dim());
    let s = n - r;
    if j1.dim() != r || j2.dim() != s {
        return Err(Error::ShapeMismatch {
            expected: format!("{r}x{r} and {s}x{s} symmetries"),
            got: format!("{0}x{0} and {1}x{1}", j1.dim(), j2.dim()),
        });
    }
    let e1 = c.e1().as_dmatrix();
    let residual = (j1.as_dmatrix() * e1 + e1 * j2.as_dmatrix()).norm();
    if residual > tol.compare_tol * (1.0 + e1.norm()) {
        return Err(Error::InvalidPair { residual });
    }
    let cee = HermitianMatrix::symmetrized(DMatrix::identity(r, r) + e1 * e1.adjoint());
    let c_half = herm_eig(&cee)?.apply_fn(|l| 1.0 / l.sqrt());
    let dee = HermitianMatrix::symmetrized(DMatrix::identity(s, s) + e1.adjoint() * e1);
    let d_half = herm_eig(&dee)?.apply_fn(|l| 1.0 / l.sqrt());
    let j1c = j1.as_dmatrix() * c_half.as_dmatrix();
    let top_right = &j1c * e1;
    let mut j_canon = DMatrix::zeros(n, n);
    j_canon.view_mut((0, 0), (r, r)).copy_from(&j1c);
    j_canon.view_mut((0, r), (r, s)).copy_from(&top_right);
    j_canon
        .view_mut((r, 0), (s, r))
        .copy_from(&top_right.adjoint());
    j_canon
        .view_mut((r, r), (s, s))
        .copy_from(&(j2.as_dmatrix() * d_half.as_dmatrix()));
    let wdm = c.w().as_dmatrix();
    SymmetryMatrix::new(
        ComplexMatrix::from_dmatrix(wdm * j_canon * wdm.adjoint())?,
        tol,
    )
}

/// Whether `E = J E* J` within tolerance.
pub fn is_j_projection(e: &Idempotent, j: &SymmetryMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(j_projection_residual(e, j)? <= tol.compare_tol * (1.0 + e.as_dmatrix().norm()))
}

fn j_projection_residual(e: &Idempotent, j: &SymmetryMatrix) -> Result<f64> {
    if e.dim() != j.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", e.dim()),
            got: format!("{0}x{0}", j.dim()),
        });
    }
    let edm = e.as_dmatrix();
    let jdm = j.as_dmatrix();
    Ok((edm - jdm * edm.adjoint() * jdm).norm())
}

fn require_j_projection(e: &Idempotent, j: &SymmetryMatrix, tol: &Tolerance) -> Result<()> {
    let residual = j_projection_residual(e, j)?;
    if residual > tol.compare_tol * (1.0 + e.as_dmatrix().norm()) {
        return Err(Error::NotJProjection { residual });
    }
    Ok(())
}

/// The minimal symmetry making the idempotent a positive J-projection:
/// `J_min = W (2 P - I) W*` where `P` is the support projection of the
/// positive part of `[[2I, E1], [E1*, 0]]`. Among all symmetries `J`
/// with `E = J E* J` and `JE >= 0`, this one satisfies `J >= J_min`.
pub fn min_symmetry(e: &Idempotent, tol: &Tolerance) -> Result<SymmetryMatrix> {
    let c = canonical_form(e, tol)?;
    min_symmetry_of_canonical(&c, tol)
}

fn min_symmetry_of_canonical(
    c: &CanonicalIdempotent,
    tol: &Tolerance,
) -> Result<SymmetryMatrix> {
    let n = c.dim();
    let p = support_pos_part_esum(c.e1(), tol)?;
    let refl = p.as_dmatrix() * C64::new(2.0, 0.0) - DMatrix::<C64>::identity(n, n);
    let wdm = c.w().as_dmatrix();
    SymmetryMatrix::new(ComplexMatrix::from_dmatrix(wdm * refl * wdm.adjoint())?, tol)
}

/// Whether `JE` is positive semidefinite (Hermitian within tolerance
/// and with smallest eigenvalue above the negative slack).
pub fn is_j_positive(e: &Idempotent, j: &SymmetryMatrix, tol: &Tolerance) -> Result<bool> {
    if e.dim() != j.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", e.dim()),
            got: format!("{0}x{0}", j.dim()),
        });
    }
    let m = j.as_dmatrix() * e.as_dmatrix();
    let asym = (&m - m.adjoint()).norm();
    if asym > tol.compare_tol * (1.0 + m.norm()) {
        return Ok(false);
    }
    let sym = HermitianMatrix::symmetrized((&m + m.adjoint()) * C64::new(0.5, 0.0));
    Ok(min_eigenvalue(&sym)? >= -tol.psd_tol)
}

/// For a J-projection, evaluates both sides of the order criterion:
/// `JE >= 0` on the left, `J >= J_min(E)` on the right. The two
/// booleans agree for exact inputs.
pub fn positivity_vs_loewner(
    e: &Idempotent,
    j: &SymmetryMatrix,
    tol: &Tolerance,
) -> Result<(bool, bool)> {
    require_j_projection(e, j, tol)?;
    let positive = is_j_positive(e, j, tol)?;
    let jmin = min_symmetry(e, tol)?;
    let dominates = loewner_geq(j.hermitian(), jmin.hermitian(), tol)?;
    Ok((positive, dominates))
}

/// For a J-projection, evaluates both sides of the range criterion:
/// `JE >= 0` on the left; on the right, `(I+J) E (I+J) >= 0` together
/// with `range(E)` meeting the negative eigenspace of `J` trivially.
/// The two booleans agree for exact inputs.
pub fn positivity_vs_range(
    e: &Idempotent,
    j: &SymmetryMatrix,
    tol: &Tolerance,
) -> Result<(bool, bool)> {
    require_j_projection(e, j, tol)?;
    let positive = is_j_positive(e, j, tol)?;

    let n = e.dim();
    let plus = j.as_dmatrix() + DMatrix::<C64>::identity(n, n);
    let compressed = HermitianMatrix::symmetrized(&plus * e.as_dmatrix() * &plus);
    let compressed_psd = min_eigenvalue(&compressed)? >= -tol.psd_tol;

    let c = canonical_form(e, tol)?;
    let r = c.rank();
    let range_basis = c.w().as_dmatrix().columns(0, r).into_owned();
    let jeig = herm_eig(j.hermitian())?;
    let neg: Vec<usize> = (0..n).filter(|&i| jeig.eigenvalues[i] < 0.0).collect();
    let k = neg.len();
    let trivial_meet = if r + k > n {
        false
    } else {
        let jvecs = jeig.vectors.as_dmatrix();
        let mut stacked = DMatrix::zeros(n, r + k);
        stacked.view_mut((0, 0), (n, r)).copy_from(&range_basis);
        for (o, &i) in neg.iter().enumerate() {
            stacked.set_column(r + o, &jvecs.column(i));
        }
        let gram = HermitianMatrix::symmetrized(stacked.adjoint() * &stacked);
        herm_rank(&gram, tol)? == r + k
    };
    Ok((positive, compressed_psd && trivial_meet))
}

/// The J-projection with a prescribed range, when it exists.
///
/// `m_basis` holds orthonormal columns spanning the target subspace.
/// The projection exists precisely when the compression of `J` to the
/// subspace is invertible; otherwise `NoJProjection` is raised.
pub fn projection_from_subspace(
    m_basis: &ComplexMatrix,
    j: &SymmetryMatrix,
    tol: &Tolerance,
) -> Result<Idempotent> {
    let n = j.dim();
    let mdm = m_basis.as_dmatrix();
    if mdm.nrows() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{n} rows"),
            got: format!("{}x{}", mdm.nrows(), mdm.ncols()),
        });
    }
    let k = mdm.ncols();
    if k == 0 || k >= n {
        return Err(Error::Precondition {
            what: "subspace must be proper and nonzero".into(),
        });
    }
    check_orthonormal_cols(mdm, tol)?;
    let m_perp = orthonormal_complement(mdm, n)?;
    let jdm = j.as_dmatrix();
    let q11 = HermitianMatrix::symmetrized(mdm.adjoint() * jdm * mdm);
    let eig = herm_eig(&q11)?;
    if eig.eigenvalues.iter().any(|l| l.abs() <= tol.rank_tol) {
        return Err(Error::NoJProjection);
    }
    let q11_inv = eig.apply_fn(|l| 1.0 / l);
    let q12 = mdm.adjoint() * jdm * &m_perp;
    let coupling = q11_inv.as_dmatrix() * q12;
    let mut w = DMatrix::zeros(n, n);
    w.view_mut((0, 0), (n, k)).copy_from(mdm);
    w.view_mut((0, k), (n, n - k)).copy_from(&m_perp);
    let c = CanonicalIdempotent {
        w: ComplexMatrix::from_dmatrix(w)?,
        e1: ComplexMatrix::from_dmatrix(coupling)?,
        rank: k,
    };
    c.assemble(tol)
}

/// Extracts the symmetry pair of a J-projection in the coordinates of
/// a canonical reduction: `J1 = sign(Q11)` and `J2 = sign(Q22)` for the
/// diagonal blocks of `W* J W`. Feeding the pair back into
/// `build_symmetry` recovers `J`.
pub fn symmetry_components(
    c: &CanonicalIdempotent,
    j: &SymmetryMatrix,
    tol: &Tolerance,
) -> Result<(SymmetryMatrix, SymmetryMatrix)> {
    let n = c.dim();
    if j.dim() != n {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0}", n),
            got: format!("{0}x{0}", j.dim()),
        });
    }
    let r = c.rank();
    let wdm = c.w().as_dmatrix();
    let j_canon = wdm.adjoint() * j.as_dmatrix() * wdm;
    let q11 = HermitianMatrix::symmetrized(j_canon.view((0, 0), (r, r)).into_owned());
    let q22 = HermitianMatrix::symmetrized(j_canon.view((r, r), (n - r, n - r)).into_owned());
    let j1 = SymmetryMatrix::new(sign_function(&q11, tol)?.into_matrix(), tol)?;
    let j2 = SymmetryMatrix::new(sign_function(&q22, tol)?.into_matrix(), tol)?;
    Ok((j1, j2))
}

/// Splits a J-projection into its J-positive and J-negative parts:
/// `E = Q + R` with `QR = RQ = 0`, `JQ >= 0`, `JR <= 0`, both again
/// J-projections. In canonical coordinates `Q` and `R` come from the
/// spectral sign projections of the compressed symmetry block.
pub fn decompose_pos_neg(
    e: &Idempotent,
    j: &SymmetryMatrix,
    tol: &Tolerance,
) -> Result<(Idempotent, Idempotent)> {
    require_j_projection(e, j, tol)?;
    let c = canonical_form(e, tol)?;
    let (r, n) = (c.rank(), c.dim());
    let wdm = c.w().as_dmatrix();
    let j_canon = wdm.adjoint() * j.as_dmatrix() * wdm;
    let q11 = HermitianMatrix::symmetrized(j_canon.view((0, 0), (r, r)).into_owned());
    let j1 = sign_function(&q11, tol)?;
    let e1 = c.e1().as_dmatrix();
    let half = C64::new(0.5, 0.0);
    let pos_proj = (DMatrix::identity(r, r) + j1.as_dmatrix()) * half;
    let neg_proj = (DMatrix::identity(r, r) - j1.as_dmatrix()) * half;
    let embed = |p: &DMatrix<C64>| -> Result<Idempotent> {
        let mut canon = DMatrix::zeros(n, n);
        canon.view_mut((0, 0), (r, r)).copy_from(p);
        canon.view_mut((0, r), (r, n - r)).copy_from(&(p * e1));
        Idempotent::new(
            ComplexMatrix::from_dmatrix(wdm * canon * wdm.adjoint())?,
            tol,
        )
    };
    Ok((embed(&pos_proj)?, embed(&neg_proj)?))
}

/// Spectral sign of an invertible Hermitian matrix. Eigenvalues inside
/// the rank cutoff have no stable sign and raise `RankInstability`.
fn sign_function(h: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let eig = herm_eig(h)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &l| a.max(l.abs()))
        .max(1.0);
    if let Some(l) = eig.eigenvalues.iter().find(|l| l.abs() <= tol.rank_tol * scale) {
        return Err(Error::RankInstability {
            detail: format!("eigenvalue {l:.3e} has no stable sign"),
        });
    }
    Ok(eig.apply_fn(|l| if l > 0.0 { 1.0 } else { -1.0 }))
}
