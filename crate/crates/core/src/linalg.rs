//! Eigendecomposition kernel and brute-force spectral oracles.
//!
//! Everything structured in this crate is cross-checked against the
//! functions here: `|A|`, positive/negative parts and support
//! projections computed directly from a Hermitian eigendecomposition,
//! and polar partial isometries computed from the spectrum of `B B*`.
//! Rank decisions threshold the spectrum of the positive semidefinite
//! matrix being decomposed, relative to its largest eigenvalue (see
//! [`crate::tol`]).

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::tol::Tolerance;

/// Eigendecomposition of a Hermitian matrix: `A = V diag(l) V*` with
/// real eigenvalues in ascending order and orthonormal columns in `V`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V f(diag(l)) V*` for a real scalar function `f`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let v = self.vectors.as_dmatrix();
        let n = v.nrows();
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = C64::new(f(l), 0.0);
            for i in 0..n {
                scaled[(i, j)] *= fl;
            }
        }
        HermitianMatrix::symmetrized(&scaled * v.adjoint())
    }

    /// Reassembles the original matrix.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.apply_fn(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Partial isometry produced by polar decomposition. `VV*V = V` holds;
/// `rank` is the dimension of the initial space, which can be smaller
/// than either matrix dimension (no unitary completion is performed).
#[derive(Debug, Clone)]
pub struct PartialIsometry {
    matrix: ComplexMatrix,
    rank: usize,
}

impl PartialIsometry {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        self.matrix.as_dmatrix()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

/// Spectral split of a positive semidefinite matrix at a threshold:
/// `basis_low` spans the eigenspaces with eigenvalue at most the
/// threshold (boundary eigenvalues inclusive), `basis_high` the rest.
/// `a1`/`a2` are the compressions of the matrix to those bases, which
/// are diagonal because the bases consist of eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub threshold: f64,
    pub basis_low: ComplexMatrix,
    pub basis_high: ComplexMatrix,
    pub a1: HermitianMatrix,
    pub a2: HermitianMatrix,
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The QR-based kernel is tried first and its output is validated
/// (orthonormal vectors, `V diag(l) V*` reconstructs the input). On some
/// matrices with clustered or near-zero eigenvalues the kernel returns a
/// decomposition that fails reconstruction; those fall back to a cyclic
/// Jacobi solver, which is slower but unconditionally convergent.
pub fn herm_eig(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let adm = a.as_dmatrix();
    let attempt = SymmetricEigen::try_new(adm.clone(), f64::EPSILON, 0)
        .map(|se| (se.eigenvalues.iter().copied().collect::<Vec<f64>>(), se.eigenvectors));
    let (raw_values, raw_vectors) = match attempt {
        Some((vals, vecs)) if decomposition_ok(adm, &vals, &vecs) => (vals, vecs),
        _ => {
            let (vals, vecs) = jacobi_herm_eig(adm);
            if !decomposition_ok(adm, &vals, &vecs) {
                return Err(Error::KernelFailure);
            }
            (vals, vecs)
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw_values[i].total_cmp(&raw_values[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| raw_values[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vectors.set_column(j, &raw_vectors.column(k));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors: ComplexMatrix::from_dmatrix(vectors)?,
    })
}

/// Residual gate for an eigendecomposition candidate: columns of `vecs`
/// orthonormal and `vecs diag(vals) vecs*` equal to `a`, both to roughly
/// a thousand ulps at the scale of the input.
fn decomposition_ok(a: &DMatrix<C64>, vals: &[f64], vecs: &DMatrix<C64>) -> bool {
    let n = a.nrows();
    let gram = (vecs.adjoint() * vecs - DMatrix::<C64>::identity(n, n)).norm();
    if gram > 1e-12 * (1.0 + n as f64) {
        return false;
    }
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= C64::new(l, 0.0);
        }
    }
    let recon = (scaled * vecs.adjoint() - a).norm();
    recon <= 1e-12 * (n as f64) * (1.0 + a.norm())
}

/// Cyclic Jacobi eigensolver for a complex Hermitian matrix. Each
/// rotation zeroes one off-diagonal pair exactly; sweeps repeat until
/// the off-diagonal mass is at rounding level. Deterministic in the
/// input.
fn jacobi_herm_eig(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    let scale = a.norm().max(1.0);
    for _ in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= f64::EPSILON * (n as f64) * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = m[(p, q)];
                let babs = beta.norm();
                if babs <= f64::EPSILON * scale {
                    continue;
                }
                // Unitary plane rotation built from the dephased real
                // 2x2 problem: with w = beta/|beta|, conjugating by
                // diag(1, conj(w)) makes the block real symmetric, then
                // the classic Jacobi angle zeroes the off-diagonal.
                let w = beta / C64::new(babs, 0.0);
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let wc = w.conj();
                // A <- U* A U with U supported on the (p, q) plane:
                // U_pp = c, U_pq = s, U_qp = -s conj(w), U_qq = c conj(w).
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c - akq * (wc * s);
                    m[(k, q)] = akp * s + akq * (wc * c);
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk * c - aqk * (w * s);
                    m[(q, k)] = apk * s + aqk * (w * c);
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * (wc * s);
                    v[(k, q)] = vkp * s + vkq * (wc * c);
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    (vals, v)
}

/// Square root of a positive semidefinite matrix. Eigenvalues in
/// `[-psd_tol, 0)` are clamped to zero; anything lower is rejected.
/// Eigenvalues at rounding level (below `n * eps * l_max`) are floored
/// to exact zero first: they carry no information beyond eigensolver
/// noise, and the square root would amplify that noise from `eps` to
/// `sqrt(eps)` on structurally rank-deficient inputs.
pub fn psd_sqrt(a: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let eig = herm_eig(a)?;
    let min = eig.min_eigenvalue();
    if min < -tol.psd_tol {
        return Err(Error::NotPositive { min_eig: min });
    }
    let floor = eig.max_eigenvalue().max(0.0) * f64::EPSILON * a.dim() as f64;
    Ok(eig.apply_fn(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// `|A| = (A*A)^{1/2}` for Hermitian `A`, computed spectrally.
pub fn abs_oracle(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(herm_eig(a)?.apply_fn(f64::abs))
}

/// Positive part `(|A| + A)/2`, computed spectrally.
pub fn pos_part_oracle(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(herm_eig(a)?.apply_fn(|l| l.max(0.0)))
}

/// Negative part `(|A| - A)/2`, computed spectrally.
pub fn neg_part_oracle(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(herm_eig(a)?.apply_fn(|l| (-l).max(0.0)))
}

/// Orthogonal projection onto the range of a Hermitian matrix: the sum
/// of `v v*` over eigenvectors with `|l| > rank_tol * max|l|`.
pub fn support_projection_oracle(a: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let eig = herm_eig(a)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let cut = tol.rank_tol * scale;
    Ok(eig.apply_fn(|l| if l.abs() > cut { 1.0 } else { 0.0 }))
}

/// Rank of a Hermitian matrix under the same threshold rule as
/// [`support_projection_oracle`].
pub fn herm_rank(a: &HermitianMatrix, tol: &Tolerance) -> Result<usize> {
    let eig = herm_eig(a)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let cut = tol.rank_tol * scale;
    Ok(eig.eigenvalues.iter().filter(|l| l.abs() > cut).count())
}

/// Partial isometry `V` of the polar decomposition `B* = V (B B*)^{1/2}`.
///
/// `V` maps the closure of the range of `B` isometrically onto the
/// closure of the range of `B*` and kills the orthogonal complement, so
/// `V*V` projects onto `range(B)` and `VV*` onto `range(B*)`. The rank
/// is decided on the spectrum of `B B*` relative to its largest
/// eigenvalue.
pub fn polar_partial_isometry(b: &ComplexMatrix, tol: &Tolerance) -> Result<PartialIsometry> {
    let bdm = b.as_dmatrix();
    let bbs = HermitianMatrix::symmetrized(bdm * bdm.adjoint());
    let eig = herm_eig(&bbs)?;
    let scale = eig.max_eigenvalue().max(0.0);
    let cut = tol.rank_tol * scale;
    let rank = eig.eigenvalues.iter().filter(|&&l| l > cut).count();
    let g = eig.apply_fn(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 });
    let v = bdm.adjoint() * g.as_dmatrix();
    Ok(PartialIsometry {
        matrix: ComplexMatrix::from_dmatrix(v)?,
        rank,
    })
}

/// Splits a positive semidefinite matrix at `mu`. Eigenvalues within
/// `mu * (1 + rank_tol) + rank_tol` go to the low side, so boundary
/// eigenvalues land in `basis_low`. Tiny negative eigenvalues (within
/// `psd_tol` of zero) are clamped to zero in the compressions.
pub fn spectral_split(a: &HermitianMatrix, mu: f64, tol: &Tolerance) -> Result<SpectralSplit> {
    let eig = herm_eig(a)?;
    let min = eig.min_eigenvalue();
    if a.dim() > 0 && min < -tol.psd_tol {
        return Err(Error::NotPositive { min_eig: min });
    }
    let cut = mu * (1.0 + tol.rank_tol) + tol.rank_tol;
    let k = eig.eigenvalues.iter().filter(|&&l| l <= cut).count();
    let n = a.dim();
    let v = eig.vectors.as_dmatrix();
    let basis_low = ComplexMatrix::from_dmatrix(v.columns(0, k).into_owned())?;
    let basis_high = ComplexMatrix::from_dmatrix(v.columns(k, n - k).into_owned())?;
    let low: Vec<f64> = eig.eigenvalues[..k].iter().map(|l| l.max(0.0)).collect();
    let high: Vec<f64> = eig.eigenvalues[k..].iter().map(|l| l.max(0.0)).collect();
    Ok(SpectralSplit {
        threshold: mu,
        basis_low,
        basis_high,
        a1: HermitianMatrix::from_diagonal(&low),
        a2: HermitianMatrix::from_diagonal(&high),
    })
}

/// Loewner order test: `A >= B` iff the smallest eigenvalue of `A - B`
/// is at least `-psd_tol`.
pub fn loewner_geq(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", a.dim(), a.dim()),
            got: format!("{}x{}", b.dim(), b.dim()),
        });
    }
    let diff = HermitianMatrix::symmetrized(a.as_dmatrix() - b.as_dmatrix());
    Ok(herm_eig(&diff)?.min_eigenvalue() >= -tol.psd_tol)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(herm_eig(a)?.min_eigenvalue())
}

/// Assembles `[[a, b], [c, d]]` from blocks with consistent shapes.
pub(crate) fn block2x2(
    a: &DMatrix<C64>,
    b: &DMatrix<C64>,
    c: &DMatrix<C64>,
    d: &DMatrix<C64>,
) -> DMatrix<C64> {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(c.nrows(), d.nrows());
    assert_eq!(a.ncols(), c.ncols());
    assert_eq!(b.ncols(), d.ncols());
    let (p, q) = (a.nrows(), a.ncols());
    let (r, s) = (d.nrows(), d.ncols());
    let mut out = DMatrix::zeros(p + r, q + s);
    out.view_mut((0, 0), (p, q)).copy_from(a);
    out.view_mut((0, q), (p, s)).copy_from(b);
    out.view_mut((p, 0), (r, q)).copy_from(c);
    out.view_mut((p, q), (r, s)).copy_from(d);
    out
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// an isometry `u` (an `n x k` matrix with orthonormal columns).
pub(crate) fn orthonormal_complement(u: &DMatrix<C64>, n: usize) -> Result<DMatrix<C64>> {
    let proj = DMatrix::identity(n, n) - u * u.adjoint();
    let eig = herm_eig(&HermitianMatrix::symmetrized(proj))?;
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let v = eig.vectors.as_dmatrix();
    let mut out = DMatrix::zeros(n, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &v.column(i));
    }
    Ok(out)
}

/// Checks that the columns of `u` are orthonormal within `compare_tol`.
pub(crate) fn check_orthonormal_cols(u: &DMatrix<C64>, tol: &Tolerance) -> Result<()> {
    let gram = u.adjoint() * u;
    let residual = (&gram - DMatrix::<C64>::identity(u.ncols(), u.ncols())).norm();
    if residual > tol.compare_tol * (1.0 + u.ncols() as f64) {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(())
}
