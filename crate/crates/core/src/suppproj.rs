//! Positive/negative parts and support projections in closed form for
//! the family `S = [[lambda*I, B], [B*, 0]]`, plus transport of support
//! projections along partial isometries and the two coupled-form
//! supports used by the canonical idempotent calculus.
//!
//! All formulas are scalar functions of `T = (lambda² I + 4BB*)^{1/2}`
//! (or of the analogous operator built from `E1 E1*`), so each
//! operation costs one eigendecomposition of the `n x n` block instead
//! of one of the full `(n+m) x (n+m)` matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    block2x2, herm_eig, polar_partial_isometry, psd_sqrt, support_projection_oracle,
    PartialIsometry,
};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::tol::Tolerance;

/// The block matrix `[[lambda*I, B], [B*, 0]]` with real `lambda`.
#[derive(Debug, Clone)]
pub struct LambdaBlock {
    lambda: f64,
    b: ComplexMatrix,
}

impl LambdaBlock {
    pub fn new(lambda: f64, b: ComplexMatrix) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::Precondition {
                what: "lambda must be finite".into(),
            });
        }
        Ok(LambdaBlock { lambda, b })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    /// Assembles the full Hermitian matrix.
    pub fn materialize(&self) -> HermitianMatrix {
        let b = self.b.as_dmatrix();
        let (n, m) = (b.nrows(), b.ncols());
        let top = DMatrix::identity(n, n) * C64::new(self.lambda, 0.0);
        HermitianMatrix::symmetrized(block2x2(&top, b, &b.adjoint(), &DMatrix::zeros(m, m)))
    }
}

fn check_psd(a: &HermitianMatrix, tol: &Tolerance) -> Result<crate::linalg::EigenDecomposition> {
    let eig = herm_eig(a)?;
    if a.dim() > 0 && eig.min_eigenvalue() < -tol.psd_tol {
        return Err(Error::NotPositive {
            min_eig: eig.min_eigenvalue(),
        });
    }
    Ok(eig)
}

/// Support projection of `[[I, 2A^{1/2}], [2A^{1/2}, 4A]]` for positive
/// semidefinite `A`:
/// `[[(I+4A)^{-1}, 2A^{1/2}(I+4A)^{-1}], [2A^{1/2}(I+4A)^{-1}, 4A(I+4A)^{-1}]]`.
pub fn support_coupled(a: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let eig = check_psd(a, tol)?;
    let f11 = eig.apply_fn(|l| 1.0 / (1.0 + 4.0 * l.max(0.0)));
    let f12 = eig.apply_fn(|l| 2.0 * l.max(0.0).sqrt() / (1.0 + 4.0 * l.max(0.0)));
    let f22 = eig.apply_fn(|l| 4.0 * l.max(0.0) / (1.0 + 4.0 * l.max(0.0)));
    Ok(HermitianMatrix::symmetrized(block2x2(
        f11.as_dmatrix(),
        f12.as_dmatrix(),
        f12.as_dmatrix(),
        f22.as_dmatrix(),
    )))
}

/// Support projection of `[[Bc², 2A^{1/2}Bc], [2A^{1/2}Bc, 4A]]` for a
/// commuting pair: `A` positive semidefinite, `Bc` positive definite.
/// The projection is `[[Bc², 2A^{1/2}Bc], [2A^{1/2}Bc, 4A]] (Bc²+4A)^{-1}`
/// applied blockwise.
pub fn support_coupled_scaled(
    a: &HermitianMatrix,
    bc: &HermitianMatrix,
    tol: &Tolerance,
) -> Result<HermitianMatrix> {
    if a.dim() != bc.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", a.dim(), a.dim()),
            got: format!("{}x{}", bc.dim(), bc.dim()),
        });
    }
    check_psd(a, tol)?;
    let eig_bc = herm_eig(bc)?;
    if bc.dim() > 0 && eig_bc.min_eigenvalue() <= tol.rank_tol {
        return Err(Error::Singular {
            what: format!(
                "scaling block must be positive definite, min eigenvalue {:.3e}",
                eig_bc.min_eigenvalue()
            ),
        });
    }
    let adm = a.as_dmatrix();
    let bdm = bc.as_dmatrix();
    let comm = (adm * bdm - bdm * adm).norm();
    if comm > tol.compare_tol * (1.0 + adm.norm() * bdm.norm()) {
        return Err(Error::NotCommuting { residual: comm });
    }
    let root = psd_sqrt(a, tol)?;
    let g = HermitianMatrix::symmetrized(bdm * bdm + adm * C64::new(4.0, 0.0));
    let g_inv = herm_eig(&g)?.apply_fn(|l| 1.0 / l);
    let p11 = bdm * bdm * g_inv.as_dmatrix();
    let p12 = root.as_dmatrix() * bdm * g_inv.as_dmatrix() * C64::new(2.0, 0.0);
    let p22 = adm * g_inv.as_dmatrix() * C64::new(4.0, 0.0);
    Ok(HermitianMatrix::symmetrized(block2x2(
        &p11,
        &p12,
        &p12.adjoint(),
        &p22,
    )))
}

/// Transports a support projection along a partial isometry: if
/// `U*U G = G` then the support of `U G U*` is `U P_G U*`.
pub fn transport_support(
    g: &HermitianMatrix,
    u: &PartialIsometry,
    tol: &Tolerance,
) -> Result<HermitianMatrix> {
    let udm = u.as_dmatrix();
    if udm.ncols() != g.dim() {
        return Err(Error::ShapeMismatch {
            expected: format!("partial isometry with {} columns", g.dim()),
            got: format!("{}x{}", udm.nrows(), udm.ncols()),
        });
    }
    let gdm = g.as_dmatrix();
    let residual = (udm.adjoint() * udm * gdm - gdm).norm();
    if residual > tol.compare_tol * (1.0 + gdm.norm()) {
        return Err(Error::Precondition {
            what: format!(
                "initial space of the isometry must contain range(G): residual {residual:.3e}"
            ),
        });
    }
    let p = support_projection_oracle(g, tol)?;
    Ok(HermitianMatrix::symmetrized(
        udm * p.as_dmatrix() * udm.adjoint(),
    ))
}

/// Positive part of `[[lambda*I, B], [B*, 0]]`.
///
/// For `lambda != 0`, with `T = (lambda² I + 4BB*)^{1/2}`:
/// `(1/2) [[(T + lambda² T^{-1} + 2 lambda I)/2, (I + lambda T^{-1}) B],
///         [B* (I + lambda T^{-1}),              2 B* T^{-1} B]]`.
/// For `lambda = 0` it degenerates to `(1/2) [[|B*|, B], [B*, |B|]]`.
pub fn pos_part(s: &LambdaBlock, tol: &Tolerance) -> Result<HermitianMatrix> {
    let bdm = s.b.as_dmatrix();
    let lambda = s.lambda;
    if lambda == 0.0 {
        let abs_bs = psd_sqrt(&HermitianMatrix::symmetrized(bdm * bdm.adjoint()), tol)?;
        let abs_b = psd_sqrt(&HermitianMatrix::symmetrized(bdm.adjoint() * bdm), tol)?;
        let half_b = bdm * C64::new(0.5, 0.0);
        return Ok(HermitianMatrix::symmetrized(block2x2(
            &(abs_bs.as_dmatrix() * C64::new(0.5, 0.0)),
            &half_b,
            &half_b.adjoint(),
            &(abs_b.as_dmatrix() * C64::new(0.5, 0.0)),
        )));
    }
    let bbs = HermitianMatrix::symmetrized(bdm * bdm.adjoint());
    let eig = herm_eig(&bbs)?;
    let t = |l: f64| (lambda * lambda + 4.0 * l.max(0.0)).sqrt();
    let f11 = eig.apply_fn(|l| (t(l) + lambda * lambda / t(l) + 2.0 * lambda) / 4.0);
    let half_i_plus = eig.apply_fn(|l| 0.5 * (1.0 + lambda / t(l)));
    let x12 = half_i_plus.as_dmatrix() * bdm;
    let t_inv = eig.apply_fn(|l| 1.0 / t(l));
    let f22 = bdm.adjoint() * t_inv.as_dmatrix() * bdm;
    Ok(HermitianMatrix::symmetrized(block2x2(
        f11.as_dmatrix(),
        &x12,
        &x12.adjoint(),
        &f22,
    )))
}

/// Negative part of `[[I, B], [B*, 0]]`, with `T = (I + 4BB*)^{1/2}`:
/// `[[(T + T^{-1} - 2I)/4, (T^{-1} - I)B/2], [B*(T^{-1} - I)/2, B* T^{-1} B]]`.
pub fn neg_part_unit(b: &ComplexMatrix, _tol: &Tolerance) -> Result<HermitianMatrix> {
    let bdm = b.as_dmatrix();
    let bbs = HermitianMatrix::symmetrized(bdm * bdm.adjoint());
    let eig = herm_eig(&bbs)?;
    let t = |l: f64| (1.0 + 4.0 * l.max(0.0)).sqrt();
    let f11 = eig.apply_fn(|l| (t(l) + 1.0 / t(l) - 2.0) / 4.0);
    let half_minus = eig.apply_fn(|l| 0.5 * (1.0 / t(l) - 1.0));
    let x12 = half_minus.as_dmatrix() * bdm;
    let t_inv = eig.apply_fn(|l| 1.0 / t(l));
    let f22 = bdm.adjoint() * t_inv.as_dmatrix() * bdm;
    Ok(HermitianMatrix::symmetrized(block2x2(
        f11.as_dmatrix(),
        &x12,
        &x12.adjoint(),
        &f22,
    )))
}

/// Support projection of `[[I, B], [B*, 0]]`: `diag(I, P_{B*})`, where
/// `P_{B*}` projects onto the closure of `range(B*)`.
pub fn support_unit(b: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let bdm = b.as_dmatrix();
    let (n, m) = (bdm.nrows(), bdm.ncols());
    let v = polar_partial_isometry(b, tol)?;
    let vdm = v.as_dmatrix();
    let p_bs = vdm * vdm.adjoint();
    Ok(HermitianMatrix::symmetrized(block2x2(
        &DMatrix::identity(n, n),
        &DMatrix::zeros(n, m),
        &DMatrix::zeros(m, n),
        &p_bs,
    )))
}

/// Support projection of the positive part of `[[lambda*I, B], [B*, 0]]`.
///
/// With `T = (lambda² I + 4BB*)^{1/2}` and `V` the polar partial
/// isometry of `B` (so `B* = V (BB*)^{1/2}`):
/// - `lambda > 0`: `[[(I + lambda T^{-1})/2, T^{-1}B],
///                   [B* T^{-1}, 2 B* T^{-1} (lambda I + T)^{-1} B]]`;
/// - `lambda < 0`: same first row, lower-right `V (I - lambda T^{-1}) V* / 2`;
/// - `lambda = 0`: `(1/2) [[V*V, V*], [V, VV*]]`.
pub fn support_pos_part(s: &LambdaBlock, tol: &Tolerance) -> Result<HermitianMatrix> {
    let bdm = s.b.as_dmatrix();
    let lambda = s.lambda;
    if lambda == 0.0 {
        let v = polar_partial_isometry(&s.b, tol)?;
        let vdm = v.as_dmatrix();
        let p_b = vdm.adjoint() * vdm;
        let p_bs = vdm * vdm.adjoint();
        let half = C64::new(0.5, 0.0);
        return Ok(HermitianMatrix::symmetrized(block2x2(
            &(p_b * half),
            &(vdm.adjoint() * half),
            &(vdm * half),
            &(p_bs * half),
        )));
    }
    let bbs = HermitianMatrix::symmetrized(bdm * bdm.adjoint());
    let eig = herm_eig(&bbs)?;
    let t = |l: f64| (lambda * lambda + 4.0 * l.max(0.0)).sqrt();
    let f11 = eig.apply_fn(|l| 0.5 * (1.0 + lambda / t(l)));
    let t_inv = eig.apply_fn(|l| 1.0 / t(l));
    let x12 = t_inv.as_dmatrix() * bdm;
    let f22 = if lambda > 0.0 {
        let w = eig.apply_fn(|l| 2.0 / (t(l) * (lambda + t(l))));
        bdm.adjoint() * w.as_dmatrix() * bdm
    } else {
        let v = polar_partial_isometry(&s.b, tol)?;
        let vdm = v.as_dmatrix();
        let core = eig.apply_fn(|l| 0.5 * (1.0 - lambda / t(l)));
        vdm * core.as_dmatrix() * vdm.adjoint()
    };
    Ok(HermitianMatrix::symmetrized(block2x2(
        f11.as_dmatrix(),
        &x12,
        &x12.adjoint(),
        &f22,
    )))
}

/// Support projection of the negative part of `[[I, B], [B*, 0]]` with
/// `T = (I + 4BB*)^{1/2}`:
/// `[[(I - T^{-1})/2, -T^{-1}B], [-B* T^{-1}, V (T^{-1} + I) V* / 2]]`.
pub fn support_neg_part_unit(b: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let bdm = b.as_dmatrix();
    let bbs = HermitianMatrix::symmetrized(bdm * bdm.adjoint());
    let eig = herm_eig(&bbs)?;
    let t = |l: f64| (1.0 + 4.0 * l.max(0.0)).sqrt();
    let f11 = eig.apply_fn(|l| 0.5 * (1.0 - 1.0 / t(l)));
    let t_inv = eig.apply_fn(|l| 1.0 / t(l));
    let x12 = t_inv.as_dmatrix() * bdm * C64::new(-1.0, 0.0);
    let v = polar_partial_isometry(b, tol)?;
    let vdm = v.as_dmatrix();
    let core = eig.apply_fn(|l| 0.5 * (1.0 / t(l) + 1.0));
    let f22 = vdm * core.as_dmatrix() * vdm.adjoint();
    Ok(HermitianMatrix::symmetrized(block2x2(
        f11.as_dmatrix(),
        &x12,
        &x12.adjoint(),
        &f22,
    )))
}

/// Positive part of `E + E* = [[2I, E1], [E1*, 0]]` for an idempotent in
/// canonical coordinates, with `T = (I + E1 E1*)^{1/2}`:
/// `(1/2) [[T + T^{-1} + 2I, (I + T^{-1})E1], [E1*(I + T^{-1}), E1* T^{-1} E1]]`.
pub fn pos_part_esum(e1: &ComplexMatrix, _tol: &Tolerance) -> Result<HermitianMatrix> {
    let edm = e1.as_dmatrix();
    let ees = HermitianMatrix::symmetrized(edm * edm.adjoint());
    let eig = herm_eig(&ees)?;
    let t = |l: f64| (1.0 + l.max(0.0)).sqrt();
    let f11 = eig.apply_fn(|l| (t(l) + 1.0 / t(l) + 2.0) / 2.0);
    let half_plus = eig.apply_fn(|l| 0.5 * (1.0 + 1.0 / t(l)));
    let x12 = half_plus.as_dmatrix() * edm;
    let t_inv = eig.apply_fn(|l| 1.0 / t(l));
    let f22 = edm.adjoint() * t_inv.as_dmatrix() * edm * C64::new(0.5, 0.0);
    Ok(HermitianMatrix::symmetrized(block2x2(
        f11.as_dmatrix(),
        &x12,
        &x12.adjoint(),
        &f22,
    )))
}

/// Support projection of the positive part of `E + E*` in canonical
/// coordinates, with `T = (I + E1 E1*)^{1/2}`:
/// `(1/2) [[I + T^{-1}, T^{-1}E1], [E1* T^{-1}, E1* (T + T²)^{-1} E1]]`.
pub fn support_pos_part_esum(e1: &ComplexMatrix, _tol: &Tolerance) -> Result<HermitianMatrix> {
    let edm = e1.as_dmatrix();
    let ees = HermitianMatrix::symmetrized(edm * edm.adjoint());
    let eig = herm_eig(&ees)?;
    let t = |l: f64| (1.0 + l.max(0.0)).sqrt();
    let f11 = eig.apply_fn(|l| 0.5 * (1.0 + 1.0 / t(l)));
    let half_t_inv = eig.apply_fn(|l| 0.5 / t(l));
    let x12 = half_t_inv.as_dmatrix() * edm;
    let g = eig.apply_fn(|l| 0.5 / (t(l) * (1.0 + t(l))));
    let f22 = edm.adjoint() * g.as_dmatrix() * edm;
    Ok(HermitianMatrix::symmetrized(block2x2(
        f11.as_dmatrix(),
        &x12,
        &x12.adjoint(),
        &f22,
    )))
}
