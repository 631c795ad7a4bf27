//! Closed-form absolute values for the block family
//! `Q = [[lambda*I, B], [B*, mu*I]]`.
//!
//! Every case reduces to scalar functions of `B B*` or `B* B`, so the
//! only spectral work happens at block size rather than on the full
//! matrix. The interesting regime is `0 < lambda*mu < ‖B‖²`, where the
//! matrix is split along the spectrum of a reduced invertible block and
//! the two halves are handled by different branch formulas before being
//! conjugated back to the original coordinates.
//!
//! Case analysis is total over finite `(lambda, mu, B)` and is exposed
//! through [`CaseTag`]; `abs_block_symm` and [`case_of`] share one
//! dispatcher so they can never disagree.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{
    block2x2, herm_eig, orthonormal_complement, polar_partial_isometry, psd_sqrt, spectral_split,
};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::tol::Tolerance;

/// The block matrix `[[lambda*I, B], [B*, mu*I]]` with real diagonal
/// scalars. `B` maps the second summand into the first, so with `B` of
/// size `n x m` the assembled matrix is `(n+m) x (n+m)` and Hermitian.
#[derive(Debug, Clone)]
pub struct BlockSymm {
    lambda: f64,
    mu: f64,
    b: ComplexMatrix,
}

impl BlockSymm {
    pub fn new(lambda: f64, mu: f64, b: ComplexMatrix) -> Result<Self> {
        if !lambda.is_finite() || !mu.is_finite() {
            return Err(Error::Precondition {
                what: "lambda and mu must be finite".into(),
            });
        }
        Ok(BlockSymm { lambda, mu, b })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    /// Assembles the full `(n+m) x (n+m)` Hermitian matrix.
    pub fn materialize(&self) -> HermitianMatrix {
        let b = self.b.as_dmatrix();
        let (n, m) = (b.nrows(), b.ncols());
        let top = DMatrix::identity(n, n) * C64::new(self.lambda, 0.0);
        let bot = DMatrix::identity(m, m) * C64::new(self.mu, 0.0);
        HermitianMatrix::symmetrized(block2x2(&top, b, &b.adjoint(), &bot))
    }
}

/// Which closed form applies to a given `(lambda, mu, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `lambda = mu = 0`: `|Q| = diag(|B*|, |B|)`.
    BothZero,
    /// `lambda != 0, mu = 0`.
    LambdaOnly,
    /// `lambda = 0, mu != 0`.
    MuOnly,
    /// `lambda*mu >= ‖B‖²` with `lambda*mu > 0`: `|Q| = sign(lambda)·Q`.
    ProductAboveNormSq,
    /// `lambda*mu < 0`.
    ProductNegative,
    /// `0 < lambda*mu < ‖B‖²`: handled by scaling to the unit-diagonal
    /// form and splitting the reduced block.
    ProductInsideNormSq,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseTag::BothZero => "BothZero",
            CaseTag::LambdaOnly => "LambdaOnly",
            CaseTag::MuOnly => "MuOnly",
            CaseTag::ProductAboveNormSq => "ProductAboveNormSq",
            CaseTag::ProductNegative => "ProductNegative",
            CaseTag::ProductInsideNormSq => "ProductInsideNormSq",
        };
        f.write_str(s)
    }
}

/// Shared dispatcher. `norm_sq` is the largest eigenvalue of `B B*`.
/// Zero tests on `lambda`/`mu` are exact: a structural zero is a value
/// passed as literal zero, not a small number. The `lambda*mu ≈ ‖B‖²`
/// boundary is widened by `rank_tol` towards the sign-scaled case, which
/// stays numerically exact there while the split-based case would work
/// with an empty or nearly-empty high part.
fn dispatch(lambda: f64, mu: f64, norm_sq: f64, tol: &Tolerance) -> CaseTag {
    if lambda == 0.0 && mu == 0.0 {
        CaseTag::BothZero
    } else if mu == 0.0 {
        CaseTag::LambdaOnly
    } else if lambda == 0.0 {
        CaseTag::MuOnly
    } else if lambda * mu < 0.0 {
        CaseTag::ProductNegative
    } else if lambda * mu >= norm_sq - tol.rank_tol * (1.0 + norm_sq) {
        CaseTag::ProductAboveNormSq
    } else {
        CaseTag::ProductInsideNormSq
    }
}

/// Case tag for `(lambda, mu, B)` without computing the absolute value.
pub fn case_of(q: &BlockSymm, tol: &Tolerance) -> Result<CaseTag> {
    let b = q.b.as_dmatrix();
    let bbs = HermitianMatrix::symmetrized(b * b.adjoint());
    let norm_sq = herm_eig(&bbs)?.max_eigenvalue().max(0.0);
    Ok(dispatch(q.lambda, q.mu, norm_sq, tol))
}

/// Closed-form square root of the 2x2 matrix
/// `[[1 + b, (1+mu)*sqrt(b)], [sqrt(b)*(1+mu), mu² + b]]`
/// (the square of `[[1, sqrt(b)], [sqrt(b), mu]]`), for `b > 0`.
///
/// For `mu >= b` the root is `[[1, sqrt(b)], [sqrt(b), mu]]` itself;
/// below that the root divides through by `t = sqrt(mu² - 2mu + 4b + 1)`.
/// The two branches agree at `mu = b`.
pub fn sqrt_scalar_coupling(b: f64, mu: f64) -> Result<HermitianMatrix> {
    if !(b > 0.0) || !mu.is_finite() {
        return Err(Error::Precondition {
            what: format!("need b > 0 and finite mu, got b = {b}, mu = {mu}"),
        });
    }
    let rb = b.sqrt();
    let entries = if mu >= b {
        [1.0, rb, rb, mu]
    } else {
        let t = (mu * mu - 2.0 * mu + 4.0 * b + 1.0).sqrt();
        [
            (2.0 * b - mu + 1.0) / t,
            (1.0 + mu) * rb / t,
            rb * (1.0 + mu) / t,
            (mu * mu - mu + 2.0 * b) / t,
        ]
    };
    Ok(HermitianMatrix::symmetrized(
        ComplexMatrix::from_real(2, 2, &entries)?.into_dmatrix(),
    ))
}

/// Branch functions for the part of the spectrum above the threshold:
/// entries of the square root of the coupling matrix restricted to an
/// eigenvalue `l` of `A`, divided through by `t = sqrt((mu-1)² + 4l)`.
fn high_fns(mu: f64) -> (
    impl Fn(f64) -> f64,
    impl Fn(f64) -> f64,
    impl Fn(f64) -> f64,
) {
    let t = move |l: f64| ((mu - 1.0) * (mu - 1.0) + 4.0 * l.max(0.0)).sqrt();
    (
        move |l: f64| (2.0 * l.max(0.0) - mu + 1.0) / t(l),
        move |l: f64| (1.0 + mu) * l.max(0.0).sqrt() / t(l),
        move |l: f64| (mu * mu - mu + 2.0 * l.max(0.0)) / t(l),
    )
}

/// `U1 diag(f1(d1)) U1* + U2 diag(f2(d2)) U2*`.
fn mix_diag(
    u1: &DMatrix<C64>,
    d1: &[f64],
    f1: impl Fn(f64) -> f64,
    u2: &DMatrix<C64>,
    d2: &[f64],
    f2: impl Fn(f64) -> f64,
) -> DMatrix<C64> {
    let mut s1 = u1.clone();
    for (j, &l) in d1.iter().enumerate() {
        let c = C64::new(f1(l), 0.0);
        for i in 0..s1.nrows() {
            s1[(i, j)] *= c;
        }
    }
    let mut s2 = u2.clone();
    for (j, &l) in d2.iter().enumerate() {
        let c = C64::new(f2(l), 0.0);
        for i in 0..s2.nrows() {
            s2[(i, j)] *= c;
        }
    }
    s1 * u1.adjoint() + s2 * u2.adjoint()
}

fn diag_of(h: &HermitianMatrix) -> Vec<f64> {
    (0..h.dim()).map(|i| h.as_dmatrix()[(i, i)].re).collect()
}

/// Square root of `[[I + A, (1+mu)A^{1/2}], [(1+mu)A^{1/2}, mu²I + A]]`
/// for positive semidefinite `A` and real `mu`.
///
/// Three regimes: for `mu >= ‖A‖` the root is
/// `[[I, A^{1/2}], [A^{1/2}, mu*I]]`; for `mu <= 0` every eigenvalue of
/// `A` uses the division-by-`t` branch; in between, the spectrum of `A`
/// is split at `mu` and the two branches are applied on their own
/// spectral subspaces (the coupling matrix is block diagonal with
/// respect to that split).
pub fn sqrt_operator_coupling(
    a: &HermitianMatrix,
    mu: f64,
    tol: &Tolerance,
) -> Result<HermitianMatrix> {
    let eig = herm_eig(a)?;
    if a.dim() > 0 && eig.min_eigenvalue() < -tol.psd_tol {
        return Err(Error::NotPositive {
            min_eig: eig.min_eigenvalue(),
        });
    }
    let norm = eig.max_eigenvalue().max(0.0);
    let n = a.dim();

    if mu >= norm {
        let root = eig.apply_fn(|l| l.max(0.0).sqrt());
        let mu_i = DMatrix::identity(n, n) * C64::new(mu, 0.0);
        return Ok(HermitianMatrix::symmetrized(block2x2(
            &DMatrix::identity(n, n),
            root.as_dmatrix(),
            root.as_dmatrix(),
            &mu_i,
        )));
    }

    let (g11, g12, g22) = high_fns(mu);

    if mu <= 0.0 {
        let b11 = eig.apply_fn(&g11);
        let b12 = eig.apply_fn(&g12);
        let b22 = eig.apply_fn(&g22);
        return Ok(HermitianMatrix::symmetrized(block2x2(
            b11.as_dmatrix(),
            b12.as_dmatrix(),
            b12.as_dmatrix(),
            b22.as_dmatrix(),
        )));
    }

    // 0 < mu < ‖A‖: low eigenvalues keep the plain form, high ones the
    // t-branch; both live on invariant subspaces of A.
    let split = spectral_split(a, mu, tol)?;
    let u1 = split.basis_low.as_dmatrix();
    let u2 = split.basis_high.as_dmatrix();
    let d1 = diag_of(&split.a1);
    let d2 = diag_of(&split.a2);
    let r11 = mix_diag(u1, &d1, |_| 1.0, u2, &d2, &g11);
    let r12 = mix_diag(u1, &d1, |l| l.max(0.0).sqrt(), u2, &d2, &g12);
    let r22 = mix_diag(u1, &d1, |_| mu, u2, &d2, &g22);
    Ok(HermitianMatrix::symmetrized(block2x2(
        &r11,
        &r12,
        &r12.adjoint(),
        &r22,
    )))
}

/// `|[[I, B], [B*, mu*I]]|` for arbitrary rectangular `B`.
pub fn abs_unit_block(b: &ComplexMatrix, mu: f64, tol: &Tolerance) -> Result<HermitianMatrix> {
    if !mu.is_finite() {
        return Err(Error::Precondition {
            what: "mu must be finite".into(),
        });
    }
    let bdm = b.as_dmatrix();
    let (n, m) = (bdm.nrows(), bdm.ncols());
    let bbs = HermitianMatrix::symmetrized(bdm * bdm.adjoint());
    let eig_bbs = herm_eig(&bbs)?;
    let norm_sq = eig_bbs.max_eigenvalue().max(0.0);

    if mu >= norm_sq - tol.rank_tol * (1.0 + norm_sq) {
        // mu at or above ‖B‖²: the matrix is already positive.
        let mu_i = DMatrix::identity(m, m) * C64::new(mu, 0.0);
        return Ok(HermitianMatrix::symmetrized(block2x2(
            &DMatrix::identity(n, n),
            bdm,
            &bdm.adjoint(),
            &mu_i,
        )));
    }

    if mu <= 0.0 {
        let bsb = HermitianMatrix::symmetrized(bdm.adjoint() * bdm);
        let eig_bsb = herm_eig(&bsb)?;
        let t = |l: f64| ((mu - 1.0) * (mu - 1.0) + 4.0 * l.max(0.0)).sqrt();
        let f11 = eig_bbs.apply_fn(|l| (2.0 * l.max(0.0) - mu + 1.0) / t(l));
        let t_inv = eig_bbs.apply_fn(|l| 1.0 / t(l));
        let x12 = t_inv.as_dmatrix() * bdm * C64::new(1.0 + mu, 0.0);
        let f22 = eig_bsb.apply_fn(|l| (mu * mu - mu + 2.0 * l.max(0.0)) / t(l));
        return Ok(HermitianMatrix::symmetrized(block2x2(
            f11.as_dmatrix(),
            &x12,
            &x12.adjoint(),
            f22.as_dmatrix(),
        )));
    }

    // 0 < mu < ‖B‖²: compress B to an invertible block between range(B)
    // and null(B)^perp, take the coupled square root there, and re-embed.
    // Off those subspaces the absolute value is I on range(B)^perp and
    // mu*I on null(B).
    let cut = tol.rank_tol * norm_sq;
    let r = eig_bbs.eigenvalues.iter().filter(|&&l| l > cut).count();

    let u_r = range_basis(bdm, r)?;
    let check = (&u_r * u_r.adjoint() * bdm - bdm).norm();
    if check > tol.compare_tol * (1.0 + bdm.norm()) {
        return Err(Error::RankInstability {
            detail: format!("range basis residual {check:.3e} at rank {r}"),
        });
    }
    let w_k = range_basis(&bdm.adjoint(), r)?;
    let check = (&w_k * w_k.adjoint() * bdm.adjoint() - bdm.adjoint()).norm();
    if check > tol.compare_tol * (1.0 + bdm.norm()) {
        return Err(Error::RankInstability {
            detail: format!("corange basis residual {check:.3e} at rank {r}"),
        });
    }
    let u_p = orthonormal_complement(&u_r, n)?;
    let w_n = orthonormal_complement(&w_k, m)?;

    let b_red = u_r.adjoint() * bdm * &w_k;
    let b_red_m = ComplexMatrix::from_dmatrix(b_red.clone())?;
    let v = polar_partial_isometry(&b_red_m, tol)?;
    if v.rank() != r {
        return Err(Error::RankInstability {
            detail: format!("reduced block rank {} != {}", v.rank(), r),
        });
    }
    let inner_base = sqrt_operator_coupling(
        &HermitianMatrix::symmetrized(&b_red * b_red.adjoint()),
        mu,
        tol,
    )?;
    // conjugate by blkdiag(I, V): V carries null(B)^perp coordinates onto
    // the second copy of range(B) inside the coupled form
    let x = block2x2(
        &DMatrix::identity(r, r),
        &DMatrix::zeros(r, r),
        &DMatrix::zeros(r, r),
        v.as_dmatrix(),
    );
    let inner = &x * inner_base.as_dmatrix() * x.adjoint();

    // split coordinates: range(B) ++ range(B)^perp ++ null(B)^perp ++ null(B)
    let mut m_split = DMatrix::<C64>::zeros(n + m, n + m);
    m_split
        .view_mut((0, 0), (r, r))
        .copy_from(&inner.view((0, 0), (r, r)).into_owned());
    m_split
        .view_mut((0, n), (r, r))
        .copy_from(&inner.view((0, r), (r, r)).into_owned());
    m_split
        .view_mut((n, 0), (r, r))
        .copy_from(&inner.view((r, 0), (r, r)).into_owned());
    m_split
        .view_mut((n, n), (r, r))
        .copy_from(&inner.view((r, r), (r, r)).into_owned());
    for i in r..n {
        m_split[(i, i)] = C64::new(1.0, 0.0);
    }
    for i in (n + r)..(n + m) {
        m_split[(i, i)] = C64::new(mu.abs(), 0.0);
    }

    let q_h = block_cols(&u_r, &u_p);
    let q_k = block_cols(&w_k, &w_n);
    let phi = block2x2(
        &q_h,
        &DMatrix::zeros(n, m),
        &DMatrix::zeros(m, n),
        &q_k,
    );
    Ok(HermitianMatrix::symmetrized(&phi * m_split * phi.adjoint()))
}

/// Orthonormal basis of the column space of `b`, assuming rank `r`,
/// from column-pivoted QR. Deliberately not the eigenbasis of `B B*`:
/// downstream code compresses `B` to these bases and should see a
/// generic (non-diagonal) invertible block.
fn range_basis(b: &DMatrix<C64>, r: usize) -> Result<DMatrix<C64>> {
    let qr = b.clone().col_piv_qr();
    let q = qr.q();
    if q.ncols() < r {
        return Err(Error::RankInstability {
            detail: format!("QR produced {} columns, need {}", q.ncols(), r),
        });
    }
    Ok(q.columns(0, r).into_owned())
}

fn block_cols(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

/// `|Q|` for `Q = [[lambda*I, B], [B*, mu*I]]`, together with the case
/// that produced it. Total over finite inputs.
pub fn abs_block_symm(q: &BlockSymm, tol: &Tolerance) -> Result<(HermitianMatrix, CaseTag)> {
    let bdm = q.b.as_dmatrix();
    let (n, m) = (bdm.nrows(), bdm.ncols());
    let bbs = HermitianMatrix::symmetrized(bdm * bdm.adjoint());
    let eig_bbs = herm_eig(&bbs)?;
    let norm_sq = eig_bbs.max_eigenvalue().max(0.0);
    let tag = dispatch(q.lambda, q.mu, norm_sq, tol);
    let (lambda, mu) = (q.lambda, q.mu);

    let result = match tag {
        CaseTag::BothZero => {
            let bsb = HermitianMatrix::symmetrized(bdm.adjoint() * bdm);
            let abs_bs = psd_sqrt(&bbs, tol)?;
            let abs_b = psd_sqrt(&bsb, tol)?;
            HermitianMatrix::symmetrized(block2x2(
                abs_bs.as_dmatrix(),
                &DMatrix::zeros(n, m),
                &DMatrix::zeros(m, n),
                abs_b.as_dmatrix(),
            ))
        }
        CaseTag::LambdaOnly => {
            // T = (lambda² I + 4BB*)^{1/2}:
            // [[(T + lambda² T^{-1})/2, lambda T^{-1} B],
            //  [lambda B* T^{-1},       2 B* T^{-1} B ]]
            let t = |l: f64| (lambda * lambda + 4.0 * l.max(0.0)).sqrt();
            let f11 = eig_bbs.apply_fn(|l| (t(l) + lambda * lambda / t(l)) / 2.0);
            let t_inv = eig_bbs.apply_fn(|l| 1.0 / t(l));
            let x12 = t_inv.as_dmatrix() * bdm * C64::new(lambda, 0.0);
            let f22 = bdm.adjoint() * t_inv.as_dmatrix() * bdm * C64::new(2.0, 0.0);
            HermitianMatrix::symmetrized(block2x2(
                f11.as_dmatrix(),
                &x12,
                &x12.adjoint(),
                &f22,
            ))
        }
        CaseTag::MuOnly => {
            // S = (mu² I + 4B*B)^{1/2}:
            // [[2 B S^{-1} B*, mu B S^{-1}],
            //  [mu S^{-1} B*,  (S + mu² S^{-1})/2]]
            let bsb = HermitianMatrix::symmetrized(bdm.adjoint() * bdm);
            let eig_bsb = herm_eig(&bsb)?;
            let s = |l: f64| (mu * mu + 4.0 * l.max(0.0)).sqrt();
            let s_inv = eig_bsb.apply_fn(|l| 1.0 / s(l));
            let f11 = bdm * s_inv.as_dmatrix() * bdm.adjoint() * C64::new(2.0, 0.0);
            let x12 = bdm * s_inv.as_dmatrix() * C64::new(mu, 0.0);
            let f22 = eig_bsb.apply_fn(|l| (s(l) + mu * mu / s(l)) / 2.0);
            HermitianMatrix::symmetrized(block2x2(
                &f11,
                &x12,
                &x12.adjoint(),
                f22.as_dmatrix(),
            ))
        }
        CaseTag::ProductAboveNormSq => {
            let sign = if lambda > 0.0 { 1.0 } else { -1.0 };
            let scaled =
                ComplexMatrix::from_dmatrix(q.materialize().as_dmatrix() * C64::new(sign, 0.0))?;
            HermitianMatrix::symmetrized(scaled.into_dmatrix())
        }
        CaseTag::ProductNegative => {
            // T = ((mu-lambda)² I + 4BB*)^{1/2}, S likewise from B*B:
            // [[T^{-1}(2BB* - lambda mu I + lambda² I), (lambda+mu) T^{-1} B],
            //  [(lambda+mu) B* T^{-1},  S^{-1}(mu² I - lambda mu I + 2B*B)]]
            let d = mu - lambda;
            let t = |l: f64| (d * d + 4.0 * l.max(0.0)).sqrt();
            let bsb = HermitianMatrix::symmetrized(bdm.adjoint() * bdm);
            let eig_bsb = herm_eig(&bsb)?;
            let f11 =
                eig_bbs.apply_fn(|l| (2.0 * l.max(0.0) - lambda * mu + lambda * lambda) / t(l));
            let t_inv = eig_bbs.apply_fn(|l| 1.0 / t(l));
            let x12 = t_inv.as_dmatrix() * bdm * C64::new(lambda + mu, 0.0);
            let f22 = eig_bsb.apply_fn(|l| (mu * mu - lambda * mu + 2.0 * l.max(0.0)) / t(l));
            HermitianMatrix::symmetrized(block2x2(
                f11.as_dmatrix(),
                &x12,
                &x12.adjoint(),
                f22.as_dmatrix(),
            ))
        }
        CaseTag::ProductInsideNormSq => {
            // |Q| = |lambda| * |[[I, B/lambda], [B*/lambda, (mu/lambda) I]]|
            let scaled = ComplexMatrix::from_dmatrix(bdm * C64::new(1.0 / lambda, 0.0))?;
            let unit = abs_unit_block(&scaled, mu / lambda, tol)?;
            HermitianMatrix::symmetrized(unit.as_dmatrix() * C64::new(lambda.abs(), 0.0))
        }
    };
    Ok((result, tag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::abs_oracle;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn assert_close(x: &HermitianMatrix, y: &HermitianMatrix, eps: f64) {
        let d = (x.as_dmatrix() - y.as_dmatrix()).norm();
        assert!(d <= eps, "distance {d:.3e} exceeds {eps:.3e}");
    }

    #[test]
    fn scalar_coupling_upper_branch() {
        let s = sqrt_scalar_coupling(1.0, 2.0).unwrap();
        let expected = HermitianMatrix::new(
            ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 2.0]).unwrap(),
            &tol(),
        )
        .unwrap();
        assert_close(&s, &expected, 1e-14);
        let sq = s.as_dmatrix() * s.as_dmatrix();
        assert_abs_diff_eq!(sq[(0, 0)].re, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sq[(0, 1)].re, 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sq[(1, 1)].re, 5.0, epsilon = 1e-13);
    }

    #[test]
    fn scalar_coupling_lower_branch() {
        let s = sqrt_scalar_coupling(1.0, 0.0).unwrap();
        let r5 = 5f64.sqrt();
        let expected = HermitianMatrix::new(
            ComplexMatrix::from_real(2, 2, &[3.0 / r5, 1.0 / r5, 1.0 / r5, 2.0 / r5]).unwrap(),
            &tol(),
        )
        .unwrap();
        assert_close(&s, &expected, 1e-14);
        let sq = s.as_dmatrix() * s.as_dmatrix();
        assert_abs_diff_eq!(sq[(0, 0)].re, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sq[(0, 1)].re, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sq[(1, 1)].re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn scalar_coupling_branches_agree_at_mu_eq_b() {
        for b in [0.3, 1.0, 4.0] {
            let hi = sqrt_scalar_coupling(b, b).unwrap();
            // force the lower branch by nudging mu just below b
            let lo = sqrt_scalar_coupling(b, b - 1e-12).unwrap();
            assert_close(&hi, &lo, 1e-10);
        }
    }

    #[test]
    fn scalar_coupling_rejects_nonpositive_b() {
        assert!(sqrt_scalar_coupling(0.0, 1.0).is_err());
        assert!(sqrt_scalar_coupling(-1.0, 1.0).is_err());
    }

    fn coupling_matrix(a: &HermitianMatrix, mu: f64) -> HermitianMatrix {
        let n = a.dim();
        let root = psd_sqrt(a, &tol()).unwrap();
        let c = root.as_dmatrix() * C64::new(1.0 + mu, 0.0);
        let top = a.as_dmatrix() + DMatrix::<C64>::identity(n, n);
        let bot = a.as_dmatrix() + DMatrix::<C64>::identity(n, n) * C64::new(mu * mu, 0.0);
        HermitianMatrix::symmetrized(block2x2(&top, &c, &c.adjoint(), &bot))
    }

    #[test]
    fn operator_coupling_matches_scalar_case() {
        let a = HermitianMatrix::from_diagonal(&[1.0]);
        let s = sqrt_operator_coupling(&a, 2.0, &tol()).unwrap();
        let expected = sqrt_scalar_coupling(1.0, 2.0).unwrap();
        assert_close(&s, &expected, 1e-13);
    }

    #[test]
    fn operator_coupling_zero_matrix_negative_mu() {
        let a = HermitianMatrix::zeros(2);
        let s = sqrt_operator_coupling(&a, -1.0, &tol()).unwrap();
        assert!((s.as_dmatrix() - DMatrix::<C64>::identity(4, 4)).norm() < 1e-13);
    }

    #[test]
    fn operator_coupling_squares_back_across_regimes() {
        let a = HermitianMatrix::new(
            ComplexMatrix::new(
                2,
                2,
                vec![
                    C64::new(2.0, 0.0),
                    C64::new(0.5, 0.7),
                    C64::new(0.5, -0.7),
                    C64::new(1.0, 0.0),
                ],
            )
            .unwrap(),
            &tol(),
        )
        .unwrap();
        for mu in [-2.0, 0.0, 0.4, 1.1, 2.9, 5.0] {
            let s = sqrt_operator_coupling(&a, mu, &tol()).unwrap();
            let sq = HermitianMatrix::symmetrized(s.as_dmatrix() * s.as_dmatrix());
            let m = coupling_matrix(&a, mu);
            assert_close(&sq, &m, 1e-10);
            let min = crate::linalg::min_eigenvalue(&s).unwrap();
            assert!(min > -1e-10, "root not psd at mu={mu}: min eig {min}");
        }
    }

    #[test]
    fn operator_coupling_split_case_diag() {
        // eigenvalues straddle mu = 2
        let a = HermitianMatrix::from_diagonal(&[1.0, 3.0]);
        let s = sqrt_operator_coupling(&a, 2.0, &tol()).unwrap();
        let sq = HermitianMatrix::symmetrized(s.as_dmatrix() * s.as_dmatrix());
        assert_close(&sq, &coupling_matrix(&a, 2.0), 1e-12);
    }

    #[test]
    fn abs_unit_block_examples() {
        let t = tol();
        // zero B, negative mu
        let z = ComplexMatrix::zeros(1, 1);
        let a = abs_unit_block(&z, -3.0, &t).unwrap();
        assert_close(&a, &HermitianMatrix::from_diagonal(&[1.0, 3.0]), 1e-13);

        // scalar b = 1, mu = 0
        let one = ComplexMatrix::from_real(1, 1, &[1.0]).unwrap();
        let a = abs_unit_block(&one, 0.0, &t).unwrap();
        let r5 = 5f64.sqrt();
        let expected = HermitianMatrix::new(
            ComplexMatrix::from_real(2, 2, &[3.0 / r5, 1.0 / r5, 1.0 / r5, 2.0 / r5]).unwrap(),
            &t,
        )
        .unwrap();
        assert_close(&a, &expected, 1e-13);
    }

    #[test]
    fn abs_unit_block_split_case_matches_oracle() {
        let t = tol();
        let b = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 3.0]).unwrap();
        let a = abs_unit_block(&b, 4.0, &t).unwrap();
        let q = BlockSymm::new(1.0, 4.0, b).unwrap();
        let oracle = abs_oracle(&q.materialize()).unwrap();
        assert_close(&a, &oracle, 1e-10);
    }

    #[test]
    fn abs_unit_block_rectangular_rank_deficient() {
        let t = tol();
        // B = [0 3]: rank 1, nontrivial null(B)
        let b = ComplexMatrix::from_real(1, 2, &[0.0, 3.0]).unwrap();
        let a = abs_unit_block(&b, 1.0, &t).unwrap();
        let q = BlockSymm::new(1.0, 1.0, b).unwrap();
        let oracle = abs_oracle(&q.materialize()).unwrap();
        assert_close(&a, &oracle, 1e-10);

        // tall B with a zero column
        let b = ComplexMatrix::new(
            3,
            2,
            vec![
                C64::new(1.0, 1.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 2.0),
                C64::new(0.0, 0.0),
                C64::new(2.0, -1.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let a = abs_unit_block(&b, 0.5, &t).unwrap();
        let q = BlockSymm::new(1.0, 0.5, b).unwrap();
        let oracle = abs_oracle(&q.materialize()).unwrap();
        assert_close(&a, &oracle, 1e-10);
    }

    #[test]
    fn abs_block_symm_examples() {
        let t = tol();
        // both scalars zero
        let q = BlockSymm::new(0.0, 0.0, ComplexMatrix::from_real(1, 1, &[2.0]).unwrap()).unwrap();
        let (a, tag) = abs_block_symm(&q, &t).unwrap();
        assert_eq!(tag, CaseTag::BothZero);
        assert_close(&a, &HermitianMatrix::from_diagonal(&[2.0, 2.0]), 1e-13);

        // lambda only
        let q = BlockSymm::new(1.0, 0.0, ComplexMatrix::from_real(1, 1, &[1.0]).unwrap()).unwrap();
        let (a, tag) = abs_block_symm(&q, &t).unwrap();
        assert_eq!(tag, CaseTag::LambdaOnly);
        let r5 = 5f64.sqrt();
        let expected = HermitianMatrix::new(
            ComplexMatrix::from_real(2, 2, &[3.0 / r5, 1.0 / r5, 1.0 / r5, 2.0 / r5]).unwrap(),
            &t,
        )
        .unwrap();
        assert_close(&a, &expected, 1e-13);

        // product at the norm-squared boundary
        let q = BlockSymm::new(2.0, 1.0, ComplexMatrix::from_real(1, 1, &[1.0]).unwrap()).unwrap();
        let (a, tag) = abs_block_symm(&q, &t).unwrap();
        assert_eq!(tag, CaseTag::ProductAboveNormSq);
        let expected = HermitianMatrix::new(
            ComplexMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 1.0]).unwrap(),
            &t,
        )
        .unwrap();
        assert_close(&a, &expected, 1e-13);

        // opposite signs
        let q = BlockSymm::new(1.0, -1.0, ComplexMatrix::from_real(1, 1, &[1.0]).unwrap()).unwrap();
        let (a, tag) = abs_block_symm(&q, &t).unwrap();
        assert_eq!(tag, CaseTag::ProductNegative);
        let s2 = 2f64.sqrt();
        assert_close(&a, &HermitianMatrix::from_diagonal(&[s2, s2]), 1e-13);

        // strictly inside (0, ‖B‖²)
        let q = BlockSymm::new(1.0, 0.5, ComplexMatrix::from_real(1, 1, &[1.0]).unwrap()).unwrap();
        let (a, tag) = abs_block_symm(&q, &t).unwrap();
        assert_eq!(tag, CaseTag::ProductInsideNormSq);
        let oracle = abs_oracle(&q.materialize()).unwrap();
        assert_close(&a, &oracle, 1e-12);

        // mu only
        let q = BlockSymm::new(0.0, 1.0, ComplexMatrix::from_real(1, 1, &[1.0]).unwrap()).unwrap();
        let (a, tag) = abs_block_symm(&q, &t).unwrap();
        assert_eq!(tag, CaseTag::MuOnly);
        let oracle = abs_oracle(&q.materialize()).unwrap();
        assert_close(&a, &oracle, 1e-12);
    }

    #[test]
    fn case_dispatch_is_total_and_consistent() {
        let t = tol();
        let b = ComplexMatrix::from_real(1, 1, &[1.0]).unwrap();
        let cases = [
            (0.0, 0.0, CaseTag::BothZero),
            (-2.0, 0.0, CaseTag::LambdaOnly),
            (0.0, 3.0, CaseTag::MuOnly),
            (2.0, 1.0, CaseTag::ProductAboveNormSq),
            (-2.0, -1.0, CaseTag::ProductAboveNormSq),
            (1.0, -2.0, CaseTag::ProductNegative),
            (0.5, 0.5, CaseTag::ProductInsideNormSq),
            (-0.5, -0.5, CaseTag::ProductInsideNormSq),
        ];
        for (lambda, mu, expected) in cases {
            let q = BlockSymm::new(lambda, mu, b.clone()).unwrap();
            assert_eq!(case_of(&q, &t).unwrap(), expected, "({lambda}, {mu})");
            let (_, tag) = abs_block_symm(&q, &t).unwrap();
            assert_eq!(tag, expected);
        }
    }

    #[test]
    fn boundary_product_prefers_sign_scaled_case() {
        let t = tol();
        let b = ComplexMatrix::from_real(1, 1, &[1.0]).unwrap();
        // lambda*mu within rank_tol of ‖B‖² from below
        let q = BlockSymm::new(1.0, 1.0 - 1e-12, b).unwrap();
        assert_eq!(case_of(&q, &t).unwrap(), CaseTag::ProductAboveNormSq);
    }
}
