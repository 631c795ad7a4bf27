//! Seeded random instances: matrices, idempotents, symmetries and
//! admissible symmetry pairs. Everything is driven by a ChaCha stream
//! cipher so a config reproduces the exact same sequence on any
//! platform.

use nalgebra::{DMatrix, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::krein::{CanonicalIdempotent, SymmetryMatrix};
use crate::linalg::{herm_eig, orthonormal_complement};
use crate::matrix::{ComplexMatrix, HermitianMatrix, C64};
use crate::tol::Tolerance;

/// Largest spectral norm allowed for generated coupling blocks; keeps
/// assembled idempotents well conditioned at every dimension.
const COUPLING_NORM_CAP: f64 = 10.0;

/// Configuration for the instance generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    /// Inclusive bounds for randomly drawn dimensions.
    pub dim_range: (usize, usize),
    /// Entries are drawn uniformly from `[-magnitude, magnitude]`.
    pub magnitude: f64,
    /// When false all generated entries are real.
    pub complex_enabled: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            dim_range: (1, 8),
            magnitude: 1.0,
            complex_enabled: true,
        }
    }
}

impl GenConfig {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.dim_range;
        if lo < 1 || hi < lo || hi > 64 {
            return Err(Error::InvalidConfig {
                what: format!("dimension range {lo}..={hi} must sit inside 1..=64"),
            });
        }
        if !(self.magnitude.is_finite() && self.magnitude > 0.0) {
            return Err(Error::InvalidConfig {
                what: format!("magnitude {} must be positive and finite", self.magnitude),
            });
        }
        Ok(())
    }
}

/// Stateful generator; instances drawn from the same config come out
/// identical in the same order.
pub struct Generator {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl Generator {
    pub fn new(cfg: GenConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Generator {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
        })
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    /// Uniform draw from the configured dimension range.
    pub fn dim(&mut self) -> usize {
        let (lo, hi) = self.cfg.dim_range;
        self.rng.gen_range(lo..=hi)
    }

    /// Uniform draw from `[lo, hi]`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.rng.gen()
    }

    /// Uniform index below `n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    fn entry(&mut self) -> C64 {
        let m = self.cfg.magnitude;
        let re = self.rng.gen_range(-m..=m);
        let im = if self.cfg.complex_enabled {
            self.rng.gen_range(-m..=m)
        } else {
            0.0
        };
        C64::new(re, im)
    }

    /// Dense matrix with uniform entries.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let entries: Vec<C64> = (0..rows * cols).map(|_| self.entry()).collect();
        ComplexMatrix::new(rows, cols, entries).expect("generated entries are finite")
    }

    /// Hermitian matrix `(M + M*)/2` from a uniform draw.
    pub fn hermitian(&mut self, n: usize) -> HermitianMatrix {
        let m = self.matrix(n, n);
        let dm = m.as_dmatrix();
        HermitianMatrix::symmetrized((dm + dm.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Positive semidefinite matrix `M M*` from a uniform draw.
    pub fn psd(&mut self, n: usize) -> HermitianMatrix {
        let m = self.matrix(n, n);
        let dm = m.as_dmatrix();
        HermitianMatrix::symmetrized(dm * dm.adjoint())
    }

    /// Haar-like unitary from the QR factor of a uniform draw.
    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        let m = self.matrix(n, n).into_dmatrix();
        let q = m.qr().q();
        ComplexMatrix::from_dmatrix(q).expect("orthonormal factor is finite")
    }

    /// Random symmetry `W diag(±1) W*`.
    pub fn symmetry(&mut self, n: usize) -> SymmetryMatrix {
        let w = self.unitary(n).into_dmatrix();
        let signs: Vec<f64> = (0..n).map(|_| if self.coin() { 1.0 } else { -1.0 }).collect();
        let d = HermitianMatrix::from_diagonal(&signs);
        let j = &w * d.as_dmatrix() * w.adjoint();
        SymmetryMatrix::new(
            ComplexMatrix::from_dmatrix(j).expect("conjugated sign pattern is finite"),
            &Tolerance::default(),
        )
        .expect("conjugated sign pattern is a symmetry")
    }

    /// Idempotent of prescribed dimension and rank, returned in
    /// canonical form with a random unitary frame. The coupling block
    /// has its spectral norm capped so assembly stays well conditioned.
    pub fn idempotent(&mut self, dim: usize, rank: usize) -> Result<CanonicalIdempotent> {
        if rank > dim {
            return Err(Error::Precondition {
                what: format!("rank {rank} exceeds dimension {dim}"),
            });
        }
        let mut e1 = self.matrix(rank, dim - rank).into_dmatrix();
        if rank > 0 && dim > rank {
            let top = herm_eig(&HermitianMatrix::symmetrized(&e1 * e1.adjoint()))?
                .max_eigenvalue()
                .max(0.0)
                .sqrt();
            if top > COUPLING_NORM_CAP {
                e1 *= C64::new(COUPLING_NORM_CAP / top, 0.0);
            }
        }
        let w = self.unitary(dim);
        CanonicalIdempotent::from_parts(w, ComplexMatrix::from_dmatrix(e1)?, &Tolerance::default())
    }

    /// Symmetry pair `(J1, J2)` with `J1 E1 = -E1 J2`, drawn with
    /// mixed signs. Built on the singular frame of the coupling block:
    /// a random sign per singular-value cluster acts as `+d` through
    /// `J1` and `-d` through `J2`, and the frames are completed by
    /// independent random symmetries on the orthogonal complements.
    pub fn admissible_pair(
        &mut self,
        c: &CanonicalIdempotent,
        tol: &Tolerance,
    ) -> Result<(SymmetryMatrix, SymmetryMatrix)> {
        self.pair_from_frame(c, tol, false)
    }

    /// Admissible pair with `J1 = I`, which makes the assembled
    /// symmetry dominate the minimal one and `JE` positive.
    pub fn positive_admissible_pair(
        &mut self,
        c: &CanonicalIdempotent,
        tol: &Tolerance,
    ) -> Result<(SymmetryMatrix, SymmetryMatrix)> {
        self.pair_from_frame(c, tol, true)
    }

    fn pair_from_frame(
        &mut self,
        c: &CanonicalIdempotent,
        tol: &Tolerance,
        positive: bool,
    ) -> Result<(SymmetryMatrix, SymmetryMatrix)> {
        let r = c.rank();
        let s = c.dim() - r;
        let e1 = c.e1().as_dmatrix();
        if r == 0 || s == 0 {
            let j1 = if positive {
                SymmetryMatrix::identity(r)
            } else {
                self.symmetry(r)
            };
            return Ok((j1, self.symmetry(s)));
        }
        let svd = SVD::new(e1.clone(), true, true);
        let u_all = svd.u.ok_or(Error::KernelFailure)?;
        let v_all = svd.v_t.ok_or(Error::KernelFailure)?.adjoint();
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        let cutoff = tol.rank_tol * (1.0 + sigma.first().copied().unwrap_or(0.0));
        let k = sigma.iter().take_while(|&&x| x > cutoff).count();

        // one sign per cluster of nearly equal singular values, so the
        // choice is stable under the arbitrary basis inside a cluster
        let mut signs = Vec::with_capacity(k);
        for i in 0..k {
            let new_cluster = i == 0 || sigma[i - 1] - sigma[i] > cutoff;
            let sign = if positive {
                1.0
            } else if new_cluster {
                if self.coin() {
                    1.0
                } else {
                    -1.0
                }
            } else {
                *signs.last().expect("cluster continuation follows a start")
            };
            signs.push(sign);
        }

        let mut u_k = DMatrix::zeros(r, k);
        let mut v_k = DMatrix::zeros(s, k);
        for (j, &i) in order.iter().take(k).enumerate() {
            u_k.set_column(j, &u_all.column(i));
            v_k.set_column(j, &v_all.column(i));
        }
        let d = HermitianMatrix::from_diagonal(&signs);

        let j1 = if positive {
            DMatrix::identity(r, r)
        } else {
            let u_0 = orthonormal_complement(&u_k, r)?;
            let f1 = self.symmetry(r - k);
            &u_k * d.as_dmatrix() * u_k.adjoint() + &u_0 * f1.as_dmatrix() * u_0.adjoint()
        };
        let v_0 = orthonormal_complement(&v_k, s)?;
        let f2 = self.symmetry(s - k);
        let j2 = &v_k * (d.as_dmatrix() * C64::new(-1.0, 0.0)) * v_k.adjoint()
            + &v_0 * f2.as_dmatrix() * v_0.adjoint();

        Ok((
            SymmetryMatrix::new(ComplexMatrix::from_dmatrix(j1)?, tol)?,
            SymmetryMatrix::new(ComplexMatrix::from_dmatrix(j2)?, tol)?,
        ))
    }
}
