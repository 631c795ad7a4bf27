//! `blockabs`: block-operator absolute values, spectral parts, support
//! projections, and the J-projection calculus, driven from matrix
//! files. See `--help` for the command list and the README for the
//! file format.
//!
//! Exit codes: 0 success, 1 malformed input file, 2 precondition or
//! dimension errors (the library error name goes to stderr).

mod matfile;

use std::path::PathBuf;
use std::process::ExitCode;

use blockabs::absval::{abs_block_symm, BlockSymm};
use blockabs::krein::{
    decompose_pos_neg, is_j_projection, min_symmetry, positivity_vs_loewner, positivity_vs_range,
    projection_from_subspace, Idempotent, SymmetryMatrix,
};
use blockabs::linalg::{
    abs_oracle, neg_part_oracle, polar_partial_isometry, pos_part_oracle,
    support_projection_oracle,
};
use blockabs::suppproj::{
    neg_part_unit, pos_part, support_neg_part_unit, support_pos_part, support_unit, LambdaBlock,
};
use blockabs::testgen::{GenConfig, Generator};
use blockabs::{ComplexMatrix, Error, HermitianMatrix, Tolerance, C64};
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

#[derive(Parser)]
#[command(name = "blockabs", version, about = "Block-operator absolute values, support projections, and J-projection calculus")]
struct Cli {
    /// Override the comparison tolerance used for validation
    #[arg(long, global = true, value_name = "FLOAT", allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Also run the spectral oracle and append max_abs_dev to the summary
    #[arg(long, global = true)]
    verify: bool,

    /// Write the result matrix to this file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Absolute value of [[lambda I, B], [B*, mu I]]
    Abs {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
    },
    /// Positive part of S = [[lambda I, B], [B*, 0]]
    Pospart {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
    },
    /// Negative part of S = [[lambda I, B], [B*, 0]]
    Negpart {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
    },
    /// Support projection of S, its positive part, or its negative part
    Support {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_name = "FILE")]
        b: PathBuf,
        #[arg(long, value_enum)]
        of: SupportOf,
    },
    /// Minimal symmetry J with J E positive semidefinite
    Minsym {
        #[arg(long, value_name = "FILE")]
        e: PathBuf,
    },
    /// Report whether E is a J-projection, whether it is J-positive,
    /// and whether the two positivity criteria agree
    Jcheck {
        #[arg(long, value_name = "FILE")]
        e: PathBuf,
        #[arg(long, value_name = "FILE")]
        j: PathBuf,
    },
    /// Split a J-projection into J-positive and J-negative summands
    Jdecompose {
        #[arg(long, value_name = "FILE")]
        e: PathBuf,
        #[arg(long, value_name = "FILE")]
        j: PathBuf,
    },
    /// J-projection onto the span of the orthonormal columns of M
    Fromsubspace {
        #[arg(long, value_name = "FILE")]
        m: PathBuf,
        #[arg(long, value_name = "FILE")]
        j: PathBuf,
    },
    /// Generate a seeded random test matrix
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// RNG seed; BLOCKABS_SEED is read when the flag is absent
        #[arg(long, env = "BLOCKABS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        magnitude: f64,
        /// Real entries only
        #[arg(long)]
        real: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SupportOf {
    /// The block matrix S itself
    S,
    /// Its positive part
    SPlus,
    /// Its negative part
    SMinus,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Matrix,
    Hermitian,
    Psd,
    Unitary,
    Symmetry,
    Idempotent,
}

enum Failure {
    Malformed(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure::Malformed(msg)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Malformed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let t = match cli.tol {
        Some(x) if x.is_finite() && x > 0.0 => Tolerance::with_compare_tol(x),
        Some(x) => {
            return Err(Error::InvalidConfig {
                what: format!("tol must be positive and finite, got {x}"),
            }
            .into())
        }
        None => Tolerance::default(),
    };
    let (document, summary) = dispatch(&cli, &t)?;
    if let Some(doc) = document {
        match &cli.out {
            Some(path) => std::fs::write(path, doc)
                .map_err(|e| format!("{}: {e}", path.display()))?,
            None => print!("{doc}"),
        }
    }
    println!("{summary}");
    Ok(())
}

fn dispatch(cli: &Cli, t: &Tolerance) -> Result<(Option<String>, String), Failure> {
    match &cli.command {
        Command::Abs { lambda, mu, b } => {
            let b = matfile::read_matrix(b)?;
            let q = BlockSymm::new(*lambda, *mu, b)?;
            let (abs, tag) = abs_block_symm(&q, t)?;
            let mut summary = format!("abs: case={tag}");
            if cli.verify {
                let oracle = abs_oracle(&q.materialize())?;
                push_dev(&mut summary, &abs, &oracle);
            }
            Ok((Some(matfile::matrix_document(abs.matrix())), summary))
        }
        Command::Pospart { lambda, b } => {
            let b = matfile::read_matrix(b)?;
            let s = LambdaBlock::new(*lambda, b)?;
            let part = pos_part(&s, t)?;
            let mut summary = format!("pospart: lambda={}", matfile::format_f64(*lambda));
            if cli.verify {
                let oracle = pos_part_oracle(&s.materialize())?;
                push_dev(&mut summary, &part, &oracle);
            }
            Ok((Some(matfile::matrix_document(part.matrix())), summary))
        }
        Command::Negpart { lambda, b } => {
            let b = matfile::read_matrix(b)?;
            let part = negpart_total(*lambda, &b, t)?;
            let mut summary = format!("negpart: lambda={}", matfile::format_f64(*lambda));
            if cli.verify {
                let s = LambdaBlock::new(*lambda, b)?;
                let oracle = neg_part_oracle(&s.materialize())?;
                push_dev(&mut summary, &part, &oracle);
            }
            Ok((Some(matfile::matrix_document(part.matrix())), summary))
        }
        Command::Support { lambda, b, of } => {
            let b = matfile::read_matrix(b)?;
            let proj = match of {
                SupportOf::S => support_total(*lambda, &b, t)?,
                SupportOf::SPlus => support_pos_part(&LambdaBlock::new(*lambda, b.clone())?, t)?,
                SupportOf::SMinus => support_neg_total(*lambda, &b, t)?,
            };
            let of_name = match of {
                SupportOf::S => "s",
                SupportOf::SPlus => "s-plus",
                SupportOf::SMinus => "s-minus",
            };
            let mut summary = format!(
                "support: of={of_name} lambda={}",
                matfile::format_f64(*lambda)
            );
            if cli.verify {
                let s = LambdaBlock::new(*lambda, b)?;
                let target = match of {
                    SupportOf::S => s.materialize(),
                    SupportOf::SPlus => pos_part_oracle(&s.materialize())?,
                    SupportOf::SMinus => neg_part_oracle(&s.materialize())?,
                };
                let oracle = support_projection_oracle(&target, t)?;
                push_dev(&mut summary, &proj, &oracle);
            }
            Ok((Some(matfile::matrix_document(proj.matrix())), summary))
        }
        Command::Minsym { e } => {
            let e = Idempotent::new(matfile::read_matrix(e)?, t)?;
            let j = min_symmetry(&e, t)?;
            let mut summary = format!("minsym: dim={}", e.dim());
            if cli.verify {
                let edm = e.as_dmatrix();
                let esum = HermitianMatrix::symmetrized(edm + edm.adjoint());
                let p = support_projection_oracle(&pos_part_oracle(&esum)?, t)?;
                let n = e.dim();
                let oracle = HermitianMatrix::symmetrized(
                    p.as_dmatrix() * C64::new(2.0, 0.0) - DMatrix::<C64>::identity(n, n),
                );
                push_dev(&mut summary, j.hermitian(), &oracle);
            }
            Ok((Some(matfile::matrix_document(j.matrix())), summary))
        }
        Command::Jcheck { e, j } => {
            let e = Idempotent::new(matfile::read_matrix(e)?, t)?;
            let j = SymmetryMatrix::new(matfile::read_matrix(j)?, t)?;
            let summary = if is_j_projection(&e, &j, t)? {
                let (pos, loewner) = positivity_vs_loewner(&e, &j, t)?;
                let (pos2, range) = positivity_vs_range(&e, &j, t)?;
                format!(
                    "jcheck: is_j_projection=true is_j_positive={pos} \
                     loewner_dominates={loewner} loewner_agrees={} \
                     range_criterion={range} range_agrees={}",
                    pos == loewner,
                    pos2 == range
                )
            } else {
                "jcheck: is_j_projection=false".to_string()
            };
            Ok((None, summary))
        }
        Command::Jdecompose { e, j } => {
            let e = Idempotent::new(matfile::read_matrix(e)?, t)?;
            let j = SymmetryMatrix::new(matfile::read_matrix(j)?, t)?;
            let (q, r) = decompose_pos_neg(&e, &j, t)?;
            let mut summary = format!("jdecompose: dim={}", e.dim());
            if cli.verify {
                let jdm = j.as_dmatrix();
                let je = HermitianMatrix::symmetrized(jdm * e.as_dmatrix());
                let q_oracle = jdm * pos_part_oracle(&je)?.as_dmatrix();
                let r_oracle = -(jdm * neg_part_oracle(&je)?.as_dmatrix());
                let dev = max_abs_dev(q.as_dmatrix(), &q_oracle)
                    .max(max_abs_dev(r.as_dmatrix(), &r_oracle));
                summary.push_str(&format!(" max_abs_dev={}", matfile::format_f64(dev)));
            }
            Ok((
                Some(matfile::pair_document(q.matrix(), r.matrix())),
                summary,
            ))
        }
        Command::Fromsubspace { m, j } => {
            let m = matfile::read_matrix(m)?;
            let j = SymmetryMatrix::new(matfile::read_matrix(j)?, t)?;
            let e = projection_from_subspace(&m, &j, t)?;
            let mut summary = format!("fromsubspace: dim={} rank={}", e.dim(), m.cols());
            if cli.verify {
                let edm = e.as_dmatrix();
                let jdm = j.as_dmatrix();
                let fix = edm * m.as_dmatrix() - m.as_dmatrix();
                let symm = edm - jdm * edm.adjoint() * jdm;
                let dev = fix
                    .iter()
                    .chain(symm.iter())
                    .map(|z| z.norm())
                    .fold(0.0f64, f64::max);
                summary.push_str(&format!(" max_abs_dev={}", matfile::format_f64(dev)));
            }
            Ok((Some(matfile::matrix_document(e.matrix())), summary))
        }
        Command::Gen {
            kind,
            seed,
            dim,
            rows,
            cols,
            rank,
            magnitude,
            real,
        } => {
            let cfg = GenConfig {
                seed: *seed,
                magnitude: *magnitude,
                complex_enabled: !real,
                ..GenConfig::default()
            };
            let mut g = Generator::new(cfg)?;
            let (matrix, desc) = match kind {
                GenKind::Matrix => {
                    let r = bounded("rows", required("rows", *rows)?)?;
                    let c = bounded("cols", required("cols", *cols)?)?;
                    (g.matrix(r, c), format!("kind=matrix rows={r} cols={c}"))
                }
                GenKind::Hermitian => {
                    let d = bounded("dim", required("dim", *dim)?)?;
                    (
                        g.hermitian(d).into_matrix(),
                        format!("kind=hermitian dim={d}"),
                    )
                }
                GenKind::Psd => {
                    let d = bounded("dim", required("dim", *dim)?)?;
                    (g.psd(d).into_matrix(), format!("kind=psd dim={d}"))
                }
                GenKind::Unitary => {
                    let d = bounded("dim", required("dim", *dim)?)?;
                    (g.unitary(d), format!("kind=unitary dim={d}"))
                }
                GenKind::Symmetry => {
                    let d = bounded("dim", required("dim", *dim)?)?;
                    (
                        g.symmetry(d).matrix().clone(),
                        format!("kind=symmetry dim={d}"),
                    )
                }
                GenKind::Idempotent => {
                    let d = bounded("dim", required("dim", *dim)?)?;
                    let rk = rank.unwrap_or(d / 2);
                    let c = g.idempotent(d, rk)?;
                    (
                        c.assemble(t)?.matrix().clone(),
                        format!("kind=idempotent dim={d} rank={rk}"),
                    )
                }
            };
            Ok((
                Some(matfile::matrix_document(&matrix)),
                format!("gen: {desc} seed={seed}"),
            ))
        }
    }
}

fn required(name: &str, v: Option<usize>) -> Result<usize, Failure> {
    v.ok_or_else(|| {
        Error::InvalidConfig {
            what: format!("--{name} is required for this kind"),
        }
        .into()
    })
}

fn bounded(name: &str, v: usize) -> Result<usize, Failure> {
    if (1..=64).contains(&v) {
        Ok(v)
    } else {
        Err(Error::InvalidConfig {
            what: format!("{name} must be in 1..=64, got {v}"),
        }
        .into())
    }
}

fn max_abs_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0f64, f64::max)
}

fn push_dev(summary: &mut String, computed: &HermitianMatrix, oracle: &HermitianMatrix) {
    let dev = max_abs_dev(computed.as_dmatrix(), oracle.as_dmatrix());
    summary.push_str(&format!(" max_abs_dev={}", matfile::format_f64(dev)));
}

fn scaled_by_inv(lambda: f64, b: &ComplexMatrix) -> Result<ComplexMatrix, Error> {
    ComplexMatrix::from_dmatrix(b.as_dmatrix() / C64::new(lambda, 0.0))
}

fn negated(b: &ComplexMatrix) -> Result<ComplexMatrix, Error> {
    ComplexMatrix::from_dmatrix(-b.as_dmatrix())
}

fn scaled_herm(h: HermitianMatrix, s: f64) -> HermitianMatrix {
    HermitianMatrix::symmetrized(h.as_dmatrix() * C64::new(s, 0.0))
}

/// Negative part of `S = [[lambda I, B], [B*, 0]]` for any lambda,
/// reduced to the unit-coupling closed forms by exact scaling:
/// `S_lambda(B) = lambda S_1(B/lambda)` for nonzero lambda, and the
/// negative part of `S_0(B)` is the positive part of `S_0(-B)`.
fn negpart_total(
    lambda: f64,
    b: &ComplexMatrix,
    t: &Tolerance,
) -> Result<HermitianMatrix, Error> {
    if lambda == 0.0 {
        pos_part(&LambdaBlock::new(0.0, negated(b)?)?, t)
    } else if lambda == 1.0 {
        neg_part_unit(b, t)
    } else if lambda > 0.0 {
        Ok(scaled_herm(
            neg_part_unit(&scaled_by_inv(lambda, b)?, t)?,
            lambda,
        ))
    } else {
        let unit = LambdaBlock::new(1.0, scaled_by_inv(lambda, b)?)?;
        Ok(scaled_herm(pos_part(&unit, t)?, -lambda))
    }
}

/// Support projection of `S` for any lambda. Scaling by a nonzero
/// factor leaves the range unchanged; at lambda = 0 the range splits
/// into the ranges of `B` and `B*`.
fn support_total(
    lambda: f64,
    b: &ComplexMatrix,
    t: &Tolerance,
) -> Result<HermitianMatrix, Error> {
    if lambda == 0.0 {
        let v = polar_partial_isometry(b, t)?;
        let vdm = v.as_dmatrix();
        let onto_range_b = vdm.adjoint() * vdm;
        let onto_range_bstar = vdm * vdm.adjoint();
        let (n, m) = (onto_range_b.nrows(), onto_range_bstar.nrows());
        let mut out = DMatrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&onto_range_b);
        out.view_mut((n, n), (m, m)).copy_from(&onto_range_bstar);
        Ok(HermitianMatrix::symmetrized(out))
    } else if lambda == 1.0 {
        support_unit(b, t)
    } else {
        support_unit(&scaled_by_inv(lambda, b)?, t)
    }
}

/// Support projection of the negative part of `S` for any lambda,
/// through the same scaling reductions as [`negpart_total`].
fn support_neg_total(
    lambda: f64,
    b: &ComplexMatrix,
    t: &Tolerance,
) -> Result<HermitianMatrix, Error> {
    if lambda == 0.0 {
        support_pos_part(&LambdaBlock::new(0.0, negated(b)?)?, t)
    } else if lambda == 1.0 {
        support_neg_part_unit(b, t)
    } else if lambda > 0.0 {
        support_neg_part_unit(&scaled_by_inv(lambda, b)?, t)
    } else {
        support_pos_part(&LambdaBlock::new(1.0, scaled_by_inv(lambda, b)?)?, t)
    }
}
