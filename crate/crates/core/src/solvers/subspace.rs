use rayon::prelude::*;

use crate::approx::{build_chebyshev, build_rational, Approximant, Expansion, NlevpProblem};
use crate::error::{Error, Result, ResultExt};
use crate::linalg::random::seeded_vector;
use crate::linalg::vector::{norm2, normalize};
use crate::linalg::{orthonormalize, Basis, DenseMatrix, C64};
use crate::pencil::{assemble_reduced, pencil_eig_dense, BlockVector, PencilKind, PencilTag};
use crate::quadrature::{chebyshev_t_all, Contour, Quadrature};
use crate::structured::{factor_for, StructuredFactorization};

use super::{filter_pairs, EigenResult, Method, SolverConfig};

/// Base stream of the random subspace columns.
const SUBSPACE_STREAM: u64 = 0x5b5_0000;
/// Relative shift perturbation after a singular Schur complement.
const SHIFT_RETRY_RTOL: f64 = 1e-8;

/// A Ritz value with the `u` part of its refined eigenvector.
type RitzPair = (C64, Vec<C64>);

/// The approximant selected by `cfg.method` on `domain`.
pub fn build_approximant(problem: &NlevpProblem, cfg: &SolverConfig, domain: &Contour) -> Result<Box<dyn Approximant>> {
    domain.validate()?;
    match (cfg.method, domain.is_closed_curve()) {
        (Method::Cauchy, true) => {
            let quad = Quadrature::new(cfg.rule, *domain, cfg.m)?;
            Ok(Box::new(build_rational(problem, &quad)?))
        }
        (Method::Chebyshev, false) => Ok(Box::new(build_chebyshev(problem, domain, cfg.m)?)),
        (Method::Cauchy, false) => Err(Error::InvalidArgument(
            "the Cauchy method needs a closed contour, not an interval".into(),
        )),
        (Method::Chebyshev, true) => Err(Error::InvalidArgument(
            "the Chebyshev method needs an interval domain".into(),
        )),
    }
}

/// Structured factorization at `shift`. A singular Schur complement (the
/// shift is an eigenvalue of the approximant) is retried once with the
/// shift moved by `1e-8` times the domain extent.
pub fn factor_with_retry(
    approx: &dyn Approximant,
    shift: C64,
    domain: &Contour,
) -> Result<(StructuredFactorization, C64)> {
    let expansion = approx.expansion();
    match factor_for(approx.coefficients(), &expansion, shift) {
        Ok(f) => Ok((f, shift)),
        Err(Error::SingularSchur) => {
            let moved = shift + C64::new(SHIFT_RETRY_RTOL * domain.extent(), 0.0);
            factor_for(approx.coefficients(), &expansion, moved)
                .map(|f| (f, moved))
                .context(format!("factorization after moving the shift to {moved}"))
        }
        Err(e) => Err(e),
    }
}

/// `q` structured steps applied to a block of pencil vectors, with the
/// block orthonormalized after every step. Returns the `u` blocks of the
/// final iterates.
///
/// Orthonormalizing leaves the span of `ℋ^q W` unchanged, but keeps the
/// columns from collapsing onto the dominant eigenvector in floating point.
fn block_power(f: &StructuredFactorization, start: Vec<BlockVector>, q: usize) -> Result<Vec<Vec<C64>>> {
    let kind = f.kind;
    let mut block = start;
    for _ in 0..q {
        let stepped = block.par_iter().map(|w| f.step(w)).collect::<Result<Vec<_>>>()?;
        let columns: Vec<Vec<C64>> = stepped.into_iter().map(|w| w.data).collect();
        let basis = orthonormalize(&DenseMatrix::from_columns(&columns));
        block = (0..basis.rank())
            .map(|j| BlockVector::new(kind, basis.matrix().column(j)))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(block.into_iter().map(|w| w.u().to_vec()).collect())
}

fn orthonormal_columns(columns: Vec<Vec<C64>>, n: usize) -> Result<Basis> {
    if columns.len() > n {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {} exceeds the problem size {n}",
            columns.len()
        )));
    }
    Ok(orthonormalize(&DenseMatrix::from_columns(&columns)))
}

/// `ν` columns: the `u` parts of `q` inverse-power steps from seeded
/// standard-normal start vectors, orthonormalized.
pub fn build_subspace(f: &StructuredFactorization, nu: usize, q: usize, seed: u64) -> Result<Basis> {
    if nu == 0 || q == 0 {
        return Err(Error::InvalidArgument("build_subspace needs nu >= 1 and q >= 1".into()));
    }
    let dim = f.kind.dim();
    let start = (0..nu)
        .map(|j| BlockVector::new(f.kind, seeded_vector(seed, SUBSPACE_STREAM + j as u64, dim)))
        .collect::<Result<Vec<_>>>()?;
    let columns = block_power(f, start, q)?;
    orthonormal_columns(columns, f.kind.block_size)
}

/// Next outer subspace: the current Ritz pairs expanded to pencil vectors,
/// padded to `ν` columns with fresh random vectors, then `q` steps each.
pub fn refresh_subspace(
    f: &StructuredFactorization,
    ritz: &[(C64, Vec<C64>)],
    nu: usize,
    q: usize,
    seed: u64,
    outer: usize,
) -> Result<Basis> {
    let dim = f.kind.dim();
    let order = f.order();
    let start = (0..nu)
        .map(|j| {
            let fresh = || seeded_vector(seed, SUBSPACE_STREAM + ((outer as u64) << 24) + j as u64, dim);
            match ritz.get(j) {
                Some((lambda, u)) => match refine_expand(*lambda, u, &f.expansion, order) {
                    Ok(w) => BlockVector::new(f.kind, w.data),
                    Err(Error::PoleHit(_)) => BlockVector::new(f.kind, fresh()),
                    Err(e) => Err(e),
                },
                None => BlockVector::new(f.kind, fresh()),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let columns = block_power(f, start, q)?;
    orthonormal_columns(columns, f.kind.block_size)
}

/// `B̂_i = Uᴴ B_i U`
pub fn project_coefficients(u: &DenseMatrix, b: &[DenseMatrix]) -> Result<Vec<DenseMatrix>> {
    let uh = u.adjoint();
    b.iter()
        .map(|bi| {
            if !bi.is_square() || bi.rows() != u.rows() {
                return Err(Error::DimensionMismatch {
                    context: "project_coefficients (basis rows vs coefficient size)",
                    expected: u.rows(),
                    found: bi.rows(),
                });
            }
            Ok(uh.matmul(&bi.matmul(u)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPair {
    pub lambda: C64,
    /// `u` block of the reduced pencil eigenvector (length `ν`).
    pub y: Vec<C64>,
}

/// The `k` eigenpairs of the projected pencil nearest to `shift`.
pub fn solve_reduced(bhat: &[DenseMatrix], expansion: &Expansion, shift: C64, k: usize) -> Result<Vec<ReducedPair>> {
    let p = assemble_reduced(bhat, expansion)?;
    Ok(pencil_eig_dense(&p, shift, k)?
        .into_iter()
        .map(|e| ReducedPair {
            lambda: e.lambda,
            y: e.vector.u().to_vec(),
        })
        .collect())
}

/// The pencil vector of an approximate eigenpair: `v_i = u/(λ − σ_i)` for
/// rational expansions, `v_i = τ_i(s(λ)) u` for Chebyshev ones.
pub fn refine_expand(lambda: C64, u: &[C64], expansion: &Expansion, m: usize) -> Result<BlockVector> {
    let n = u.len();
    match expansion {
        Expansion::Rational { poles } => {
            let phi = expansion.basis_values(poles.len() - 1, lambda)?;
            let kind = PencilKind::new(PencilTag::CauchyFull, n, poles.len() - 1);
            let mut w = BlockVector::zeros(kind);
            for (i, f) in phi.iter().enumerate() {
                for (o, x) in w.block_mut(i).iter_mut().zip(u) {
                    *o = f * x;
                }
            }
            w.block_mut(kind.block_count - 1).copy_from_slice(u);
            Ok(w)
        }
        Expansion::Chebyshev { .. } => {
            if m < 2 {
                return Err(Error::OrderTooSmall(m));
            }
            let tau = chebyshev_t_all(m - 1, expansion.to_scaled(lambda));
            let kind = PencilKind::new(PencilTag::ChebyshevFull, n, m);
            let mut w = BlockVector::zeros(kind);
            for (i, t) in tau.iter().enumerate() {
                for (o, x) in w.block_mut(i).iter_mut().zip(u) {
                    *o = t * x;
                }
            }
            Ok(w)
        }
    }
}

/// `‖[T̃(λ_1)x_1, …, T̃(λ_k)x_k]‖_F`, which equals `‖Σ B_i X f_i(Λ)‖_F`.
/// Infinite when some `λ_j` is a pole.
pub fn stopping_functional(approx: &dyn Approximant, lambdas: &[C64], vectors: &[Vec<C64>]) -> Result<f64> {
    let mut total = 0.0;
    for (&lambda, x) in lambdas.iter().zip(vectors) {
        match approx.apply(lambda, x) {
            Ok(r) => total += norm2(&r).powi(2),
            Err(Error::PoleHit(_)) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(total.sqrt())
}

/// Reduced subspace iteration without restarts: build a subspace by
/// inverse-power steps, project, solve the small pencil, and refresh the
/// subspace from the Ritz pairs until the stopping functional reaches
/// `cfg.tol`.
pub fn reduced_subspace_iteration(problem: &NlevpProblem, cfg: &SolverConfig, domain: &Contour) -> Result<EigenResult> {
    cfg.validate()?;
    if cfg.nu > problem.dim() {
        return Err(Error::InvalidArgument(format!(
            "nu = {} exceeds the problem size n = {}",
            cfg.nu,
            problem.dim()
        )));
    }
    let approx = build_approximant(problem, cfg, domain).context("building the approximant")?;
    let (f, shift) = factor_with_retry(approx.as_ref(), cfg.shift_for(domain), domain)?;
    let expansion = approx.expansion();
    let mut history = Vec::with_capacity(cfg.max_outer);
    let mut current: Vec<RitzPair> = Vec::new();
    let mut best: Option<(f64, Vec<RitzPair>)> = None;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=cfg.max_outer {
        iterations = it;
        let basis = if it == 1 {
            build_subspace(&f, cfg.nu, cfg.q, cfg.seed)
        } else {
            refresh_subspace(&f, &current, cfg.nu, cfg.q, cfg.seed, it)
        }
        .context(format!("subspace construction in outer iteration {it}"))?;
        let bhat = project_coefficients(basis.matrix(), approx.coefficients())?;
        let k = cfg.k.min(cfg.nu * (approx.order() + 1));
        let reduced = solve_reduced(&bhat, &expansion, shift, k)
            .context(format!("reduced eigenproblem in outer iteration {it}"))?;
        current = reduced
            .into_iter()
            .map(|p| {
                let mut x = basis.expand(&p.y);
                normalize(&mut x);
                (p.lambda, x)
            })
            .collect();
        let lambdas: Vec<C64> = current.iter().map(|p| p.0).collect();
        let vectors: Vec<Vec<C64>> = current.iter().map(|p| p.1.clone()).collect();
        let value = stopping_functional(approx.as_ref(), &lambdas, &vectors)?;
        history.push(value);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, current.clone()));
        }
        if value <= cfg.tol {
            converged = true;
            break;
        }
    }
    let pairs = best.map(|b| b.1).unwrap_or_default();
    let result = EigenResult {
        pairs: filter_pairs(problem, pairs, domain, shift, cfg.tol)?,
        outer_iterations: iterations,
        converged,
        history,
        shift,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(result)))
    }
}
