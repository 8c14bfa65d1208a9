use crate::approx::NlevpProblem;
use crate::error::{Error, PartialRitz, Result};
use crate::linalg::random::seeded_vector;
use crate::linalg::vector::{axpy, dot, norm2, normalize};
use crate::linalg::{hessenberg_eig, hessenberg_eigvec, lu_factor, DenseMatrix, LuFactors, C64, ZERO};
use crate::pencil::{BlockVector, Pencil};
use crate::quadrature::Contour;
use crate::structured::StructuredFactorization;

use super::subspace::{build_approximant, factor_with_retry, stopping_functional};
use super::{filter_pairs, EigenResult, SolverConfig};

/// Stream of the Arnoldi start vector.
const START_STREAM: u64 = 0xa7_0001;
/// Relative size of `h_{j+1,j}` below which the Krylov space is invariant.
const BREAKDOWN_RTOL: f64 = 1e-14;

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64]) -> Result<Vec<C64>>;
}

impl LinearOperator for StructuredFactorization {
    fn dim(&self) -> usize {
        self.kind.dim()
    }

    fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        Ok(self.step(&BlockVector::new(self.kind, x.to_vec())?)?.data)
    }
}

/// `x ↦ A x` for an explicit matrix, or `x ↦ (A − σM)⁻¹ M x` for a pencil.
pub struct DenseOperator {
    matrix: DenseMatrix,
    lu: Option<LuFactors>,
}

impl DenseOperator {
    pub fn new(matrix: DenseMatrix) -> Self {
        Self { matrix, lu: None }
    }

    /// Shift-and-invert operator of a pencil, `shift` in the pencil variable.
    pub fn shift_invert(p: &Pencil, shift: C64) -> Result<Self> {
        let mut a = p.a.clone();
        a.add_scaled(-shift, &p.m);
        let lu = lu_factor(&a).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::SingularShift,
            other => other,
        })?;
        Ok(Self {
            matrix: p.m.clone(),
            lu: Some(lu),
        })
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        let y = self.matrix.matvec(x);
        match &self.lu {
            Some(lu) => lu.solve(&y),
            None => Ok(y),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RitzPair {
    /// Eigenvalue of the operator.
    pub mu: C64,
    /// Unit Ritz vector.
    pub vector: Vec<C64>,
    /// `|h_{j+1,j}|·|e_jᵀy|`
    pub estimate: f64,
}

fn sort_by_modulus(values: &mut [C64]) {
    values.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(x.re.total_cmp(&y.re))
            .then(x.im.total_cmp(&y.im))
    });
}

/// Ritz pairs of the `j × j` leading block of `h`, largest modulus first.
fn ritz_pairs(h: &DenseMatrix, j: usize, beta: f64, k: usize) -> Result<Vec<(C64, Vec<C64>, f64)>> {
    let hj = h.submatrix(0, 0, j, j);
    let mut values = hessenberg_eig(&hj, false)?.values;
    sort_by_modulus(&mut values);
    Ok(values
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, theta)| {
            let y = hessenberg_eigvec(&hj, theta, i as u64);
            let est = beta * y[j - 1].norm();
            (theta, y, est)
        })
        .collect())
}

/// Arnoldi with modified Gram-Schmidt (two passes) and no restarts. Stops
/// once the `k` Ritz values of largest modulus all satisfy
/// `|h_{j+1,j}|·|e_jᵀy| ≤ tol·|μ|`.
pub fn arnoldi_shift_invert(
    op: &dyn LinearOperator,
    k: usize,
    krylov_max: usize,
    tol: f64,
    seed: u64,
) -> Result<Vec<RitzPair>> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("Arnoldi: k = {k} must lie in 1..={n}")));
    }
    if krylov_max < 2 * k {
        return Err(Error::InvalidArgument(format!(
            "Arnoldi: krylov_max = {krylov_max} is below 2k = {}",
            2 * k
        )));
    }
    let kmax = krylov_max.min(n);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(kmax + 1);
    let mut v = seeded_vector(seed, START_STREAM, n);
    normalize(&mut v);
    basis.push(v);
    let mut h = DenseMatrix::zeros(kmax + 1, kmax);
    let mut scale = 0.0_f64;
    let mut last = Vec::new();
    for j in 0..kmax {
        let mut w = op.apply(&basis[j])?;
        scale = scale.max(norm2(&w));
        for _pass in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                h[(i, j)] += c;
                axpy(-c, q, &mut w);
            }
        }
        let beta = norm2(&w);
        h[(j + 1, j)] = C64::new(beta, 0.0);
        let breakdown = beta <= BREAKDOWN_RTOL * scale.max(f64::MIN_POSITIVE);
        if j + 1 >= k {
            let pairs = ritz_pairs(&h, j + 1, if breakdown { 0.0 } else { beta }, k)?;
            let done = pairs.len() == k && pairs.iter().all(|(mu, _, est)| *est <= tol * mu.norm());
            last = pairs;
            if done {
                return Ok(finish(&basis, &last, j + 1));
            }
        }
        if breakdown {
            break;
        }
        basis.push(w.into_iter().map(|x| x / beta).collect());
    }
    let dim = basis.len().min(kmax);
    let converged: Vec<RitzPair> = finish(&basis, &last, dim)
        .into_iter()
        .filter(|r| r.estimate <= tol * r.mu.norm())
        .collect();
    Err(Error::ArnoldiNoConvergence {
        achieved: converged.len(),
        partial: converged
            .into_iter()
            .map(|r| PartialRitz {
                mu: r.mu,
                vector: r.vector,
            })
            .collect(),
    })
}

fn finish(basis: &[Vec<C64>], pairs: &[(C64, Vec<C64>, f64)], j: usize) -> Vec<RitzPair> {
    pairs
        .iter()
        .map(|(mu, y, est)| {
            let n = basis[0].len();
            let mut x = vec![ZERO; n];
            for (q, c) in basis[..j].iter().zip(y) {
                axpy(*c, q, &mut x);
            }
            normalize(&mut x);
            RitzPair {
                mu: *mu,
                vector: x,
                estimate: *est,
            }
        })
        .collect()
}

/// Full-pencil pipeline: Arnoldi on the structured shift-and-invert
/// operator, `u` read off the Ritz vectors.
pub fn arnoldi_pipeline(problem: &NlevpProblem, cfg: &SolverConfig, domain: &Contour) -> Result<EigenResult> {
    cfg.validate()?;
    let approx = build_approximant(problem, cfg, domain)?;
    let (factorization, shift) = factor_with_retry(approx.as_ref(), cfg.shift_for(domain), domain)?;
    let ritz = arnoldi_shift_invert(&factorization, cfg.k, cfg.krylov_max(), cfg.tol, cfg.seed)?;
    let mut lambdas = Vec::with_capacity(ritz.len());
    let mut vectors = Vec::with_capacity(ritz.len());
    for r in &ritz {
        let w = BlockVector::new(factorization.kind, r.vector.clone())?;
        let mut u = w.u().to_vec();
        if normalize(&mut u) == 0.0 {
            continue;
        }
        lambdas.push(factorization.lambda_from_mu(r.mu));
        vectors.push(u);
    }
    let functional = stopping_functional(approx.as_ref(), &lambdas, &vectors)?;
    let candidates = lambdas.into_iter().zip(vectors).collect();
    Ok(EigenResult {
        pairs: filter_pairs(problem, candidates, domain, shift, cfg.tol)?,
        outer_iterations: 1,
        converged: true,
        history: vec![functional],
        shift,
    })
}
