//! Eigenvalue extraction: shift-and-invert Arnoldi on the structured
//! operator and the reduced (Rayleigh-Ritz) subspace iteration.

mod arnoldi;
mod subspace;

use serde::{Deserialize, Serialize};

pub use arnoldi::{arnoldi_pipeline, arnoldi_shift_invert, DenseOperator, LinearOperator, RitzPair};
pub use subspace::{
    build_approximant, build_subspace, factor_with_retry, project_coefficients, reduced_subspace_iteration,
    refine_expand, refresh_subspace, solve_reduced, stopping_functional, ReducedPair,
};

use crate::approx::NlevpProblem;
use crate::error::{Error, Result};
use crate::linalg::vector::norm2;
use crate::linalg::C64;
use crate::quadrature::{Contour, QuadratureRule};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Cauchy contour-integral rational approximant on a closed contour.
    #[default]
    Cauchy,
    /// Chebyshev interpolant on a real interval.
    Chebyshev,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub rule: QuadratureRule,
    /// Approximation order.
    pub m: usize,
    /// Subspace dimension `ν`.
    pub nu: usize,
    /// Inverse-power steps per subspace column.
    pub q: usize,
    /// Requested eigenvalue count.
    pub k: usize,
    pub tol: f64,
    pub max_outer: usize,
    /// Defaults to the center of the domain.
    pub shift: Option<C64>,
    pub seed: u64,
    /// Defaults to `max(4k, 40)`.
    pub krylov_max: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Cauchy,
            rule: QuadratureRule::Trapezoid,
            m: 25,
            nu: 20,
            q: 10,
            k: 6,
            tol: 1e-12,
            max_outer: 25,
            shift: None,
            seed: 0,
            krylov_max: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if self.k == 0 {
            return fail("k must be at least 1".into());
        }
        if self.k > self.nu {
            return fail(format!(
                "k = {} exceeds the subspace dimension nu = {}",
                self.k, self.nu
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return fail(format!("tol must be positive, got {}", self.tol));
        }
        if self.m < 2 {
            return fail(format!("m must be at least 2, got {}", self.m));
        }
        if self.q == 0 {
            return fail("q must be at least 1".into());
        }
        if self.max_outer == 0 {
            return fail("max_outer must be at least 1".into());
        }
        if let Some(kmax) = self.krylov_max {
            if kmax < 2 * self.k {
                return fail(format!("krylov_max = {kmax} is below 2k = {}", 2 * self.k));
            }
        }
        Ok(())
    }

    pub fn krylov_max(&self) -> usize {
        self.krylov_max.unwrap_or((4 * self.k).max(40))
    }

    pub fn shift_for(&self, domain: &Contour) -> C64 {
        self.shift.unwrap_or_else(|| domain.center())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub lambda: C64,
    pub u: Vec<C64>,
    /// `‖T(λ)u‖₂/‖u‖₂` against the original `T`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    /// Sorted by distance to the shift.
    pub pairs: Vec<Eigenpair>,
    pub outer_iterations: usize,
    pub converged: bool,
    /// Stopping functional after each outer iteration.
    pub history: Vec<f64>,
    pub shift: C64,
}

/// `‖T(λ)u‖₂/‖u‖₂`
pub fn residual(problem: &NlevpProblem, lambda: C64, u: &[C64]) -> Result<f64> {
    let nu = norm2(u);
    if nu == 0.0 {
        return Err(Error::ZeroVector);
    }
    let t = problem.eval(lambda);
    if t.cols() != u.len() {
        return Err(Error::DimensionMismatch {
            context: "residual (vector length)",
            expected: t.cols(),
            found: u.len(),
        });
    }
    Ok(norm2(&t.matvec(u)) / nu)
}

/// Keeps the pairs inside `domain` whose true residual is at most `√tol`,
/// sorted by distance to `shift`.
pub(crate) fn filter_pairs(
    problem: &NlevpProblem,
    candidates: Vec<(C64, Vec<C64>)>,
    domain: &Contour,
    shift: C64,
    tol: f64,
) -> Result<Vec<Eigenpair>> {
    let mut out = Vec::new();
    for (lambda, u) in candidates {
        if !domain.contains(lambda) {
            continue;
        }
        let r = residual(problem, lambda, &u)?;
        if r <= tol.sqrt() {
            out.push(Eigenpair { lambda, u, residual: r });
        }
    }
    out.sort_by(|a, b| {
        (a.lambda - shift)
            .norm()
            .total_cmp(&(b.lambda - shift).norm())
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    Ok(out)
}
