//! Rational (Cauchy) and Chebyshev approximants of a matrix-valued function.
//!
//! Both approximants share the form `T̃(z) = Σ_{i=0}^{m} B_i φ_i(z)`; only the
//! scalar basis differs:
//!
//! - rational: `φ_i(z) = 1/(z − σ_i)` with `B_i = ω_i T(σ_i)` from a contour
//!   quadrature rule;
//! - Chebyshev: `φ_i(z) = T_i(s(z))` on an interval `[a, b]` with `B_i` the
//!   interpolation coefficients at first-kind Chebyshev points.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, C64, ONE, ZERO};
use crate::quadrature::{chebyshev_points, chebyshev_t_all, Contour, Quadrature, QuadratureRule};

/// Relative distance to a pole below which evaluation is refused.
const POLE_RTOL: f64 = 1e-13;
/// Step scale of the central-difference derivative fallback.
const FD_STEP: f64 = 1e-7;

pub type MatrixFunction = dyn Fn(C64) -> DenseMatrix + Send + Sync;

/// An analytic matrix-valued function `T: ℂ → ℂ^{n×n}`.
#[derive(Clone)]
pub struct NlevpProblem {
    dim: usize,
    eval: Arc<MatrixFunction>,
    derivative: Option<Arc<MatrixFunction>>,
    /// `None` means entire.
    region: Option<Contour>,
}

impl fmt::Debug for NlevpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NlevpProblem")
            .field("dim", &self.dim)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("region", &self.region)
            .finish()
    }
}

impl NlevpProblem {
    pub fn new(dim: usize, eval: impl Fn(C64) -> DenseMatrix + Send + Sync + 'static) -> Self {
        Self {
            dim,
            eval: Arc::new(eval),
            derivative: None,
            region: None,
        }
    }

    pub fn with_derivative(mut self, derivative: impl Fn(C64) -> DenseMatrix + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Declares the region inside which `T` is analytic.
    pub fn with_region(mut self, region: Contour) -> Self {
        self.region = Some(region);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn region(&self) -> Option<&Contour> {
        self.region.as_ref()
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// `T(z)` without validation.
    pub fn eval(&self, z: C64) -> DenseMatrix {
        (self.eval)(z)
    }

    /// `T(z)`, or `None` when the evaluator returns a matrix of the wrong
    /// shape or with non-finite entries.
    pub fn try_eval(&self, z: C64) -> Option<DenseMatrix> {
        let t = (self.eval)(z);
        (t.rows() == self.dim && t.cols() == self.dim && t.is_finite()).then_some(t)
    }

    /// `T′(z)`: analytic when provided, else a central difference with step
    /// `1e-7·(1 + |z|)`.
    pub fn derivative(&self, z: C64) -> DenseMatrix {
        match &self.derivative {
            Some(d) => d(z),
            None => {
                let h = FD_STEP * (1.0 + z.norm());
                let hc = C64::new(h, 0.0);
                let mut out = self.eval(z + hc);
                out.add_scaled(-ONE, &self.eval(z - hc));
                out.scale(C64::new(0.5 / h, 0.0))
            }
        }
    }
}

/// The scalar basis of an approximant.
#[derive(Clone, Debug, PartialEq)]
pub enum Expansion {
    /// `φ_i(z) = 1/(z − σ_i)`
    Rational { poles: Vec<C64> },
    /// `φ_i(z) = T_i((2z − a − b)/(b − a))`
    Chebyshev { a: f64, b: f64 },
}

impl Expansion {
    /// `[φ_0(z), …, φ_m(z)]`.
    pub fn basis_values(&self, m: usize, z: C64) -> Result<Vec<C64>> {
        match self {
            Expansion::Rational { poles } => {
                debug_assert_eq!(poles.len(), m + 1);
                poles
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let d = z - s;
                        if d.norm() <= POLE_RTOL * (1.0 + s.norm()) {
                            Err(Error::PoleHit(i))
                        } else {
                            Ok(ONE / d)
                        }
                    })
                    .collect()
            }
            Expansion::Chebyshev { .. } => Ok(chebyshev_t_all(m, self.to_scaled(z))),
        }
    }

    /// Affine map to the variable the pencil is written in: identity for
    /// rational expansions, `s(z)` for Chebyshev.
    pub fn to_scaled(&self, z: C64) -> C64 {
        match *self {
            Expansion::Rational { .. } => z,
            Expansion::Chebyshev { a, b } => (z * 2.0 - (a + b)) / (b - a),
        }
    }

    pub fn from_scaled(&self, s: C64) -> C64 {
        match *self {
            Expansion::Rational { .. } => s,
            Expansion::Chebyshev { a, b } => (s * (b - a) + (a + b)) * 0.5,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Expansion::Rational { .. })
    }
}

/// Common interface of [`RationalApproximant`] and [`ChebyshevApproximant`].
pub trait Approximant: Send + Sync {
    fn dim(&self) -> usize;

    /// Coefficients `B_0..B_m`.
    fn coefficients(&self) -> &[DenseMatrix];

    fn expansion(&self) -> Expansion;

    /// The order `m` (one less than the number of coefficients).
    fn order(&self) -> usize {
        self.coefficients().len() - 1
    }

    fn eval(&self, z: C64) -> Result<DenseMatrix>;

    /// `T̃(z)·x` without forming `T̃(z)`.
    fn apply(&self, z: C64, x: &[C64]) -> Result<Vec<C64>> {
        let phi = self.expansion().basis_values(self.order(), z)?;
        let mut y = vec![ZERO; self.dim()];
        for (b, f) in self.coefficients().iter().zip(phi) {
            b.matvec_acc(f, x, &mut y);
        }
        Ok(y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalApproximant {
    pub coefficients: Vec<DenseMatrix>,
    pub poles: Vec<C64>,
    pub contour: Contour,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevApproximant {
    pub coefficients: Vec<DenseMatrix>,
    pub a: f64,
    pub b: f64,
}

/// `B_i = ω_i T(σ_i)` at the quadrature nodes.
pub fn build_rational(problem: &NlevpProblem, quad: &Quadrature) -> Result<RationalApproximant> {
    let coefficients = quad
        .nodes
        .par_iter()
        .zip(&quad.weights)
        .enumerate()
        .map(|(i, (s, w))| {
            problem
                .try_eval(*s)
                .map(|t| t.scale(*w))
                .ok_or(Error::EvaluationFailure(i))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RationalApproximant {
        coefficients,
        poles: quad.nodes.clone(),
        contour: quad.contour,
    })
}

/// `Σ B_i/(z − σ_i)`
pub fn eval_rational(r: &RationalApproximant, z: C64) -> Result<DenseMatrix> {
    let n = r.dim();
    let mut out = DenseMatrix::zeros(n, n);
    for (i, (b, s)) in r.coefficients.iter().zip(&r.poles).enumerate() {
        let d = z - s;
        if d.norm() <= POLE_RTOL * (1.0 + s.norm()) {
            return Err(Error::PoleHit(i));
        }
        out.add_scaled(ONE / d, b);
    }
    Ok(out)
}

impl Approximant for RationalApproximant {
    fn dim(&self) -> usize {
        self.coefficients.first().map_or(0, DenseMatrix::rows)
    }

    fn coefficients(&self) -> &[DenseMatrix] {
        &self.coefficients
    }

    fn expansion(&self) -> Expansion {
        Expansion::Rational {
            poles: self.poles.clone(),
        }
    }

    fn eval(&self, z: C64) -> Result<DenseMatrix> {
        eval_rational(self, z)
    }
}

/// Interpolant of degree `m` at the `m + 1` first-kind Chebyshev points of
/// `interval`:
/// `B_i = (2 − δ_{i0})/(m+1) · Σ_k T(x_k) cos(iπ(k + ½)/(m+1))`.
pub fn build_chebyshev(problem: &NlevpProblem, interval: &Contour, m: usize) -> Result<ChebyshevApproximant> {
    let Contour::Interval { a, b } = *interval else {
        return Err(Error::InvalidContour(
            "Chebyshev interpolation needs an interval".into(),
        ));
    };
    let points = chebyshev_points(interval, m)?;
    let samples = points
        .par_iter()
        .enumerate()
        .map(|(k, &x)| problem.try_eval(C64::new(x, 0.0)).ok_or(Error::EvaluationFailure(k)))
        .collect::<Result<Vec<_>>>()?;
    let n = problem.dim();
    let count = (m + 1) as f64;
    let coefficients = (0..=m)
        .map(|i| {
            let mut acc = DenseMatrix::zeros(n, n);
            for (k, t) in samples.iter().enumerate() {
                let c = (i as f64 * PI * (k as f64 + 0.5) / count).cos();
                acc.add_scaled(C64::new(c, 0.0), t);
            }
            let factor = if i == 0 { 1.0 } else { 2.0 } / count;
            acc.scale(C64::new(factor, 0.0))
        })
        .collect();
    Ok(ChebyshevApproximant { coefficients, a, b })
}

/// Clenshaw evaluation of `Σ B_i τ_i(z)`.
pub fn eval_chebyshev(c: &ChebyshevApproximant, z: C64) -> DenseMatrix {
    let s = (z * 2.0 - (c.a + c.b)) / (c.b - c.a);
    let n = c.dim();
    let m = c.coefficients.len() - 1;
    let mut b1 = DenseMatrix::zeros(n, n);
    let mut b2 = DenseMatrix::zeros(n, n);
    for k in (1..=m).rev() {
        // b_k = B_k + 2s·b_{k+1} − b_{k+2}
        let mut bk = c.coefficients[k].clone();
        bk.add_scaled(s * 2.0, &b1);
        bk.add_scaled(-ONE, &b2);
        b2 = b1;
        b1 = bk;
    }
    let mut out = c.coefficients[0].clone();
    out.add_scaled(s, &b1);
    out.add_scaled(-ONE, &b2);
    out
}

impl Approximant for ChebyshevApproximant {
    fn dim(&self) -> usize {
        self.coefficients.first().map_or(0, DenseMatrix::rows)
    }

    fn coefficients(&self) -> &[DenseMatrix] {
        &self.coefficients
    }

    fn expansion(&self) -> Expansion {
        Expansion::Chebyshev { a: self.a, b: self.b }
    }

    fn eval(&self, z: C64) -> Result<DenseMatrix> {
        Ok(eval_chebyshev(self, z))
    }
}

/// `max_z ‖T̃(z) − T(z)‖_max` over the grid.
pub fn sup_error(approx: &dyn Approximant, problem: &NlevpProblem, grid: &[C64]) -> Result<f64> {
    grid.iter().enumerate().try_fold(0.0_f64, |acc, (k, &z)| {
        let t = problem.try_eval(z).ok_or(Error::EvaluationFailure(k))?;
        let mut diff = approx.eval(z)?;
        diff.add_scaled(-ONE, &t);
        Ok(acc.max(diff.norm_max()))
    })
}

/// 101 equispaced points on the middle half of the real diameter of a closed
/// contour, or on the whole of an interval.
pub fn default_grid(domain: &Contour) -> Vec<C64> {
    const POINTS: usize = 101;
    let (lo, hi) = match *domain {
        Contour::Interval { a, b } => (C64::new(a, 0.0), C64::new(b, 0.0)),
        _ => {
            let c = domain.center();
            let h = C64::new(0.5 * domain.extent(), 0.0);
            (c - h, c + h)
        }
    };
    (0..POINTS)
        .map(|k| lo + (hi - lo) * (k as f64 / (POINTS - 1) as f64))
        .collect()
}

/// Builds the approximant natural for `domain`: rational for a closed
/// contour (with `rule`), Chebyshev for an interval.
pub fn build_for_domain(
    problem: &NlevpProblem,
    domain: &Contour,
    rule: QuadratureRule,
    m: usize,
) -> Result<Box<dyn Approximant>> {
    if domain.is_closed_curve() {
        let quad = Quadrature::new(rule, *domain, m)?;
        Ok(Box::new(build_rational(problem, &quad)?))
    } else {
        Ok(Box::new(build_chebyshev(problem, domain, m)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    /// `(m, sup error)` pairs in input order.
    pub errors: Vec<(usize, f64)>,
    /// `exp` of the least-squares slope of `ln(error)` against `m`, fitted on
    /// the errors above the rounding floor; 0 when none are above it.
    pub ratio: f64,
    /// Errors at or below this level are treated as rounding noise.
    pub floor: f64,
}

impl DecayReport {
    pub fn is_decaying(&self) -> bool {
        self.ratio < 1.0
    }

    /// Per-unit-`m` ratios between consecutive entries above the floor.
    pub fn local_ratios(&self) -> Vec<f64> {
        self.errors
            .windows(2)
            .filter(|w| w[0].1 > self.floor && w[1].1 > self.floor)
            .map(|w| (w[1].1 / w[0].1).powf(1.0 / (w[1].0 - w[0].0) as f64))
            .collect()
    }
}

/// Relative rounding floor for [`decay_check`].
pub const DECAY_FLOOR_RTOL: f64 = 1e-12;

/// `exp` of the least-squares slope of `ln(error)` against `m` over the
/// errors above `floor`; 0 when fewer than two are above it.
pub fn fitted_ratio(errors: &[(usize, f64)], floor: f64) -> f64 {
    let fit: Vec<(f64, f64)> = errors
        .iter()
        .filter(|(_, e)| *e > floor)
        .map(|&(m, e)| (m as f64, e.ln()))
        .collect();
    if fit.len() < 2 {
        return 0.0;
    }
    let k = fit.len() as f64;
    let mx = fit.iter().map(|p| p.0).sum::<f64>() / k;
    let my = fit.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

/// Approximation error against order, with a fitted geometric rate.
pub fn decay_check(
    problem: &NlevpProblem,
    domain: &Contour,
    rule: QuadratureRule,
    m_list: &[usize],
    grid: &[C64],
) -> Result<DecayReport> {
    if m_list.len() < 3 || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "decay_check needs a strictly increasing list of at least 3 orders".into(),
        ));
    }
    let scale = grid
        .iter()
        .enumerate()
        .try_fold(0.0_f64, |acc, (k, &z)| {
            problem
                .try_eval(z)
                .map(|t| acc.max(t.norm_max()))
                .ok_or(Error::EvaluationFailure(k))
        })?
        .max(f64::MIN_POSITIVE);
    let errors = m_list
        .iter()
        .map(|&m| {
            let approx = build_for_domain(problem, domain, rule, m)?;
            Ok((m, sup_error(approx.as_ref(), problem, grid)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = DECAY_FLOOR_RTOL * scale;
    let ratio = fitted_ratio(&errors, floor);
    Ok(DecayReport { errors, ratio, floor })
}
