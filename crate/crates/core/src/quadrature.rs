//! Contours, quadrature rules for the Cauchy integral, and Chebyshev points
//! and polynomials.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};

/// Bernstein-ellipse parameter used as the "interior" of an interval domain
/// when filtering eigenvalues.
const INTERVAL_CONTAINMENT_RHO: f64 = 1.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contour {
    Circle {
        center: C64,
        radius: f64,
    },
    /// Axis-aligned: `z(θ) = c + r_x cos θ + i r_y sin θ`.
    Ellipse {
        center: C64,
        semi_major: f64,
        semi_minor: f64,
    },
    Interval {
        a: f64,
        b: f64,
    },
}

impl Contour {
    pub fn circle(center: C64, radius: f64) -> Result<Self> {
        let c = Contour::Circle { center, radius };
        c.validate()?;
        Ok(c)
    }

    pub fn ellipse(center: C64, semi_major: f64, semi_minor: f64) -> Result<Self> {
        let c = Contour::Ellipse {
            center,
            semi_major,
            semi_minor,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let c = Contour::Interval { a, b };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Contour::Circle { center, radius } => {
                radius > 0.0 && radius.is_finite() && center.re.is_finite() && center.im.is_finite()
            }
            Contour::Ellipse {
                center,
                semi_major,
                semi_minor,
            } => {
                semi_major > 0.0
                    && semi_minor > 0.0
                    && semi_major.is_finite()
                    && semi_minor.is_finite()
                    && center.re.is_finite()
                    && center.im.is_finite()
            }
            Contour::Interval { a, b } => a.is_finite() && b.is_finite() && a < b,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidContour(format!("{self:?}")))
        }
    }

    pub fn center(&self) -> C64 {
        match *self {
            Contour::Circle { center, .. } | Contour::Ellipse { center, .. } => center,
            Contour::Interval { a, b } => C64::new(0.5 * (a + b), 0.0),
        }
    }

    /// Radius, semi-major axis, or half-width.
    pub fn extent(&self) -> f64 {
        match *self {
            Contour::Circle { radius, .. } => radius,
            Contour::Ellipse { semi_major, .. } => semi_major,
            Contour::Interval { a, b } => 0.5 * (b - a),
        }
    }

    /// `1 + |c| + r`, the scale used by relative tolerances on nodes.
    pub fn scale(&self) -> f64 {
        1.0 + self.center().norm() + self.extent()
    }

    pub fn is_closed_curve(&self) -> bool {
        !matches!(self, Contour::Interval { .. })
    }

    /// Point `z(θ)` of a closed contour.
    pub fn point(&self, theta: f64) -> Option<C64> {
        match *self {
            Contour::Circle { center, radius } => Some(center + C64::from_polar(radius, theta)),
            Contour::Ellipse {
                center,
                semi_major,
                semi_minor,
            } => Some(center + C64::new(semi_major * theta.cos(), semi_minor * theta.sin())),
            Contour::Interval { .. } => None,
        }
    }

    /// `z′(θ)` of a closed contour.
    pub fn tangent(&self, theta: f64) -> Option<C64> {
        match *self {
            Contour::Circle { radius, .. } => Some(C64::new(0.0, 1.0) * C64::from_polar(radius, theta)),
            Contour::Ellipse {
                semi_major, semi_minor, ..
            } => Some(C64::new(-semi_major * theta.sin(), semi_minor * theta.cos())),
            Contour::Interval { .. } => None,
        }
    }

    /// Maps `z` to the reference variable: `(z − c)/r` for a circle,
    /// the scaled Chebyshev variable `(2z − a − b)/(b − a)` for an interval.
    pub fn to_reference(&self, z: C64) -> C64 {
        match *self {
            Contour::Circle { center, radius } => (z - center) / radius,
            Contour::Ellipse {
                center,
                semi_major,
                semi_minor,
            } => {
                let d = z - center;
                C64::new(d.re / semi_major, d.im / semi_minor)
            }
            Contour::Interval { a, b } => (z * 2.0 - (a + b)) / (b - a),
        }
    }

    /// Strict interior test. For an interval the "interior" is the Bernstein
    /// ellipse with parameter 1.1 around `[a, b]`.
    pub fn contains(&self, z: C64) -> bool {
        let s = self.to_reference(z);
        match self {
            Contour::Circle { .. } | Contour::Ellipse { .. } => s.norm_sqr() < 1.0,
            Contour::Interval { .. } => {
                let rho = INTERVAL_CONTAINMENT_RHO;
                (s - ONE).norm() + (s + ONE).norm() < rho + 1.0 / rho
            }
        }
    }

    /// Bounding box `(re_min, re_max, im_min, im_max)` of the interior.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            Contour::Circle { center, radius } => (
                center.re - radius,
                center.re + radius,
                center.im - radius,
                center.im + radius,
            ),
            Contour::Ellipse {
                center,
                semi_major,
                semi_minor,
            } => (
                center.re - semi_major,
                center.re + semi_major,
                center.im - semi_minor,
                center.im + semi_minor,
            ),
            Contour::Interval { a, b } => {
                let rho = INTERVAL_CONTAINMENT_RHO;
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                let major = half * 0.5 * (rho + 1.0 / rho);
                let minor = half * 0.5 * (rho - 1.0 / rho);
                (mid - major, mid + major, -minor, minor)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    #[default]
    Trapezoid,
    GaussLegendre,
}

/// Nodes `σ_0..σ_m` on a closed contour with weights `ω_i` such that
/// `Σ ω_i f(σ_i)/(z − σ_i) ≈ (1/2πi)∮ f(t)/(t − z) dt` for `z` inside.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    pub contour: Contour,
    pub order: usize,
}

impl Quadrature {
    pub fn new(rule: QuadratureRule, contour: Contour, m: usize) -> Result<Self> {
        match rule {
            QuadratureRule::Trapezoid => trapezoid_rule(contour, m),
            QuadratureRule::GaussLegendre => gauss_legendre_rule(contour, m),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ ω_i/(z − σ_i)`, the discretized Cauchy integral of the constant 1.
    pub fn unit_sum(&self, z: C64) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(s, w)| w / (z - s)).sum()
    }
}

fn check_closed(contour: &Contour, m: usize) -> Result<()> {
    contour.validate()?;
    if !contour.is_closed_curve() {
        return Err(Error::InvalidContour("quadrature needs a circle or an ellipse".into()));
    }
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    Ok(())
}

/// Weight for parameter value `θ` with parameter-space weight `dθ`:
/// `ω = −z′(θ)·dθ/(2πi)`.
fn contour_weight(contour: &Contour, theta: f64, dtheta: f64) -> C64 {
    let tangent = contour.tangent(theta).expect("closed contour");
    -tangent * dtheta / C64::new(0.0, 2.0 * PI)
}

/// `m + 1` equispaced nodes `θ_j = 2πj/(m+1)`.
pub fn trapezoid_rule(contour: Contour, m: usize) -> Result<Quadrature> {
    check_closed(&contour, m)?;
    let count = m + 1;
    let dtheta = 2.0 * PI / count as f64;
    let (nodes, weights) = (0..count)
        .map(|j| {
            let theta = dtheta * j as f64;
            (
                contour.point(theta).expect("closed contour"),
                contour_weight(&contour, theta, dtheta),
            )
        })
        .unzip();
    Ok(Quadrature {
        nodes,
        weights,
        contour,
        order: m,
    })
}

/// `m + 1` Gauss-Legendre nodes on the parameter interval `[0, 2π]`.
pub fn gauss_legendre_rule(contour: Contour, m: usize) -> Result<Quadrature> {
    check_closed(&contour, m)?;
    let (x, w) = gauss_legendre(m + 1);
    let (nodes, weights) = x
        .iter()
        .zip(&w)
        .map(|(&xi, &wi)| {
            let theta = PI * (xi + 1.0);
            (
                contour.point(theta).expect("closed contour"),
                contour_weight(&contour, theta, PI * wi),
            )
        })
        .unzip();
    Ok(Quadrature {
        nodes,
        weights,
        contour,
        order: m,
    })
}

/// Gauss-Legendre nodes (ascending) and weights on `[−1, 1]`, computed by
/// Newton iteration on `P_count`.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// First-kind Chebyshev points `x_k = mid + half·cos(π(k + ½)/(m + 1))`,
/// `k = 0..=m`, on `[a, b]`.
pub fn chebyshev_points(interval: &Contour, m: usize) -> Result<Vec<f64>> {
    let Contour::Interval { a, b } = *interval else {
        return Err(Error::InvalidContour("Chebyshev points need an interval".into()));
    };
    interval.validate()?;
    if m < 1 {
        return Err(Error::InvalidOrder(m));
    }
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let count = (m + 1) as f64;
    Ok((0..=m)
        .map(|k| mid + half * (PI * (k as f64 + 0.5) / count).cos())
        .collect())
}

/// `τ_i(z) = T_i(s(z))` with `s(z) = (2z − a − b)/(b − a)`.
pub fn cheb_basis_eval(a: f64, b: f64, i: usize, z: C64) -> C64 {
    let s = (z * 2.0 - (a + b)) / (b - a);
    chebyshev_t(i, s)
}

/// `T_i(s)` by the three-term recurrence.
pub fn chebyshev_t(i: usize, s: C64) -> C64 {
    let (mut prev, mut cur) = (ONE, s);
    if i == 0 {
        return ONE;
    }
    for _ in 1..i {
        let next = s * cur * 2.0 - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[T_0(s), …, T_m(s)]`.
pub fn chebyshev_t_all(m: usize, s: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(ONE);
    if m >= 1 {
        out.push(s);
    }
    for k in 2..=m {
        let next = s * out[k - 1] * 2.0 - out[k - 2];
        out.push(next);
    }
    out
}
