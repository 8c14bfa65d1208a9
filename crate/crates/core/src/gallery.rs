//! Analytic test problems with independently computable spectra, and the
//! Newton trace oracle used as reference for problems without a closed form.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::approx::NlevpProblem;
use crate::error::{Error, Result};
use crate::linalg::random::{complex_normal_vec, rng};
use crate::linalg::{dense_eigvals, lu_factor, smallest_singular_value, DenseMatrix, C64, ONE, ZERO};
use crate::quadrature::Contour;

/// Newton steps below `NEWTON_STAGNATION·(1 + |z|)` end the iteration.
const NEWTON_STAGNATION: f64 = 1e-12;
const NEWTON_MAX_STEPS: usize = 200;
/// Roots closer than this are merged.
const DEDUP_TOL: f64 = 1e-8;
/// Power iterations per grid point of the singular value scan.
const SCAN_ITERATIONS: usize = 6;
/// Cap on deflated Newton restarts around known roots.
const DEFLATION_RUNS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    ClosedForm,
    CompanionEig,
    NewtonTrace,
}

#[derive(Clone, Debug)]
pub struct GalleryProblem {
    pub name: String,
    pub problem: NlevpProblem,
    /// Known eigenvalues, when they do not depend on a search region.
    pub reference: Option<Vec<C64>>,
    pub oracle: OracleKind,
}

impl GalleryProblem {
    /// Reference eigenvalues strictly inside `region`, from the stored list
    /// or from [`newton_trace_oracle`].
    pub fn reference_in(&self, region: &Contour, grid_density: usize) -> Result<Vec<C64>> {
        match &self.reference {
            Some(list) => {
                let mut inside: Vec<C64> = list.iter().copied().filter(|z| region.contains(*z)).collect();
                sort_complex(&mut inside);
                Ok(inside)
            }
            None => Ok(newton_trace_oracle(&self.problem, region, grid_density)?.roots),
        }
    }
}

fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// `T(z) = diag(z − ρ_1, …, z − ρ_k, 1, …, 1)`.
pub fn make_diagonal(roots: &[C64], n: usize) -> Result<GalleryProblem> {
    if n < roots.len() {
        return Err(Error::InvalidArgument(format!(
            "make_diagonal: n = {n} is smaller than the {} roots",
            roots.len()
        )));
    }
    let k = roots.len();
    let r = roots.to_vec();
    let problem = NlevpProblem::new(n, move |z| {
        DenseMatrix::from_diag(&(0..n).map(|i| r.get(i).map_or(ONE, |p| z - p)).collect::<Vec<_>>())
    })
    .with_derivative(move |_| {
        DenseMatrix::from_diag(&(0..n).map(|i| if i < k { ONE } else { ZERO }).collect::<Vec<_>>())
    });
    Ok(GalleryProblem {
        name: "diag".into(),
        problem,
        reference: Some(roots.to_vec()),
        oracle: OracleKind::ClosedForm,
    })
}

fn check_same_square(mats: &[&DenseMatrix], context: &'static str) -> Result<usize> {
    let n = mats[0].rows();
    for m in mats {
        if !m.is_square() || m.rows() != n {
            return Err(Error::DimensionMismatch {
                context,
                expected: n,
                found: if m.rows() != n { m.rows() } else { m.cols() },
            });
        }
    }
    Ok(n)
}

/// `T(z) = z²M₂ + zC₁ + K₀`, with the spectrum taken from the companion
/// matrix `[[0, I], [−M₂⁻¹K₀, −M₂⁻¹C₁]]`.
pub fn make_quadratic(m2: &DenseMatrix, c1: &DenseMatrix, k0: &DenseMatrix) -> Result<GalleryProblem> {
    let n = check_same_square(&[m2, c1, k0], "make_quadratic (coefficient sizes)")?;
    let lu = lu_factor(m2).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularLeading,
        other => other,
    })?;
    let mk = lu.solve_matrix(k0)?;
    let mc = lu.solve_matrix(c1)?;
    let mut companion = DenseMatrix::zeros(2 * n, 2 * n);
    companion.set_scaled_identity(0, n, n, ONE);
    companion.set_block(n, 0, &mk.scale(-ONE));
    companion.set_block(n, n, &mc.scale(-ONE));
    let mut reference = dense_eigvals(&companion)?;
    sort_complex(&mut reference);
    let (a, b, c) = (m2.clone(), c1.clone(), k0.clone());
    let (a2, b2) = (m2.clone(), c1.clone());
    let problem = NlevpProblem::new(n, move |z| {
        let mut t = c.clone();
        t.add_scaled(z, &b);
        t.add_scaled(z * z, &a);
        t
    })
    .with_derivative(move |z| {
        let mut t = b2.clone();
        t.add_scaled(z * 2.0, &a2);
        t
    });
    Ok(GalleryProblem {
        name: "quadratic".into(),
        problem,
        reference: Some(reference),
        oracle: OracleKind::CompanionEig,
    })
}

/// `T(z) = −zI + A₀ + A₁e^{−τz}`.
pub fn make_delay(a0: &DenseMatrix, a1: &DenseMatrix, tau: f64) -> Result<GalleryProblem> {
    let n = check_same_square(&[a0, a1], "make_delay (coefficient sizes)")?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "make_delay: tau must be positive, got {tau}"
        )));
    }
    let (a, b) = (a0.clone(), a1.clone());
    let b2 = a1.clone();
    let problem = NlevpProblem::new(n, move |z| {
        let mut t = a.clone();
        for i in 0..n {
            t[(i, i)] -= z;
        }
        t.add_scaled((-z * tau).exp(), &b);
        t
    })
    .with_derivative(move |z| {
        let mut t = b2.scale(-(-z * tau).exp() * tau);
        for i in 0..n {
            t[(i, i)] -= ONE;
        }
        t
    });
    Ok(GalleryProblem {
        name: "delay".into(),
        problem,
        reference: None,
        oracle: OracleKind::NewtonTrace,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutcome {
    /// Distinct roots inside the region, sorted by real then imaginary part.
    pub roots: Vec<C64>,
    /// Grid seeds whose Newton iteration failed.
    pub dropped: Vec<C64>,
}

/// `z ← z − 1/tr(T(z)⁻¹T′(z))` until the step stagnates below `1e-12`.
pub fn newton_refine(problem: &NlevpProblem, z0: C64) -> Result<C64> {
    newton_deflated(problem, z0, &[])
}

/// Newton on `det T(z)/Π(z − r)` over the already `found` roots, whose
/// logarithmic derivative is `tr(T⁻¹T′) − Σ 1/(z − r)`.
fn newton_deflated(problem: &NlevpProblem, z0: C64, found: &[C64]) -> Result<C64> {
    let mut z = z0;
    for _ in 0..NEWTON_MAX_STEPS {
        let t = problem.eval(z);
        let Ok(lu) = lu_factor(&t) else {
            return Ok(z);
        };
        let x = lu.solve_matrix(&problem.derivative(z))?;
        let mut trace = x.trace();
        for r in found {
            trace -= ONE / (z - r);
        }
        if trace == ZERO || !trace.re.is_finite() || !trace.im.is_finite() {
            return Err(Error::OracleNoConvergence(z0));
        }
        let step = ONE / trace;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::OracleNoConvergence(z0));
        }
        if step.norm() <= NEWTON_STAGNATION * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Err(Error::OracleNoConvergence(z0))
}

/// Roots of `det T` inside `region`: local minima of `σ_min(T(z))/‖T(z)‖`
/// on a `density × density` grid over the bounding box seed Newton's method
/// on `d/dz log det T(z)`.
pub fn newton_trace_oracle(problem: &NlevpProblem, region: &Contour, grid_density: usize) -> Result<OracleOutcome> {
    region.validate()?;
    let g = grid_density.max(3);
    let (x0, x1, y0, y1) = region.bounding_box();
    let point = |i: usize, j: usize| {
        C64::new(
            x0 + (x1 - x0) * i as f64 / (g - 1) as f64,
            y0 + (y1 - y0) * j as f64 / (g - 1) as f64,
        )
    };
    let values: Vec<f64> = (0..g * g)
        .into_par_iter()
        .map(|idx| {
            let z = point(idx / g, idx % g);
            let t = problem.eval(z);
            smallest_singular_value(&t, SCAN_ITERATIONS) / t.norm_fro().max(f64::MIN_POSITIVE)
        })
        .collect();
    let mut seeds = Vec::new();
    for i in 0..g {
        for j in 0..g {
            let v = values[i * g + j];
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ni < 0 || nj < 0 || ni >= g as i64 || nj >= g as i64 {
                        continue;
                    }
                    let w = values[ni as usize * g + nj as usize];
                    // ties broken by index so that plateaus yield one seed
                    if w < v || (w == v && (ni, nj) < (i as i64, j as i64)) {
                        is_min = false;
                    }
                }
            }
            if is_min {
                seeds.push(point(i, j));
            }
        }
    }
    let refined: Vec<std::result::Result<C64, C64>> = seeds
        .par_iter()
        .map(|&s| newton_refine(problem, s).map_err(|_| s))
        .collect();
    let mut roots: Vec<C64> = Vec::new();
    let mut dropped = Vec::new();
    let is_new = |roots: &[C64], z: C64| roots.iter().all(|x| (x - z).norm() > DEDUP_TOL);
    for r in refined {
        match r {
            Ok(z) if region.contains(z) => {
                if is_new(&roots, z) {
                    roots.push(z);
                }
            }
            Ok(_) => {}
            Err(seed) => dropped.push(seed),
        }
    }
    // Clustered roots share a basin at grid resolution. Restart next to
    // every known root with the known ones deflated until nothing new turns up.
    let offset = 0.5 * (x1 - x0).max(y1 - y0) / (g - 1) as f64;
    let mut next = 0;
    let mut runs = 0;
    while next < roots.len() && runs < DEFLATION_RUNS {
        let center = roots[next];
        next += 1;
        for q in 0..4 {
            runs += 1;
            let start = center + C64::from_polar(offset, PI / 4.0 + q as f64 * PI / 2.0);
            if let Ok(z) = newton_deflated(problem, start, &roots) {
                if region.contains(z) && is_new(&roots, z) {
                    roots.push(z);
                }
            }
        }
    }
    sort_complex(&mut roots);
    Ok(OracleOutcome { roots, dropped })
}

/// `n` points with modulus in `[lo, hi]·radius` around `center`, drawn from
/// a seeded generator.
fn annulus_points(g: &mut impl Rng, count: usize, center: C64, radius: f64, lo: f64, hi: f64) -> Vec<C64> {
    (0..count)
        .map(|_| {
            let r = radius * (lo + (hi - lo) * g.random::<f64>());
            let t = 2.0 * PI * g.random::<f64>();
            center + C64::from_polar(r, t)
        })
        .collect()
}

/// `V·diag(d)·V⁻¹` with `V = I + 0.1·G/√n` for a seeded Gaussian `G`.
fn similar_to_diagonal(g: &mut impl Rng, d: &[C64]) -> Result<DenseMatrix> {
    let n = d.len();
    let mut v = DenseMatrix::from_vec(n, n, complex_normal_vec(g, n * n)).scale(C64::new(0.1 / (n as f64).sqrt(), 0.0));
    for i in 0..n {
        v[(i, i)] += ONE;
    }
    let v_inv = lu_factor(&v)?.solve_matrix(&DenseMatrix::identity(n))?;
    Ok(v.matmul(&DenseMatrix::from_diag(d)).matmul(&v_inv))
}

/// Delay problem with `inside` eigenvalues of `A₀` within `0.25·radius` of
/// `center`, the others between `2.5` and `4` radii away, and a small
/// delayed term `A₁ = 0.05·G/√n`, `τ = 1`.
pub fn random_delay(n: usize, inside: usize, center: C64, radius: f64, seed: u64) -> Result<GalleryProblem> {
    if inside > n || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "random_delay: need 1 <= n and inside <= n, got n = {n}, inside = {inside}"
        )));
    }
    let mut g = rng(seed, 0xde1a);
    let mut d = annulus_points(&mut g, inside, center, radius, 0.0, 0.25);
    d.extend(annulus_points(&mut g, n - inside, center, radius, 2.5, 4.0));
    let a0 = similar_to_diagonal(&mut g, &d)?;
    let a1 =
        DenseMatrix::from_vec(n, n, complex_normal_vec(&mut g, n * n)).scale(C64::new(0.05 / (n as f64).sqrt(), 0.0));
    make_delay(&a0, &a1, 1.0)
}

/// `(zI − X)(zI − Y)` with `inside` eigenvalues of `X` within
/// `0.25·radius` of `center` and every other eigenvalue of `X` and `Y`
/// between `2.5` and `4` radii away.
pub fn random_quadratic(n: usize, inside: usize, center: C64, radius: f64, seed: u64) -> Result<GalleryProblem> {
    if inside > n || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "random_quadratic: need 1 <= n and inside <= n, got n = {n}, inside = {inside}"
        )));
    }
    let mut g = rng(seed, 0x9ad);
    let mut dx = annulus_points(&mut g, inside, center, radius, 0.0, 0.25);
    dx.extend(annulus_points(&mut g, n - inside, center, radius, 2.5, 4.0));
    let dy = annulus_points(&mut g, n, center, radius, 2.5, 4.0);
    let x = similar_to_diagonal(&mut g, &dx)?;
    let y = similar_to_diagonal(&mut g, &dy)?;
    let mut c1 = x.clone();
    c1.add_scaled(ONE, &y);
    make_quadratic(&DenseMatrix::identity(n), &c1.scale(-ONE), &x.matmul(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::smallest_singular_value;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn unit_disk() -> Contour {
        Contour::circle(ZERO, 1.0).unwrap()
    }

    fn passes_singularity_test(p: &NlevpProblem, z: C64) -> bool {
        let t = p.eval(z);
        smallest_singular_value(&t, 20) <= 1e-10 * t.norm_fro().max(1.0)
    }

    #[test]
    fn diagonal_examples() {
        let g = make_diagonal(&[c(0.2)], 1).unwrap();
        assert_eq!(g.problem.eval(c(0.2))[(0, 0)], ZERO);
        let g = make_diagonal(&[C64::new(0.0, 0.5), C64::new(0.0, -0.5)], 3).unwrap();
        assert_eq!(g.reference_in(&unit_disk(), 50).unwrap().len(), 2);
        let g = make_diagonal(&[], 2).unwrap();
        assert!(g.reference_in(&unit_disk(), 50).unwrap().is_empty());
        assert!(make_diagonal(&[ONE, ONE], 1).is_err());
    }

    #[test]
    fn quadratic_examples() {
        let i2 = DenseMatrix::identity(2);
        let g = make_quadratic(&i2, &DenseMatrix::zeros(2, 2), &i2.scale(-ONE)).unwrap();
        let r = g.reference.unwrap();
        assert_eq!(r.iter().filter(|z| (*z - ONE).norm() < 1e-12).count(), 2);
        assert_eq!(r.iter().filter(|z| (*z + ONE).norm() < 1e-12).count(), 2);

        let one = DenseMatrix::scalar(ONE);
        let g = make_quadratic(&one, &one, &DenseMatrix::scalar(c(0.25))).unwrap();
        for z in g.reference.unwrap() {
            assert!((z + c(0.5)).norm() < 1e-7, "{z}");
        }
        assert!(matches!(
            make_quadratic(&DenseMatrix::zeros(1, 1), &one, &one),
            Err(Error::SingularLeading)
        ));
    }

    #[test]
    fn delay_reduces_to_linear_without_delay_term() {
        let a0 = DenseMatrix::from_diag(&[c(1.0), c(2.0)]);
        let g = make_delay(&a0, &DenseMatrix::zeros(2, 2), 1.0).unwrap();
        let region = Contour::circle(c(1.5), 1.0).unwrap();
        let roots = g.reference_in(&region, 40).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - c(1.0)).norm() < 1e-12 && (roots[1] - c(2.0)).norm() < 1e-12);
    }

    #[test]
    fn omega_constant_from_scalar_delay() {
        let g = make_delay(&DenseMatrix::zeros(1, 1), &DenseMatrix::scalar(ONE), 1.0).unwrap();
        let roots = g.reference_in(&Contour::circle(c(0.5), 0.4).unwrap(), 40).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - c(0.567_143_290_409_783_8)).norm() < 1e-12);
    }

    #[test]
    fn two_by_two_delay_oracle() {
        let a0 = DenseMatrix::from_real(2, 2, &[-1.0, 1.0, 0.0, -2.0]);
        let g = make_delay(&a0, &DenseMatrix::identity(2).scale(c(0.1)), 1.0).unwrap();
        let roots = g.reference_in(&Contour::circle(c(-1.5), 0.9).unwrap(), 50).unwrap();
        assert_eq!(roots.len(), 2, "{roots:?}");
        // A₀ is triangular, so each root solves a scalar equation −z − a + 0.1e^{−z} = 0
        for (z, a) in roots.iter().zip([2.0, 1.0]) {
            assert!((-z - c(a) + (-z).exp() * 0.1).norm() < 1e-12, "{z}");
        }
        for z in roots {
            assert!(passes_singularity_test(&g.problem, z));
        }
    }

    #[test]
    fn oracle_recovers_diagonal_roots() {
        let g = make_diagonal(&[c(0.2), c(-0.3)], 3).unwrap();
        let out = newton_trace_oracle(&g.problem, &unit_disk(), 50).unwrap();
        assert_eq!(out.roots.len(), 2);
        assert!((out.roots[0] - c(-0.3)).norm() < 1e-12);
        assert!((out.roots[1] - c(0.2)).norm() < 1e-12);
    }

    #[test]
    fn oracle_matches_dense_eig_for_linear_pencil() {
        let a = DenseMatrix::from_vec(
            3,
            3,
            complex_normal_vec(&mut rng(4, 0), 9)
                .into_iter()
                .map(|x| x * 0.3)
                .collect(),
        );
        let a2 = a.clone();
        let p = NlevpProblem::new(3, move |z| {
            let mut t = a2.scale(-ONE);
            for i in 0..3 {
                t[(i, i)] += z;
            }
            t
        });
        let region = Contour::circle(ZERO, 2.0).unwrap();
        let mut eig: Vec<C64> = dense_eigvals(&a)
            .unwrap()
            .into_iter()
            .filter(|z| region.contains(*z))
            .collect();
        sort_complex(&mut eig);
        let out = newton_trace_oracle(&p, &region, 60).unwrap();
        assert_eq!(out.roots.len(), eig.len());
        for (x, y) in out.roots.iter().zip(&eig) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn oracle_on_empty_region() {
        let g = make_diagonal(&[c(5.0)], 2).unwrap();
        assert!(newton_trace_oracle(&g.problem, &unit_disk(), 30)
            .unwrap()
            .roots
            .is_empty());
    }

    #[test]
    fn companion_and_newton_oracles_agree() {
        let g = random_quadratic(4, 3, ZERO, 1.0, 11).unwrap();
        let companion = g.reference_in(&unit_disk(), 50).unwrap();
        assert_eq!(companion.len(), 3);
        let newton = newton_trace_oracle(&g.problem, &unit_disk(), 50).unwrap().roots;
        assert_eq!(newton.len(), companion.len());
        for (x, y) in newton.iter().zip(&companion) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn random_instances_have_valid_references() {
        let g = random_delay(6, 3, C64::new(0.5, 0.0), 1.0, 5).unwrap();
        let region = Contour::circle(C64::new(0.5, 0.0), 1.0).unwrap();
        let roots = g.reference_in(&region, 50).unwrap();
        assert_eq!(roots.len(), 3, "{roots:?}");
        for z in &roots {
            assert!(passes_singularity_test(&g.problem, *z));
            assert!((z - C64::new(0.5, 0.0)).norm() < 0.35);
        }
        let q = random_quadratic(5, 2, ZERO, 1.0, 6).unwrap();
        for z in q.reference.as_ref().unwrap() {
            assert!(passes_singularity_test(&q.problem, *z), "{z}");
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let g = random_delay(3, 2, ZERO, 1.0, 8).unwrap();
        let z = C64::new(0.2, -0.1);
        let fd = NlevpProblem::new(3, {
            let p = g.problem.clone();
            move |z| p.eval(z)
        });
        assert!((&g.problem.derivative(z) - &fd.derivative(z)).norm_max() < 1e-7);
    }
}
