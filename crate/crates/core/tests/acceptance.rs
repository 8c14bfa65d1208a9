//! Acceptance criteria. Runs as a plain binary and prints one PASS/FAIL
//! line per criterion; the process fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use nlevp::approx::{build_chebyshev, build_rational, sup_error, Approximant, Expansion, NlevpProblem};
use nlevp::gallery::{random_delay, random_quadratic, GalleryProblem};
use nlevp::linalg::random::{complex_normal_vec, rng};
use nlevp::linalg::{dense_eigvals, DenseMatrix, C64};
use nlevp::pencil::{
    assemble_cauchy, assemble_chebyshev, assemble_reduced, pencil_eigvals, BlockVector, Pencil, PencilTag,
};
use nlevp::quadrature::{chebyshev_points, chebyshev_t_all, trapezoid_rule, Contour, QuadratureRule};
use nlevp::solvers::{
    arnoldi_pipeline, project_coefficients, reduced_subspace_iteration, solve_reduced, Method, SolverConfig,
};
use nlevp::structured::factor_for;
use rand::Rng;

type Check = Result<String, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scalar(f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> NlevpProblem {
    NlevpProblem::new(1, move |z| DenseMatrix::scalar(f(z)))
}

// ---------------------------------------------------------------------------
// 1. trapezoid decay

fn trapezoid_decay() -> Check {
    let problem = scalar(|z| C64::new(1.0, 0.0) / (z - c(2.0, 0.0)));
    let circle = Contour::circle(c(0.0, 0.0), 1.0).map_err(|e| e.to_string())?;
    // |λ| ≤ 0.5: the real segment and the circle of radius 0.5
    let mut grid: Vec<C64> = (0..=100).map(|k| c(-0.5 + k as f64 / 100.0, 0.0)).collect();
    grid.extend((0..64).map(|k| C64::from_polar(0.5, 2.0 * std::f64::consts::PI * k as f64 / 64.0)));
    let floor = 1e-13;
    let mut errors = Vec::new();
    for m in (8..=48).step_by(4) {
        let q = trapezoid_rule(circle, m).map_err(|e| e.to_string())?;
        let r = build_rational(&problem, &q).map_err(|e| e.to_string())?;
        errors.push((m, sup_error(&r, &problem, &grid).map_err(|e| e.to_string())?));
    }
    ensure(errors.windows(2).all(|w| w[1].1 < w[0].1 || w[1].1 <= floor), || {
        format!("errors not decreasing: {errors:?}")
    })?;
    let local: Vec<f64> = errors
        .windows(2)
        .filter(|w| w[1].1 > floor)
        .map(|w| (w[1].1 / w[0].1).powf(1.0 / (w[1].0 - w[0].0) as f64))
        .collect();
    let fitted = nlevp::approx::fitted_ratio(&errors, floor);
    let worst = local.iter().copied().fold(0.0, f64::max);
    ensure(!local.is_empty() && worst <= 0.6 && fitted <= 0.6, || {
        format!("ratios too large: fitted {fitted:.3}, local {local:?}")
    })?;
    Ok(format!(
        "fitted ratio {fitted:.4}, worst local ratio {worst:.4} over {} steps above {floor:e}, error at m = 48: {:.2e}",
        local.len(),
        errors.last().unwrap().1
    ))
}

// ---------------------------------------------------------------------------
// 2. structured step against the dense solve

fn dense_step(p: &Pencil, shift: C64, w: &[C64]) -> Vec<C64> {
    let mut a = p.a.clone();
    a.add_scaled(-shift, &p.m);
    let rhs = p.m.matvec(w);
    nlevp::linalg::lu_factor(&a).unwrap().solve(&rhs).unwrap()
}

fn rel_diff(x: &[C64], y: &[C64]) -> f64 {
    let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let s: f64 = y.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    d / s.max(f64::MIN_POSITIVE)
}

fn structured_step_oracle() -> Check {
    let mut g = rng(2024, 2);
    let mut worst = [0.0_f64; 4];
    let mut vectors = 0;
    for trial in 0..10 {
        let n = g.random_range(1..=8usize);
        let m = g.random_range(2..=12usize);
        let b: Vec<DenseMatrix> = (0..=m)
            .map(|_| DenseMatrix::from_vec(n, n, complex_normal_vec(&mut g, n * n)))
            .collect();
        let circle = Contour::circle(c(0.2, -0.1), 1.5).unwrap();
        let q = trapezoid_rule(circle, m).unwrap();
        let rational = Expansion::Rational { poles: q.nodes.clone() };
        let cheb = Expansion::Chebyshev { a: -1.0, b: 2.0 };
        let shift = c(0.3, 0.4);
        let fr = factor_for(&b, &rational, shift).map_err(|e| format!("trial {trial}: {e}"))?;
        let fc = factor_for(&b, &cheb, c(0.5, 0.0)).map_err(|e| format!("trial {trial}: {e}"))?;
        let cases = [
            (assemble_cauchy(&b, &q.nodes).unwrap(), fr.clone(), shift),
            (
                assemble_chebyshev(&b, &Contour::interval(-1.0, 2.0).unwrap()).unwrap(),
                fc.clone(),
                c(0.0, 0.0),
            ),
            (assemble_reduced(&b, &rational).unwrap(), fr.into_reduced(), shift),
            (assemble_reduced(&b, &cheb).unwrap(), fc.into_reduced(), c(0.0, 0.0)),
        ];
        for (slot, (p, f, s)) in cases.iter().enumerate() {
            ensure(p.kind.tag == f.kind.tag, || format!("tag mismatch {:?}", p.kind.tag))?;
            for _ in 0..10 {
                let w = BlockVector::new(p.kind, complex_normal_vec(&mut g, p.dim())).unwrap();
                let fast = f.step(&w).map_err(|e| e.to_string())?;
                let d = rel_diff(&fast.data, &dense_step(p, *s, &w.data));
                worst[slot] = worst[slot].max(d);
                vectors += 1;
            }
        }
    }
    let tags = [
        PencilTag::CauchyFull,
        PencilTag::ChebyshevFull,
        PencilTag::CauchyReduced,
        PencilTag::ChebyshevReduced,
    ];
    let max = worst.iter().copied().fold(0.0, f64::max);
    ensure(max <= 1e-11, || format!("relative differences {worst:?} for {tags:?}"))?;
    Ok(format!(
        "{vectors} vectors ({} per kind), worst relative difference {max:.2e}",
        vectors / 4
    ))
}

// ---------------------------------------------------------------------------
// 3. scalar equivalence

fn poly_mul_linear(p: &[C64], root: C64) -> Vec<C64> {
    // coefficients in increasing degree
    let mut out = vec![c(0.0, 0.0); p.len() + 1];
    for (k, &a) in p.iter().enumerate() {
        out[k + 1] += a;
        out[k] -= a * root;
    }
    out
}

fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let scale = coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-15 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let comp = DenseMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -coeffs[deg - 1 - j] / lead
        } else if i == j + 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    dense_eigvals(&comp).unwrap()
}

fn newton_polish(f: impl Fn(C64) -> (C64, C64), mut z: C64) -> C64 {
    for _ in 0..50 {
        let (v, d) = f(z);
        if d == c(0.0, 0.0) {
            break;
        }
        let step = v / d;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn match_sets(a: &[C64], b: &[C64], radius: f64, tol: f64) -> Result<f64, String> {
    let mut worst = 0.0_f64;
    for (x, y, label) in [(a, b, "pencil"), (b, a, "oracle")] {
        for &z in x.iter().filter(|z| z.norm() <= radius) {
            let d = y.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
            let rel = d / z.norm().max(1.0);
            if rel > tol {
                return Err(format!("{label} root {z} has no partner (distance {d:.2e})"));
            }
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

fn scalar_equivalence() -> Check {
    let mut g = rng(77, 3);
    let mut worst = 0.0_f64;
    let mut compared = 0;
    for trial in 0..20 {
        let k = complex_normal_vec(&mut g, 4);
        let gamma: f64 = g.random_range(-1.0..1.0);
        let problem = scalar(move |z| k[0] * 0.3 + k[1] * z + k[2] * z * z * 0.5 + k[3] * (z * gamma).exp() * 0.2);
        let m = g.random_range(4..=12usize);
        let shift = c(0.11, 0.07);
        let radius = 3.0;

        // rational: numerator Σ b_i Π_{j≠i}(z − σ_j)
        let q = trapezoid_rule(Contour::circle(c(0.0, 0.0), 1.0).unwrap(), m).unwrap();
        let r = build_rational(&problem, &q).map_err(|e| e.to_string())?;
        let b: Vec<C64> = r.coefficients.iter().map(|x| x[(0, 0)]).collect();
        let mut num = vec![c(0.0, 0.0); m + 1];
        for (i, &bi) in b.iter().enumerate() {
            let mut p = vec![bi];
            for (j, &s) in q.nodes.iter().enumerate() {
                if j != i {
                    p = poly_mul_linear(&p, s);
                }
            }
            for (acc, v) in num.iter_mut().zip(p) {
                *acc += v;
            }
        }
        let f = |z: C64| {
            q.nodes
                .iter()
                .zip(&b)
                .fold((c(0.0, 0.0), c(0.0, 0.0)), |(v, d), (s, bi)| {
                    let t = C64::new(1.0, 0.0) / (z - s);
                    (v + bi * t, d - bi * t * t)
                })
        };
        let oracle: Vec<C64> = poly_roots(&num).into_iter().map(|z| newton_polish(f, z)).collect();
        let pencil = assemble_cauchy(&r.coefficients, &r.poles).unwrap();
        let eig = pencil_eigvals(&pencil, shift).map_err(|e| format!("trial {trial} cauchy: {e}"))?;
        worst = worst.max(match_sets(&eig, &oracle, radius, 1e-9).map_err(|e| format!("trial {trial} cauchy: {e}"))?);
        compared += eig.iter().filter(|z| z.norm() <= radius).count();

        // Chebyshev on [-1, 1]: Σ b_i T_i(s) in the monomial basis
        let ch = build_chebyshev(&problem, &Contour::interval(-1.0, 1.0).unwrap(), m).map_err(|e| e.to_string())?;
        let b: Vec<C64> = ch.coefficients.iter().map(|x| x[(0, 0)]).collect();
        let mut t_prev = vec![c(1.0, 0.0)];
        let mut t_cur = vec![c(0.0, 0.0), c(1.0, 0.0)];
        let mut mono = vec![c(0.0, 0.0); m + 1];
        mono[0] += b[0];
        for (i, bi) in b.iter().enumerate().skip(1) {
            for (acc, v) in mono.iter_mut().zip(&t_cur) {
                *acc += bi * v;
            }
            if i < m {
                let mut next = vec![c(0.0, 0.0); i + 2];
                for (k, v) in t_cur.iter().enumerate() {
                    next[k + 1] += v * 2.0;
                }
                for (k, v) in t_prev.iter().enumerate() {
                    next[k] -= v;
                }
                t_prev = std::mem::replace(&mut t_cur, next);
            }
        }
        let fcheb = |s: C64| {
            let t = chebyshev_t_all(m, s);
            // T_i′ = i U_{i−1}
            let mut u = vec![c(1.0, 0.0), s * 2.0];
            for i in 2..m {
                let next = s * 2.0 * u[i - 1] - u[i - 2];
                u.push(next);
            }
            let v = b.iter().zip(&t).fold(c(0.0, 0.0), |a, (bi, ti)| a + bi * ti);
            let d = (1..=m).fold(c(0.0, 0.0), |a, i| a + b[i] * u[i - 1] * i as f64);
            (v, d)
        };
        let oracle: Vec<C64> = poly_roots(&mono).into_iter().map(|z| newton_polish(fcheb, z)).collect();
        let pencil = assemble_chebyshev(&ch.coefficients, &Contour::interval(-1.0, 1.0).unwrap()).unwrap();
        let eig = pencil_eigvals(&pencil, shift).map_err(|e| format!("trial {trial} chebyshev: {e}"))?;
        worst =
            worst.max(match_sets(&eig, &oracle, radius, 1e-9).map_err(|e| format!("trial {trial} chebyshev: {e}"))?);
        compared += eig.iter().filter(|z| z.norm() <= radius).count();
    }
    Ok(format!(
        "20 instances x 2 pencils, {compared} eigenvalues within |z| <= 3, worst relative mismatch {worst:.2e}"
    ))
}

// ---------------------------------------------------------------------------
// 4. end-to-end recovery

fn end_to_end() -> Check {
    let domain = Contour::circle(c(0.0, 0.0), 1.0).unwrap();
    let problems: Vec<GalleryProblem> = vec![
        random_delay(6, 3, c(0.0, 0.0), 1.0, 11).map_err(|e| e.to_string())?,
        random_delay(4, 2, c(0.0, 0.0), 1.0, 12).map_err(|e| e.to_string())?,
        random_quadratic(6, 3, c(0.0, 0.0), 1.0, 13).map_err(|e| e.to_string())?,
        random_quadratic(5, 4, c(0.0, 0.0), 1.0, 14).map_err(|e| e.to_string())?,
    ];
    let mut worst_err = 0.0_f64;
    let mut worst_res = 0.0_f64;
    let mut runs = 0;
    for g in &problems {
        let n = g.problem.dim();
        let oracle: Vec<C64> = g
            .reference_in(&domain, 50)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|z| 1.0 - z.norm() >= 0.1)
            .collect();
        let k = oracle.len();
        for rule in [QuadratureRule::Trapezoid, QuadratureRule::GaussLegendre] {
            for (pipeline, nu) in [("reduced", n), ("reduced", k.max(1).max(n - 1)), ("arnoldi", n)] {
                let cfg = SolverConfig {
                    method: Method::Cauchy,
                    rule,
                    m: 25,
                    nu,
                    k,
                    tol: 1e-12,
                    ..Default::default()
                };
                let label = format!("{} n={n} {rule:?} {pipeline} nu={nu}", g.name);
                let res = if pipeline == "reduced" {
                    reduced_subspace_iteration(&g.problem, &cfg, &domain)
                } else {
                    arnoldi_pipeline(&g.problem, &cfg, &domain)
                }
                .map_err(|e| format!("{label}: {e}"))?;
                runs += 1;
                for &z in &oracle {
                    let d = res
                        .pairs
                        .iter()
                        .map(|p| (p.lambda - z).norm())
                        .fold(f64::INFINITY, f64::min);
                    ensure(d <= 1e-6, || {
                        format!("{label}: oracle eigenvalue {z} missed (distance {d:.2e})")
                    })?;
                    worst_err = worst_err.max(d);
                }
                for p in &res.pairs {
                    ensure(p.residual <= 1e-8, || {
                        format!("{label}: residual {:.2e} at {}", p.residual, p.lambda)
                    })?;
                    worst_res = worst_res.max(p.residual);
                }
            }
        }
    }
    Ok(format!(
        "{runs} runs over 2 delay and 2 quadratic problems, max |λ − λ_oracle| {worst_err:.2e}, max residual {worst_res:.2e}"
    ))
}

// ---------------------------------------------------------------------------
// 5. reduced iteration against the full-pencil Arnoldi path

fn reduced_vs_arnoldi() -> Check {
    let domain = Contour::circle(c(0.0, 0.0), 1.0).unwrap();
    let g = random_delay(40, 6, c(0.0, 0.0), 1.0, 1).map_err(|e| e.to_string())?;
    let cfg = SolverConfig {
        m: 25,
        nu: 20,
        q: 10,
        k: 6,
        tol: 1e-12,
        max_outer: 25,
        ..Default::default()
    };
    let reduced = reduced_subspace_iteration(&g.problem, &cfg, &domain).map_err(|e| format!("reduced: {e}"))?;
    let full = arnoldi_pipeline(&g.problem, &cfg, &domain).map_err(|e| format!("arnoldi: {e}"))?;
    ensure(reduced.converged && reduced.outer_iterations <= 25, || {
        format!(
            "reduced iteration: converged = {}, {} outer iterations",
            reduced.converged, reduced.outer_iterations
        )
    })?;
    ensure(reduced.pairs.len() == 6 && full.pairs.len() == 6, || {
        format!(
            "pair counts: reduced {}, arnoldi {}",
            reduced.pairs.len(),
            full.pairs.len()
        )
    })?;
    let max_red = reduced.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    let max_full = full.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    ensure(max_red <= 10.0 * max_full, || {
        format!("reduced max residual {max_red:.2e} exceeds 10 x arnoldi {max_full:.2e}")
    })?;
    Ok(format!(
        "n = 40, {} outer iterations, max residual reduced {max_red:.2e} vs arnoldi {max_full:.2e}",
        reduced.outer_iterations
    ))
}

// ---------------------------------------------------------------------------
// 6. identity projection

fn multiset_match(a: &[C64], b: &[C64], tol: f64) -> Result<f64, String> {
    if a.len() != b.len() {
        return Err(format!("sizes differ: {} vs {}", a.len(), b.len()));
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for &z in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (z - w).norm() / z.norm().max(1.0)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or("no partner left")?;
        if d > tol {
            return Err(format!("{z} unmatched (relative distance {d:.2e})"));
        }
        used[j] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}

fn identity_projection() -> Check {
    let g = random_delay(5, 2, c(0.0, 0.0), 1.0, 6).map_err(|e| e.to_string())?;
    let n = g.problem.dim();
    let shift = c(0.05, 0.02);
    let eye = DenseMatrix::identity(n);
    let mut worst = 0.0_f64;
    let mut total = 0;
    let q = trapezoid_rule(Contour::circle(c(0.0, 0.0), 1.0).unwrap(), 10).unwrap();
    let rat = build_rational(&g.problem, &q).map_err(|e| e.to_string())?;
    let ch = build_chebyshev(&g.problem, &Contour::interval(-1.0, 1.0).unwrap(), 10).map_err(|e| e.to_string())?;
    let approximants: [&dyn Approximant; 2] = [&rat, &ch];
    for a in approximants {
        let full = nlevp::pencil::assemble_for(a).map_err(|e| e.to_string())?;
        let full_eigs = pencil_eigvals(&full, shift).map_err(|e| e.to_string())?;
        let bhat = project_coefficients(&eye, a.coefficients()).map_err(|e| e.to_string())?;
        let reduced: Vec<C64> = solve_reduced(&bhat, &a.expansion(), shift, full_eigs.len())
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|p| p.lambda)
            .collect();
        worst = worst.max(multiset_match(&reduced, &full_eigs, 1e-9)?);
        total += full_eigs.len();
    }
    Ok(format!(
        "{total} eigenvalues over both expansions, worst relative mismatch {worst:.2e}"
    ))
}

// ---------------------------------------------------------------------------
// 7. Chebyshev interpolation

fn chebyshev_exactness() -> Check {
    let g = random_delay(4, 2, c(0.0, 0.0), 1.0, 8).map_err(|e| e.to_string())?;
    let interval = Contour::interval(-1.0, 2.0).unwrap();
    let mut worst_node = 0.0_f64;
    for m in [4, 9, 16, 25] {
        let ch = build_chebyshev(&g.problem, &interval, m).map_err(|e| e.to_string())?;
        for x in chebyshev_points(&interval, m).map_err(|e| e.to_string())? {
            let z = c(x, 0.0);
            let t = g.problem.eval(z);
            let mut d = ch.eval(z).map_err(|e| e.to_string())?;
            d.add_scaled(c(-1.0, 0.0), &t);
            worst_node = worst_node.max(d.norm_fro() / t.norm_fro());
        }
    }
    ensure(worst_node <= 1e-10, || format!("node mismatch {worst_node:.2e}"))?;
    let mut gen = rng(5, 9);
    let mut worst_rec = 0.0_f64;
    for _ in 0..200 {
        let s = c(gen.random_range(-1.5..1.5), gen.random_range(-1.0..1.0));
        let t = chebyshev_t_all(30, s);
        for i in 1..30 {
            let lhs = t[i + 1];
            let rhs = s * 2.0 * t[i] - t[i - 1];
            let scale = lhs.norm().max((s * 2.0 * t[i]).norm()).max(t[i - 1].norm()).max(1.0);
            worst_rec = worst_rec.max((lhs - rhs).norm() / scale);
        }
        let x: f64 = gen.random_range(-1.0..1.0);
        for (i, ti) in chebyshev_t_all(30, c(x, 0.0)).iter().enumerate() {
            worst_rec = worst_rec.max((ti - c((i as f64 * x.acos()).cos(), 0.0)).norm());
        }
    }
    ensure(worst_rec <= 1e-13, || format!("recurrence residual {worst_rec:.2e}"))?;
    Ok(format!(
        "node mismatch {worst_node:.2e}, recurrence residual {worst_rec:.2e}"
    ))
}

// ---------------------------------------------------------------------------
// 8. determinism of the binary

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("delay.toml");
    std::fs::write(
        &cfg,
        r#"mode = "solve"

[problem]
name = "delay"
random = { n = 8, inside = 3, seed = 4 }

[domain]
kind = "circle"
radius = 1.0

[solver]
m = 25
nu = 6
q = 10
k = 3
"#,
    )
    .map_err(|e| e.to_string())?;
    let exe = env!("CARGO_BIN_EXE_nlevp");
    let mut reports = Vec::new();
    let out = dir.path().join("report.toml");
    for (i, threads) in ["", "", "1"].iter().enumerate() {
        let mut cmd = Command::new(exe);
        cmd.arg("solve")
            .arg(&cfg)
            .arg("--seed")
            .arg("42")
            .arg("--out")
            .arg(&out)
            .arg("--quiet");
        if !threads.is_empty() {
            cmd.env("NLEVP_THREADS", threads);
        }
        let status = cmd.status().map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), || format!("run {i} exited with {status}"))?;
        reports.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(reports[0] == reports[1], || {
        "two identical runs produced different reports".into()
    })?;
    ensure(reports[0] == reports[2], || "NLEVP_THREADS=1 changed the report".into())?;
    let text = String::from_utf8(reports[0].clone()).map_err(|e| e.to_string())?;
    ensure(text.contains("seed = 42"), || {
        "seed override missing from the echoed config".into()
    })?;
    Ok(format!(
        "3 runs, {} identical bytes each (default pool twice, 1 thread once)",
        reports[0].len()
    ))
}

// ---------------------------------------------------------------------------

fn main() {
    type Criterion = (&'static str, f64, fn() -> Check);
    let criteria: [Criterion; 8] = [
        ("trapezoid decay", 1.0, trapezoid_decay),
        ("structured-step oracle", 10.0, structured_step_oracle),
        ("scalar equivalence", 10.0, scalar_equivalence),
        ("end-to-end spectral recovery", 30.0, end_to_end),
        ("reduced-iteration convergence", 60.0, reduced_vs_arnoldi),
        ("identity-projection collapse", 5.0, identity_projection),
        ("Chebyshev interpolation exactness", 1.0, chebyshev_exactness),
        ("determinism", f64::INFINITY, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(detail) if secs > budget => Err(format!("{detail}; took {secs:.2} s, budget {budget} s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({secs:.2} s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({secs:.2} s) {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
