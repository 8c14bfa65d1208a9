use proptest::prelude::*;

use nlevp::approx::{build_chebyshev, Approximant, Expansion, NlevpProblem};
use nlevp::harness::ExperimentConfig;
use nlevp::linalg::random::{complex_normal_vec, rng};
use nlevp::linalg::{dense_eigvals, lu_factor, DenseMatrix, C64};
use nlevp::pencil::{assemble_reduced, BlockVector};
use nlevp::quadrature::Contour;
use nlevp::structured::factor_for;

fn random_matrices(seed: u64, n: usize, count: usize) -> Vec<DenseMatrix> {
    let mut g = rng(seed, 11);
    (0..count)
        .map(|_| DenseMatrix::from_vec(n, n, complex_normal_vec(&mut g, n * n)))
        .collect()
}

fn max_abs(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// A matrix polynomial of degree d is reproduced by any Chebyshev
    /// interpolant of order m ≥ d.
    #[test]
    fn chebyshev_reproduces_polynomials(
        seed in any::<u64>(),
        n in 1usize..4,
        d in 0usize..6,
        extra in 0usize..4,
        a in -2.0f64..0.0,
        width in 0.5f64..3.0,
        t in 0.0f64..1.0,
    ) {
        let b = a + width;
        let coeffs = random_matrices(seed, n, d + 1);
        let eval = {
            let coeffs = coeffs.clone();
            move |z: C64| {
                let mut acc = DenseMatrix::zeros(n, n);
                for c in coeffs.iter().rev() {
                    acc = acc.scale(z);
                    acc.add_scaled(C64::new(1.0, 0.0), c);
                }
                acc
            }
        };
        let problem = NlevpProblem::new(n, eval.clone());
        let cheb = build_chebyshev(&problem, &Contour::interval(a, b).unwrap(), (d + extra).max(2)).unwrap();
        let z = C64::new(a + t * width, 0.0);
        let exact = eval(z);
        let scale = 1.0 + exact.norm_max();
        prop_assert!(max_abs(&cheb.eval(z).unwrap(), &exact) <= 1e-11 * scale);
    }

    /// One structured inverse step agrees with a dense solve of the
    /// reduced pencil for both expansions.
    #[test]
    fn structured_step_matches_dense_solve(
        seed in any::<u64>(),
        n in 1usize..5,
        m in 2usize..9,
        shift_re in -0.4f64..0.4,
        shift_im in -0.4f64..0.4,
    ) {
        let b = random_matrices(seed, n, m + 1);
        let circle = Contour::circle(C64::new(0.0, 0.0), 1.0).unwrap();
        let poles = nlevp::quadrature::trapezoid_rule(circle, m).unwrap().nodes;
        let shift = C64::new(shift_re, shift_im);
        for expansion in [Expansion::Rational { poles }, Expansion::Chebyshev { a: -1.0, b: 1.0 }] {
            let shift = if expansion.is_rational() {
                shift
            } else {
                prop_assert!(shift_re == 0.0 || factor_for(&b, &expansion, C64::new(shift_re, 0.0)).is_err());
                C64::new(0.0, 0.0)
            };
            let f = factor_for(&b, &expansion, shift).unwrap().into_reduced();
            let p = assemble_reduced(&b, &expansion).unwrap();
            let w = BlockVector::new(p.kind, complex_normal_vec(&mut rng(seed, 12), p.dim())).unwrap();
            let fast = f.step(&w).unwrap();
            let mut a = p.a.clone();
            a.add_scaled(-shift, &p.m);
            let slow = lu_factor(&a).unwrap().solve(&p.m.matvec(&w.data)).unwrap();
            let diff: f64 = fast.data.iter().zip(&slow).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            let size: f64 = slow.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(diff <= 1e-9 * size, "relative difference {}", diff / size);
        }
    }

    /// Serializing a configuration and parsing it back is the identity.
    #[test]
    fn configuration_round_trips(
        m in 4usize..64,
        nu in 1usize..12,
        q in 1usize..20,
        k_frac in 0.0f64..1.0,
        tol_exp in -15i32..-3,
        seed in any::<u64>(),
        radius in 0.1f64..5.0,
    ) {
        let k = ((nu as f64 * k_frac) as usize).max(1);
        let text = format!(
            "mode = \"solve\"\n\n[problem]\nname = \"delay\"\nrandom = {{ n = 12, inside = 2, seed = 1 }}\n\n\
             [domain]\nkind = \"circle\"\nradius = {radius:?}\n\n\
             [solver]\nm = {m}\nnu = {nu}\nq = {q}\nk = {k}\ntol = 1e{tol_exp}\nseed = {seed}\n"
        );
        let cfg = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(ExperimentConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    /// Companion matrices of polynomials with well separated real roots
    /// give back those roots.
    #[test]
    fn companion_roots(roots in proptest::collection::vec(-4.0f64..4.0, 1..7)) {
        let mut sorted = roots.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 0.3));
        let mut p = vec![C64::new(1.0, 0.0)];
        for &r in &sorted {
            let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
            for (k, a) in p.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            p = next;
        }
        let d = sorted.len();
        let comp = DenseMatrix::from_fn(d, d, |i, j| {
            if i == 0 {
                -p[d - 1 - j]
            } else if i == j + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let eig = dense_eigvals(&comp).unwrap();
        for r in sorted {
            let nearest = eig.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= 1e-8 * (1.0 + r.abs()), "root {} missed by {}", r, nearest);
        }
    }
}
