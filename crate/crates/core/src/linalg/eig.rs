//! Complex eigenvalues by Householder reduction to Hessenberg form followed
//! by single-shift QR with Wilkinson shifts. Eigenvectors come from inverse
//! iteration on the Hessenberg matrix, which costs `O(n²)` per vector.

use super::random::seeded_vector;
use super::vector::{norm2, normalize};
use super::{DenseMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Subdiagonal entries below this fraction of their diagonal neighbours are
/// set to zero.
const DEFLATION_RTOL: f64 = 1e-13;
/// QR sweeps allowed per unit of matrix dimension.
const SWEEPS_PER_ROW: usize = 30;
/// Relative size of the pivot floor used by inverse iteration.
const INVERSE_ITERATION_PERTURBATION: f64 = 1e-14;

/// `A = Q·H·Qᴴ` with `H` upper Hessenberg and `Q` unitary.
#[derive(Clone, Debug)]
pub struct HessenbergReduction {
    pub h: DenseMatrix,
    pub q: DenseMatrix,
}

#[derive(Clone, Debug)]
pub struct HessenbergEig {
    /// Eigenvalues in the order they appear on the diagonal of the Schur form.
    pub values: Vec<C64>,
    /// Upper-triangular `T` and unitary `Z` with `H = Z·T·Zᴴ`, when requested.
    pub schur: Option<(DenseMatrix, DenseMatrix)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    /// Unit 2-norm.
    pub vector: Vec<C64>,
}

pub fn hessenberg_reduce(a: &DenseMatrix) -> Result<HessenbergReduction> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hessenberg_reduce (square input)",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    let mut h = a.clone();
    let mut q = DenseMatrix::identity(n);
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        for (i, vi) in v[..len].iter_mut().enumerate() {
            *vi = h[(k + 1 + i, k)];
        }
        let alpha = norm2(&v[..len]);
        let tail = norm2(&v[1..len]);
        if tail == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        v[0] += phase * alpha;
        let vv: f64 = v[..len].iter().map(|c| c.norm_sqr()).sum();
        let tau = 2.0 / vv;
        let v = &v[..len];

        // H ← (I − τvvᴴ)·H on rows k+1.., columns k..
        for j in k..n {
            let mut s = ZERO;
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + i, j)];
            }
            s *= tau;
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= vi * s;
            }
        }
        // H ← H·(I − τvvᴴ) and Q ← Q·(I − τvvᴴ) on columns k+1..
        for m in [&mut h, &mut q] {
            for r in 0..n {
                let row = &mut m.row_mut(r)[k + 1..];
                let mut s = ZERO;
                for (x, vi) in row.iter().zip(v) {
                    s += x * vi;
                }
                s *= tau;
                for (x, vi) in row.iter_mut().zip(v) {
                    *x -= s * vi.conj();
                }
            }
        }
        h[(k + 1, k)] = -phase * alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    Ok(HessenbergReduction { h, q })
}

/// Givens rotation `G = [[c, s], [−s̄, c]]` with real `c` such that
/// `G·[x; y] = [r; 0]`.
#[inline]
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, ONE);
    }
    let rho = ax.hypot(ay);
    let c = ax / rho;
    let s = (x / ax) * y.conj() / rho;
    (c, s)
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub fn hessenberg_eig(h: &DenseMatrix, schur_vectors: bool) -> Result<HessenbergEig> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hessenberg_eig (square input)",
            expected: h.rows(),
            found: h.cols(),
        });
    }
    let n = h.rows();
    for i in 2..n {
        for j in 0..i - 1 {
            if h[(i, j)] != ZERO {
                return Err(Error::InvalidArgument(format!(
                    "hessenberg_eig: entry ({i}, {j}) below the subdiagonal is nonzero"
                )));
            }
        }
    }
    let mut t = h.clone();
    let mut z = schur_vectors.then(|| DenseMatrix::identity(n));
    let values = qr_iterate(&mut t, z.as_mut(), schur_vectors)?;
    let schur = z.map(|z| {
        for i in 1..n {
            for j in 0..i {
                t[(i, j)] = ZERO;
            }
        }
        (t, z)
    });
    Ok(HessenbergEig { values, schur })
}

fn qr_iterate(h: &mut DenseMatrix, mut z: Option<&mut DenseMatrix>, full: bool) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut values = vec![ZERO; n];
    if n == 0 {
        return Ok(values);
    }
    let budget = SWEEPS_PER_ROW * n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == 0.0 {
                if lo >= 2 {
                    s += h[(lo - 1, lo - 2)].norm();
                }
                if lo + 1 < n {
                    s += h[(lo + 1, lo)].norm();
                }
            }
            if h[(lo, lo - 1)].norm() <= (DEFLATION_RTOL * s).max(f64::MIN_POSITIVE) {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps >= budget {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        let col_end = if full { n } else { hi + 1 };
        let row_start = if full { 0 } else { lo };
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let col_start = if k == lo { lo } else { k - 1 };
            for j in col_start..col_end {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            let row_end = (k + 2).min(hi);
            for i in row_start..=row_end {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + s.conj() * b;
                h[(i, k + 1)] = -s * a + b * c;
            }
            if let Some(z) = z.as_deref_mut() {
                for i in 0..n {
                    let a = z[(i, k)];
                    let b = z[(i, k + 1)];
                    z[(i, k)] = a * c + s.conj() * b;
                    z[(i, k + 1)] = -s * a + b * c;
                }
            }
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
        }
    }
    Ok(values)
}

/// Solves `(H − λI)x = b` for upper-Hessenberg `H` with row-pair partial
/// pivoting. Pivots below `floor` are lifted to `floor`.
fn hessenberg_shifted_solve(h: &DenseMatrix, lambda: C64, b: &mut [C64], floor: f64) {
    let n = h.rows();
    let mut m = h.clone();
    for i in 0..n {
        m[(i, i)] -= lambda;
    }
    let lift = |p: C64| -> C64 {
        let r = p.norm();
        if r >= floor {
            p
        } else if r == 0.0 {
            C64::new(floor, 0.0)
        } else {
            p * (floor / r)
        }
    };
    for k in 0..n.saturating_sub(1) {
        if m[(k + 1, k)].norm() > m[(k, k)].norm() {
            m.swap_rows(k, k + 1);
            b.swap(k, k + 1);
        }
        let pivot = lift(m[(k, k)]);
        m[(k, k)] = pivot;
        let l = m[(k + 1, k)] / pivot;
        if l != ZERO {
            for j in k + 1..n {
                let u = m[(k, j)];
                m[(k + 1, j)] -= l * u;
            }
            let bk = b[k];
            b[k + 1] -= l * bk;
        }
    }
    if n > 0 {
        m[(n - 1, n - 1)] = lift(m[(n - 1, n - 1)]);
    }
    for i in (0..n).rev() {
        let row = m.row(i);
        let mut s = b[i];
        for j in i + 1..n {
            s -= row[j] * b[j];
        }
        b[i] = s / row[i];
    }
}

/// Unit eigenvector of the Hessenberg matrix `h` for the (computed)
/// eigenvalue `lambda`, by inverse iteration from a pseudo-random start
/// keyed by `stream`.
pub fn hessenberg_eigvec(h: &DenseMatrix, lambda: C64, stream: u64) -> Vec<C64> {
    let n = h.rows();
    let floor = INVERSE_ITERATION_PERTURBATION * h.norm_max().max(f64::MIN_POSITIVE);
    let mut x = seeded_vector(0xe16e_7ec7, stream, n);
    normalize(&mut x);
    for _ in 0..2 {
        hessenberg_shifted_solve(h, lambda, &mut x, floor);
        if !x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            // overflow from a near-exact eigenvalue: restart from a fresh vector
            x = seeded_vector(0xe16e_7ec7, stream + 1_000_003, n);
            hessenberg_shifted_solve(h, lambda + C64::new(floor, 0.0), &mut x, floor);
        }
        normalize(&mut x);
    }
    x
}

pub fn dense_eigvals(a: &DenseMatrix) -> Result<Vec<C64>> {
    let red = hessenberg_reduce(a)?;
    let mut h = red.h;
    qr_iterate(&mut h, None, false)
}

/// Eigenpairs of a general square matrix.
pub fn dense_eig(a: &DenseMatrix) -> Result<Vec<EigenPair>> {
    let red = hessenberg_reduce(a)?;
    let mut t = red.h.clone();
    let values = qr_iterate(&mut t, None, false)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, &value)| EigenPair {
            value,
            vector: red.eigvec(value, i as u64),
        })
        .collect())
}

impl HessenbergReduction {
    /// Eigenvector of the original matrix for `lambda`: inverse iteration on
    /// `H`, then back-transformation by `Q`.
    pub fn eigvec(&self, lambda: C64, stream: u64) -> Vec<C64> {
        let x = hessenberg_eigvec(&self.h, lambda, stream);
        let mut u = self.q.matvec(&x);
        normalize(&mut u);
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{complex_normal_vec, rng};
    use crate::linalg::{orthonormalize, smallest_singular_value};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sorted_by_re_im(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn companion(coeffs_low_to_high: &[f64]) -> DenseMatrix {
        // monic polynomial z^d + c_{d-1} z^{d-1} + ... + c_0
        let d = coeffs_low_to_high.len();
        let mut m = DenseMatrix::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = ONE;
        }
        for (i, &ci) in coeffs_low_to_high.iter().enumerate() {
            m[(i, d - 1)] = c(-ci);
        }
        m
    }

    fn random_matrix(n: usize, seed: u64) -> DenseMatrix {
        DenseMatrix::from_vec(n, n, complex_normal_vec(&mut rng(seed, 0), n * n))
    }

    #[test]
    fn graded_companion_keeps_unit_subdiagonal() {
        // roots 10^k, k = 0..6: coefficients span twenty orders of magnitude
        let roots: Vec<f64> = (0..7).map(|k| 10f64.powi(k)).collect();
        let mut p = vec![1.0];
        for r in &roots {
            let mut next = vec![0.0; p.len() + 1];
            for (k, a) in p.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            p = next;
        }
        let got = sorted_by_re_im(dense_eigvals(&companion(&p[..7])).unwrap());
        for (z, r) in got.iter().zip(&roots) {
            assert!((z - c(*r)).norm() <= 1e-6 * r, "{z} vs {r}");
        }
    }

    #[test]
    fn diagonal_eigenvalues() {
        let h = DenseMatrix::from_diag(&[c(1.0), c(2.0), c(3.0)]);
        let got = sorted_by_re_im(hessenberg_eig(&h, false).unwrap().values);
        assert_eq!(got, vec![c(1.0), c(2.0), c(3.0)]);
    }

    #[test]
    fn companion_of_z2_minus_1() {
        let h = companion(&[-1.0, 0.0]);
        let got = sorted_by_re_im(hessenberg_eig(&h, false).unwrap().values);
        assert!((got[0] - c(-1.0)).norm() < 1e-14);
        assert!((got[1] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_of_cubic() {
        // z³ − 2z² − z + 2 = (z − 1)(z + 1)(z − 2)
        let h = companion(&[2.0, -1.0, -2.0]);
        let got = sorted_by_re_im(hessenberg_eig(&h, false).unwrap().values);
        for (g, e) in got.iter().zip([-1.0, 1.0, 2.0]) {
            assert!((g - c(e)).norm() <= 1e-10, "{g} vs {e}");
        }
    }

    #[test]
    fn eigenvalues_are_singular_points() {
        let a = random_matrix(15, 5);
        let red = hessenberg_reduce(&a).unwrap();
        let eig = hessenberg_eig(&red.h, false).unwrap();
        let hn = red.h.norm_fro();
        for l in eig.values {
            let mut shifted = red.h.clone();
            for i in 0..15 {
                shifted[(i, i)] -= l;
            }
            let smin = smallest_singular_value(&shifted, 30);
            assert!(smin <= 1e-10 * hn, "smin = {smin:e}");
        }
    }

    #[test]
    fn schur_form_reconstructs() {
        let a = random_matrix(9, 6);
        let red = hessenberg_reduce(&a).unwrap();
        let eig = hessenberg_eig(&red.h, true).unwrap();
        let (t, z) = eig.schur.unwrap();
        let back = z.matmul(&t).matmul(&z.adjoint());
        assert!((&back - &red.h).norm_max() < 1e-12 * red.h.norm_max());
        for (i, v) in eig.values.iter().enumerate() {
            assert_eq!(t[(i, i)], *v);
        }
    }

    #[test]
    fn hessenberg_reduction_is_similarity() {
        let a = random_matrix(7, 8);
        let red = hessenberg_reduce(&a).unwrap();
        let back = red.q.matmul(&red.h).matmul(&red.q.adjoint());
        assert!((&back - &a).norm_max() < 1e-13 * a.norm_max() * 7.0);
        for i in 2..7 {
            for j in 0..i - 1 {
                assert_eq!(red.h[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn rejects_non_hessenberg() {
        let a = random_matrix(4, 1);
        assert!(matches!(hessenberg_eig(&a, false), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dense_eig_diag_imaginary() {
        let a = DenseMatrix::from_diag(&[C64::new(0.0, 1.0), C64::new(0.0, -1.0)]);
        let pairs = dense_eig(&a).unwrap();
        for p in pairs {
            let idx = if p.value.im > 0.0 { 0 } else { 1 };
            assert!((p.value - a[(idx, idx)]).norm() < 1e-15);
            assert!((p.vector[idx].norm() - 1.0).abs() < 1e-12);
            assert!(p.vector[1 - idx].norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_generator_has_imaginary_spectrum() {
        let a = DenseMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let got = sorted_by_re_im(dense_eigvals(&a).unwrap());
        let got = {
            let mut g = got;
            g.sort_by(|x, y| x.im.total_cmp(&y.im));
            g
        };
        assert!((got[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((got[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn random_residuals_and_trace() {
        let a = random_matrix(12, 7);
        let pairs = dense_eig(&a).unwrap();
        let an = a.norm_fro();
        let mut sum = ZERO;
        for p in &pairs {
            let au = a.matvec(&p.vector);
            let r: Vec<C64> = au.iter().zip(&p.vector).map(|(x, u)| x - p.value * u).collect();
            assert!(norm2(&r) <= 1e-9 * an * norm2(&p.vector));
            sum += p.value;
        }
        assert!((sum - a.trace()).norm() <= 1e-9 * an);
    }

    #[test]
    fn repeated_eigenvalue_gets_independent_vectors() {
        let a = DenseMatrix::identity(3).scale(c(2.0));
        let pairs = dense_eig(&a).unwrap();
        let v = DenseMatrix::from_columns(&pairs.iter().map(|p| p.vector.clone()).collect::<Vec<_>>());
        let b = orthonormalize(&v);
        // independent columns survive Gram-Schmidt without replacement
        let p = b.matrix().matmul(&b.matrix().adjoint());
        assert!((&p - &DenseMatrix::identity(3)).norm_max() < 1e-10);
        assert!(smallest_singular_value(&v, 30) > 1e-6);
    }

    #[test]
    fn unitary_similarity_invariance() {
        let a = random_matrix(10, 21);
        let q = orthonormalize(&random_matrix(10, 22)).into_matrix();
        let b = q.matmul(&a).matmul(&q.adjoint());
        let mut ea = dense_eigvals(&a).unwrap();
        let eb = dense_eigvals(&b).unwrap();
        for l in eb {
            let (idx, d) = ea
                .iter()
                .enumerate()
                .map(|(i, x)| (i, (x - l).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(d <= 1e-9 * a.norm_fro(), "d = {d:e}");
            ea.swap_remove(idx);
        }
    }
}
