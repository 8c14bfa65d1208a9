use super::vector::{norm2, normalize};
use super::{DenseMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-14;

/// `P·A = L·U` with unit-lower-triangular `L` stored below the diagonal of
/// `lu` and `U` on and above it. Row `i` of `P·A` is row `perm[i]` of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "lu_factor (square input)",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("lu_factor: non-finite entries".into()));
    }
    let threshold = SINGULAR_PIVOT_RTOL * a.norm_inf();
    factor_with(a, |k, pivot| {
        if pivot.norm() <= threshold {
            Err(Error::SingularMatrix { pivot: k, threshold })
        } else {
            Ok(pivot)
        }
    })
}

fn factor_with(a: &DenseMatrix, mut check_pivot: impl FnMut(usize, C64) -> Result<C64>) -> Result<LuFactors> {
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, _) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if p != k {
            lu.swap_rows(p, k);
            perm.swap(p, k);
        }
        let pivot = check_pivot(k, lu[(k, k)])?;
        lu[(k, k)] = pivot;
        let inv = ONE / pivot;
        for i in k + 1..n {
            let l = lu[(i, k)] * inv;
            lu[(i, k)] = l;
            if l == ZERO {
                continue;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => ONE,
            std::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.dim();
        DenseMatrix::from_fn(n, n, |i, j| if j >= i { self.lu[(i, j)] } else { ZERO })
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                context: "lu_solve",
                expected: n,
                found: b.len(),
            });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    fn solve_in_place(&self, x: &mut [C64]) {
        let n = self.dim();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
    }

    /// Solves for every column of `b`.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                context: "lu_solve (matrix right-hand side)",
                expected: n,
                found: b.rows(),
            });
        }
        let mut out = DenseMatrix::zeros(n, b.cols());
        let mut col = vec![ZERO; n];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(self.perm[i], j)];
            }
            self.solve_in_place(&mut col);
            out.set_column(j, &col);
        }
        Ok(out)
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                context: "lu_solve (adjoint)",
                expected: n,
                found: b.len(),
            });
        }
        // Aᴴ = Uᴴ Lᴴ P, so solve Uᴴ y = b, Lᴴ z = y, x = Pᵀ z
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for (j, yj) in y.iter().enumerate().take(i) {
                s -= self.lu[(j, i)].conj() * yj;
            }
            y[i] = s / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= self.lu[(j, i)].conj() * yj;
            }
            y[i] = s;
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }
}

pub fn lu_solve(factors: &LuFactors, b: &[C64]) -> Result<Vec<C64>> {
    factors.solve(b)
}

/// Estimate of the smallest singular value of a square matrix by power
/// iteration on `(AᴴA)⁻¹`. Returns 0 when the LU factorization detects
/// numerical singularity.
pub fn smallest_singular_value(a: &DenseMatrix, iterations: usize) -> f64 {
    let n = a.rows();
    if n == 0 {
        return 0.0;
    }
    let Ok(lu) = lu_factor(a) else {
        return 0.0;
    };
    let mut x = super::random::seeded_vector(0x5eed, 0, n);
    normalize(&mut x);
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let y = lu.solve_adjoint(&x).expect("dimension checked");
        let z = lu.solve(&y).expect("dimension checked");
        let nz = norm2(&z);
        if nz == 0.0 || !nz.is_finite() {
            return 0.0;
        }
        // ‖(AᴴA)⁻¹x‖ → σ_min⁻²
        estimate = nz;
        x = z.into_iter().map(|v| v / nz).collect();
    }
    1.0 / estimate.sqrt()
}
