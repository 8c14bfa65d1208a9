use super::random::seeded_vector;
use super::vector::{axpy, dot, norm2, normalize};
use super::{DenseMatrix, C64};

/// Columns whose norm drops below this fraction of their original norm
/// during projection are treated as linearly dependent.
const DEPENDENCE_RTOL: f64 = 1e-12;

/// Seed of the replacement stream for dependent columns.
const REPLACEMENT_SEED: u64 = 0x0b7a_5e11;

/// An `n × k` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    columns: DenseMatrix,
}

impl Basis {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.columns
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.columns
    }

    /// Ambient dimension `n`.
    pub fn len(&self) -> usize {
        self.columns.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.cols() == 0
    }

    /// Number of columns `k`.
    pub fn rank(&self) -> usize {
        self.columns.cols()
    }

    pub fn identity(n: usize) -> Self {
        Self {
            columns: DenseMatrix::identity(n),
        }
    }

    /// `U·y`
    pub fn expand(&self, y: &[C64]) -> Vec<C64> {
        self.columns.matvec(y)
    }

    /// `‖UᴴU − I‖∞`
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.columns.adjoint().matmul(&self.columns);
        (&g - &DenseMatrix::identity(self.rank())).norm_inf()
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns that are
/// numerically dependent on their predecessors are replaced by deterministic
/// pseudo-random unit vectors, so the result always has `k` orthonormal
/// columns (requires `k ≤ n`).
pub fn orthonormalize(v: &DenseMatrix) -> Basis {
    let (n, k) = (v.rows(), v.cols());
    assert!(k <= n, "cannot orthonormalize {k} columns in dimension {n}");
    if k == 0 {
        return Basis {
            columns: DenseMatrix::zeros(n, 0),
        };
    }
    let mut done: Vec<Vec<C64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut col = v.column(j);
        let mut attempt = 0u64;
        loop {
            let original = norm2(&col);
            for _pass in 0..2 {
                for q in &done {
                    let h = dot(q, &col);
                    axpy(-h, q, &mut col);
                }
            }
            let remaining = norm2(&col);
            if original > 0.0 && remaining > DEPENDENCE_RTOL * original {
                normalize(&mut col);
                break;
            }
            col = seeded_vector(REPLACEMENT_SEED, ((j as u64) << 8) | attempt, n);
            attempt += 1;
            assert!(attempt < 64, "failed to find a replacement column");
        }
        done.push(col);
    }
    Basis {
        columns: DenseMatrix::from_columns(&done),
    }
}
