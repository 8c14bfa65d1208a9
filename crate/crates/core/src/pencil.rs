//! Block pencils `(A, M)` whose finite generalized eigenvalues are the
//! eigenvalues of an approximant, and a dense shift-and-invert eigensolver
//! used as the reference for the structured fast paths.
//!
//! Cauchy layout, blocks `[v_0, …, v_m, u]` with `v_i = u/(λ − σ_i)`:
//!
//! ```text
//!   σ_i v_i + u      = λ v_i      (i = 0..m)
//!   −Σ B_i v_i       = 0
//! ```
//!
//! Chebyshev layout in the scaled variable `s`, blocks `[v_0, …, v_{m−1}]`
//! with `v_i = τ_i(s) u`:
//!
//! ```text
//!   v_1                                   = s v_0
//!   v_{i−1} + v_{i+1}                     = 2s v_i         (i = 1..m−2)
//!   Σ_{j<m} K_j v_j                       = 2s B_m v_{m−1}
//! ```
//!
//! with `K_j = −B_j`, except `K_{m−2} = B_m − B_{m−2}`.

use crate::approx::{Approximant, Expansion};
use crate::error::{Error, Result};
use crate::linalg::{hessenberg_eig, hessenberg_reduce, lu_factor, DenseMatrix, C64, ONE, ZERO};
use crate::quadrature::Contour;

/// Moduli of `μ` at or below this fraction of `‖H‖` count as infinite
/// eigenvalues `λ = σ + 1/μ`.
pub const INFINITE_MU_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PencilTag {
    CauchyFull,
    ChebyshevFull,
    CauchyReduced,
    ChebyshevReduced,
}

impl PencilTag {
    pub fn is_cauchy(self) -> bool {
        matches!(self, PencilTag::CauchyFull | PencilTag::CauchyReduced)
    }

    pub fn is_reduced(self) -> bool {
        matches!(self, PencilTag::CauchyReduced | PencilTag::ChebyshevReduced)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PencilKind {
    pub tag: PencilTag,
    /// `n` for full pencils, `ν` for reduced ones.
    pub block_size: usize,
    pub block_count: usize,
}

impl PencilKind {
    /// Layout for `m + 1` coefficients of size `block_size`.
    pub fn new(tag: PencilTag, block_size: usize, m: usize) -> Self {
        let block_count = if tag.is_cauchy() { m + 2 } else { m };
        Self {
            tag,
            block_size,
            block_count,
        }
    }

    pub fn dim(&self) -> usize {
        self.block_size * self.block_count
    }

    /// Approximation order `m`.
    pub fn order(&self) -> usize {
        if self.tag.is_cauchy() {
            self.block_count - 2
        } else {
            self.block_count
        }
    }

    /// Index of the block holding `u`.
    pub fn u_block(&self) -> usize {
        if self.tag.is_cauchy() {
            self.block_count - 1
        } else {
            0
        }
    }
}

/// An iterate `w` of a block pencil, stored contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    pub kind: PencilKind,
    pub data: Vec<C64>,
}

impl BlockVector {
    pub fn new(kind: PencilKind, data: Vec<C64>) -> Result<Self> {
        if data.len() != kind.dim() {
            return Err(Error::DimensionMismatch {
                context: "BlockVector layout",
                expected: kind.dim(),
                found: data.len(),
            });
        }
        Ok(Self { kind, data })
    }

    pub fn zeros(kind: PencilKind) -> Self {
        Self {
            kind,
            data: vec![ZERO; kind.dim()],
        }
    }

    pub fn from_blocks(kind: PencilKind, blocks: &[Vec<C64>]) -> Result<Self> {
        if blocks.len() != kind.block_count {
            return Err(Error::DimensionMismatch {
                context: "BlockVector block count",
                expected: kind.block_count,
                found: blocks.len(),
            });
        }
        let mut data = Vec::with_capacity(kind.dim());
        for b in blocks {
            if b.len() != kind.block_size {
                return Err(Error::DimensionMismatch {
                    context: "BlockVector block size",
                    expected: kind.block_size,
                    found: b.len(),
                });
            }
            data.extend_from_slice(b);
        }
        Ok(Self { kind, data })
    }

    pub fn block(&self, i: usize) -> &[C64] {
        let n = self.kind.block_size;
        &self.data[i * n..(i + 1) * n]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [C64] {
        let n = self.kind.block_size;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn u(&self) -> &[C64] {
        self.block(self.kind.u_block())
    }
}

/// Splits `w` into `u` and the remaining blocks (`v_0..v_m` for Cauchy,
/// `v_1..v_{m−1}` for Chebyshev).
pub fn extract_eigvec(w: &BlockVector) -> (Vec<C64>, Vec<Vec<C64>>) {
    let u = w.u().to_vec();
    let skip = w.kind.u_block();
    let v = (0..w.kind.block_count)
        .filter(|&i| i != skip)
        .map(|i| w.block(i).to_vec())
        .collect();
    (u, v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    pub a: DenseMatrix,
    pub m: DenseMatrix,
    pub kind: PencilKind,
    /// Maps pencil eigenvalues to the approximation variable `z`.
    pub expansion: Expansion,
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }
}

fn check_coefficients(b: &[DenseMatrix], min_len: usize) -> Result<usize> {
    if b.len() < min_len {
        return Err(Error::OrderTooSmall(b.len().saturating_sub(1)));
    }
    let n = b[0].rows();
    for bi in b {
        if !bi.is_square() || bi.rows() != n {
            return Err(Error::DimensionMismatch {
                context: "pencil coefficients (uniform square blocks)",
                expected: n,
                found: if bi.rows() != n { bi.rows() } else { bi.cols() },
            });
        }
    }
    Ok(n)
}

fn cauchy_pencil(b: &[DenseMatrix], poles: &[C64], tag: PencilTag) -> Result<Pencil> {
    let n = check_coefficients(b, 1)?;
    if poles.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "assemble_cauchy (poles vs coefficients)",
            expected: b.len(),
            found: poles.len(),
        });
    }
    let kind = PencilKind::new(tag, n, b.len() - 1);
    let last = kind.block_count - 1;
    let dim = kind.dim();
    let mut a = DenseMatrix::zeros(dim, dim);
    let mut m = DenseMatrix::zeros(dim, dim);
    for (i, (bi, &s)) in b.iter().zip(poles).enumerate() {
        a.set_scaled_identity(i * n, i * n, n, s);
        a.set_scaled_identity(i * n, last * n, n, ONE);
        m.set_scaled_identity(i * n, i * n, n, ONE);
        a.set_block(last * n, i * n, &bi.scale(-ONE));
    }
    Ok(Pencil {
        a,
        m,
        kind,
        expansion: Expansion::Rational { poles: poles.to_vec() },
    })
}

fn chebyshev_pencil(b: &[DenseMatrix], interval: &Contour, tag: PencilTag) -> Result<Pencil> {
    let Contour::Interval { a: lo, b: hi } = *interval else {
        return Err(Error::InvalidContour("Chebyshev pencil needs an interval".into()));
    };
    if b.len() < 3 {
        return Err(Error::OrderTooSmall(b.len().saturating_sub(1)));
    }
    let n = check_coefficients(b, 3)?;
    let order = b.len() - 1;
    let kind = PencilKind::new(tag, n, order);
    let dim = kind.dim();
    let last = order - 1;
    let two = C64::new(2.0, 0.0);
    let mut a = DenseMatrix::zeros(dim, dim);
    let mut m = DenseMatrix::zeros(dim, dim);
    a.set_scaled_identity(0, n, n, ONE);
    m.set_scaled_identity(0, 0, n, ONE);
    for i in 1..last {
        a.set_scaled_identity(i * n, (i - 1) * n, n, ONE);
        a.set_scaled_identity(i * n, (i + 1) * n, n, ONE);
        m.set_scaled_identity(i * n, i * n, n, two);
    }
    for j in 0..order {
        let k = chebyshev_last_row_block(b, j);
        a.set_block(last * n, j * n, &k);
    }
    m.set_block(last * n, last * n, &b[order].scale(two));
    Ok(Pencil {
        a,
        m,
        kind,
        expansion: Expansion::Chebyshev { a: lo, b: hi },
    })
}

/// `K_j` of the last block row of the Chebyshev pencil.
pub(crate) fn chebyshev_last_row_block(b: &[DenseMatrix], j: usize) -> DenseMatrix {
    let order = b.len() - 1;
    if j == order - 2 {
        let mut k = b[order].clone();
        k.add_scaled(-ONE, &b[j]);
        k
    } else {
        b[j].scale(-ONE)
    }
}

pub fn assemble_cauchy(b: &[DenseMatrix], poles: &[C64]) -> Result<Pencil> {
    cauchy_pencil(b, poles, PencilTag::CauchyFull)
}

pub fn assemble_chebyshev(b: &[DenseMatrix], interval: &Contour) -> Result<Pencil> {
    chebyshev_pencil(b, interval, PencilTag::ChebyshevFull)
}

/// The pencil of projected coefficients `B̂_i = Uᴴ B_i U`, with the same
/// template as the full one and all `m + 1` terms.
pub fn assemble_reduced(bhat: &[DenseMatrix], expansion: &Expansion) -> Result<Pencil> {
    match expansion {
        Expansion::Rational { poles } => cauchy_pencil(bhat, poles, PencilTag::CauchyReduced),
        Expansion::Chebyshev { a, b } => {
            chebyshev_pencil(bhat, &Contour::Interval { a: *a, b: *b }, PencilTag::ChebyshevReduced)
        }
    }
}

/// The full pencil of an approximant.
pub fn assemble_for(approx: &dyn Approximant) -> Result<Pencil> {
    match approx.expansion() {
        Expansion::Rational { poles } => assemble_cauchy(approx.coefficients(), &poles),
        Expansion::Chebyshev { a, b } => assemble_chebyshev(approx.coefficients(), &Contour::Interval { a, b }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PencilEigenpair {
    /// Eigenvalue in the approximation variable `z`.
    pub lambda: C64,
    /// Eigenvalue in the pencil variable (`s` for Chebyshev pencils).
    pub lambda_pencil: C64,
    /// Unit eigenvector of the pencil.
    pub vector: BlockVector,
}

/// Dense shift-and-invert data. Columns of `M` that are exactly zero give
/// zero columns of `H` and are split off before the eigensolve. The
/// infinite eigenvalues of the Cauchy pencil have index 2, and a perturbed
/// `2 × 2` nilpotent block has eigenvalues of size `√ε`.
struct ShiftInvert {
    /// Columns `keep` of `H`.
    h_keep: DenseMatrix,
    keep: Vec<usize>,
    /// Hessenberg reduction of `H[keep, keep]`.
    reduction: crate::linalg::HessenbergReduction,
    /// Finite `μ`, largest modulus first.
    mu: Vec<C64>,
    shift: C64,
}

impl ShiftInvert {
    /// Unit eigenvector of `H` for `μ ≠ 0`.
    fn eigvec(&self, mu: C64, stream: u64) -> Vec<C64> {
        let xk = self.reduction.eigvec(mu, stream);
        let full = self.h_keep.matvec(&xk);
        let mut x: Vec<C64> = full.into_iter().map(|v| v / mu).collect();
        for (&i, &v) in self.keep.iter().zip(&xk) {
            x[i] = v;
        }
        crate::linalg::vector::normalize(&mut x);
        x
    }
}

fn shift_invert(p: &Pencil, shift_pencil: C64) -> Result<ShiftInvert> {
    let mut shifted = p.a.clone();
    shifted.add_scaled(-shift_pencil, &p.m);
    let lu = lu_factor(&shifted).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularShift,
        other => other,
    })?;
    let dim = p.dim();
    let keep: Vec<usize> = (0..dim).filter(|&j| (0..dim).any(|i| p.m[(i, j)] != ZERO)).collect();
    let m_keep = DenseMatrix::from_fn(dim, keep.len(), |i, j| p.m[(i, keep[j])]);
    let h_keep = lu.solve_matrix(&m_keep)?;
    let threshold = INFINITE_MU_RTOL * h_keep.norm_fro();
    let h_square = DenseMatrix::from_fn(keep.len(), keep.len(), |i, j| h_keep[(keep[i], j)]);
    let reduction = hessenberg_reduce(&h_square)?;
    let values = hessenberg_eig(&reduction.h, false)?.values;
    let mut mu: Vec<C64> = values.into_iter().filter(|m| m.norm() > threshold).collect();
    mu.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(x.re.total_cmp(&y.re))
            .then(x.im.total_cmp(&y.im))
    });
    Ok(ShiftInvert {
        h_keep,
        keep,
        reduction,
        mu,
        shift: shift_pencil,
    })
}

/// All finite eigenvalues of the pencil in `z`, nearest to `shift` first.
pub fn pencil_eigvals(p: &Pencil, shift: C64) -> Result<Vec<C64>> {
    let si = shift_invert(p, p.expansion.to_scaled(shift))?;
    Ok(si
        .mu
        .iter()
        .map(|&mu| p.expansion.from_scaled(si.shift + ONE / mu))
        .collect())
}

/// The `k` finite eigenpairs nearest to `shift` (given in `z`), from a dense
/// eigendecomposition of `H = (A − σM)⁻¹M`.
pub fn pencil_eig_dense(p: &Pencil, shift: C64, k: usize) -> Result<Vec<PencilEigenpair>> {
    let si = shift_invert(p, p.expansion.to_scaled(shift))?;
    if si.mu.len() < k {
        return Err(Error::InsufficientFinite {
            requested: k,
            found: si.mu.len(),
        });
    }
    Ok(si.mu[..k]
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let lambda_pencil = si.shift + ONE / mu;
            PencilEigenpair {
                lambda: p.expansion.from_scaled(lambda_pencil),
                lambda_pencil,
                vector: BlockVector {
                    kind: p.kind,
                    data: si.eigvec(mu, i as u64),
                },
            }
        })
        .collect())
}

/// `‖A w − λ M w‖₂` for a pencil eigenvalue in the pencil variable.
pub fn pencil_residual(p: &Pencil, lambda_pencil: C64, w: &[C64]) -> f64 {
    let mut r = p.a.matvec(w);
    p.m.matvec_acc(-lambda_pencil, w, &mut r);
    crate::linalg::vector::norm2(&r)
}
