//! Inverse-power steps `w⁺ = (A − σM)⁻¹ M w` for the block pencils of
//! [`crate::pencil`], computed with one `n × n` factorization instead of a
//! factorization of the whole pencil.
//!
//! Cauchy kinds eliminate the `v` blocks through the Schur complement
//! `S = Σ B_i/(σ_i − σ)`:
//!
//! ```text
//!   S u⁺ = Σ B_i v_i/(σ_i − σ),      v_i⁺ = (v_i − u⁺)/(σ_i − σ)
//! ```
//!
//! Chebyshev kinds (shift at the interval center, `s = 0`) run the
//! three-term recurrence forward. Writing `v_j⁺ = e_j + c_j u⁺`, the odd
//! blocks do not depend on `u⁺` and `c_{2i} = (−1)^i`, so the last block row
//! reduces to `G u⁺ = y_{m−1} − Σ K_j e_j` with
//! `G = Σ_i (−1)^{i+1} B_{2i}` (summed up to `⌊m/2⌋`).

use crate::approx::Expansion;
use crate::error::{Error, Result};
use crate::linalg::{lu_factor, DenseMatrix, LuFactors, C64, ONE, ZERO};
use crate::pencil::{chebyshev_last_row_block, PencilKind, PencilTag};

pub use crate::pencil::BlockVector;

const POLE_RTOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredFactorization {
    pub kind: PencilKind,
    /// Shift in the pencil variable (always 0 for Chebyshev kinds).
    pub shift: C64,
    pub coefficients: Vec<DenseMatrix>,
    /// Poles for Cauchy kinds, empty for Chebyshev kinds.
    pub poles: Vec<C64>,
    /// LU of `S` (Cauchy) or `G` (Chebyshev).
    pub lu: LuFactors,
    pub expansion: Expansion,
}

fn check_uniform(b: &[DenseMatrix]) -> Result<usize> {
    let n = b.first().map_or(0, DenseMatrix::rows);
    for bi in b {
        if !bi.is_square() || bi.rows() != n {
            return Err(Error::DimensionMismatch {
                context: "structured factorization (uniform square coefficients)",
                expected: n,
                found: bi.rows(),
            });
        }
    }
    Ok(n)
}

/// Factorization of the Schur complement `S = Σ B_i/(σ_i − σ)`.
pub fn factor_cauchy(b: &[DenseMatrix], poles: &[C64], shift: C64) -> Result<StructuredFactorization> {
    if b.is_empty() || poles.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "factor_cauchy (poles vs coefficients)",
            expected: b.len(),
            found: poles.len(),
        });
    }
    let n = check_uniform(b)?;
    let mut s = DenseMatrix::zeros(n, n);
    for (i, (bi, &p)) in b.iter().zip(poles).enumerate() {
        let d = p - shift;
        if d.norm() <= POLE_RTOL * (1.0 + p.norm()) {
            return Err(Error::ShiftOnPole(i));
        }
        s.add_scaled(ONE / d, bi);
    }
    let lu = lu_factor(&s).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularSchur,
        other => other,
    })?;
    Ok(StructuredFactorization {
        kind: PencilKind::new(PencilTag::CauchyFull, n, b.len() - 1),
        shift,
        coefficients: b.to_vec(),
        poles: poles.to_vec(),
        lu,
        expansion: Expansion::Rational { poles: poles.to_vec() },
    })
}

/// The matrix `G` of the Chebyshev step.
pub fn chebyshev_g(b: &[DenseMatrix]) -> DenseMatrix {
    let order = b.len() - 1;
    let n = b[0].rows();
    let mut g = DenseMatrix::zeros(n, n);
    for j in (0..order).step_by(2) {
        let sign = if (j / 2) % 2 == 0 { ONE } else { -ONE };
        g.add_scaled(sign, &chebyshev_last_row_block(b, j));
    }
    g
}

/// Factorization of `G` for the Chebyshev pencil on `[a, b]` shifted to
/// the interval center.
pub fn factor_chebyshev(b: &[DenseMatrix], a: f64, bb: f64) -> Result<StructuredFactorization> {
    if b.len() < 3 {
        return Err(Error::OrderTooSmall(b.len().saturating_sub(1)));
    }
    let n = check_uniform(b)?;
    let lu = lu_factor(&chebyshev_g(b)).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::SingularG,
        other => other,
    })?;
    Ok(StructuredFactorization {
        kind: PencilKind::new(PencilTag::ChebyshevFull, n, b.len() - 1),
        shift: ZERO,
        coefficients: b.to_vec(),
        poles: Vec::new(),
        lu,
        expansion: Expansion::Chebyshev { a, b: bb },
    })
}

/// Factorization for an expansion and a shift in `z`. Chebyshev expansions
/// only accept the interval center.
pub fn factor_for(b: &[DenseMatrix], expansion: &Expansion, shift: C64) -> Result<StructuredFactorization> {
    match expansion {
        Expansion::Rational { poles } => factor_cauchy(b, poles, shift),
        Expansion::Chebyshev { a, b: hi } => {
            let s = expansion.to_scaled(shift);
            if s.norm() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "Chebyshev steps need the shift at the interval center {}, got {shift}",
                    0.5 * (a + hi)
                )));
            }
            factor_chebyshev(b, *a, *hi)
        }
    }
}

impl StructuredFactorization {
    /// Marks the factorization as belonging to a projected pencil.
    pub fn into_reduced(mut self) -> Self {
        self.kind.tag = match self.kind.tag {
            PencilTag::CauchyFull | PencilTag::CauchyReduced => PencilTag::CauchyReduced,
            _ => PencilTag::ChebyshevReduced,
        };
        self
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `λ` in `z` for an eigenvalue `μ` of `(A − σM)⁻¹M`.
    pub fn lambda_from_mu(&self, mu: C64) -> C64 {
        self.expansion.from_scaled(self.shift + ONE / mu)
    }

    pub fn step(&self, w: &BlockVector) -> Result<BlockVector> {
        if self.kind.tag.is_cauchy() {
            cauchy_step(self, w)
        } else {
            chebyshev_step(self, w)
        }
    }

    fn check(&self, w: &BlockVector) -> Result<()> {
        if w.kind.block_size != self.kind.block_size
            || w.kind.block_count != self.kind.block_count
            || w.kind.tag.is_cauchy() != self.kind.tag.is_cauchy()
            || w.data.len() != self.kind.dim()
        {
            return Err(Error::DimensionMismatch {
                context: "structured step (iterate layout)",
                expected: self.kind.dim(),
                found: w.data.len(),
            });
        }
        Ok(())
    }
}

pub fn cauchy_step(f: &StructuredFactorization, w: &BlockVector) -> Result<BlockVector> {
    f.check(w)?;
    if !f.kind.tag.is_cauchy() {
        return Err(Error::InvalidArgument(
            "cauchy_step on a Chebyshev factorization".into(),
        ));
    }
    let n = f.kind.block_size;
    let inv: Vec<C64> = f.poles.iter().map(|p| ONE / (p - f.shift)).collect();
    let mut rhs = vec![ZERO; n];
    for (i, (bi, &d)) in f.coefficients.iter().zip(&inv).enumerate() {
        bi.matvec_acc(d, w.block(i), &mut rhs);
    }
    let u = f.lu.solve(&rhs)?;
    let mut out = BlockVector::zeros(w.kind);
    for (i, &d) in inv.iter().enumerate() {
        for ((o, v), uu) in out.block_mut(i).iter_mut().zip(w.block(i)).zip(&u) {
            *o = (v - uu) * d;
        }
    }
    let last = f.kind.block_count - 1;
    out.block_mut(last).copy_from_slice(&u);
    Ok(out)
}

pub fn chebyshev_step(f: &StructuredFactorization, w: &BlockVector) -> Result<BlockVector> {
    f.check(w)?;
    if f.kind.tag.is_cauchy() {
        return Err(Error::InvalidArgument(
            "chebyshev_step on a Cauchy factorization".into(),
        ));
    }
    let order = f.order();
    let last = order - 1;
    let y = apply_m(w.kind, Some(&f.coefficients[order]), w)?;
    // e_j in `out`, with e_0 = 0, e_1 = y_0, e_{i+1} = y_i − e_{i−1}
    let mut out = BlockVector::zeros(w.kind);
    out.block_mut(1).copy_from_slice(y.block(0));
    for i in 1..last {
        let (head, tail) = out.data.split_at_mut((i + 1) * w.kind.block_size);
        let n = w.kind.block_size;
        let prev = &head[(i - 1) * n..i * n];
        for ((o, yy), p) in tail[..n].iter_mut().zip(y.block(i)).zip(prev) {
            *o = yy - p;
        }
    }
    let mut rhs = y.block(last).to_vec();
    for j in 1..order {
        chebyshev_last_row_block(&f.coefficients, j).matvec_acc(-ONE, out.block(j), &mut rhs);
    }
    let u = f.lu.solve(&rhs)?;
    for j in (0..order).step_by(2) {
        let c = if (j / 2) % 2 == 0 { ONE } else { -ONE };
        for (o, uu) in out.block_mut(j).iter_mut().zip(&u) {
            *o += c * uu;
        }
    }
    Ok(out)
}

/// `M·w` from the block template of the pencil. `b_m` is the leading
/// Chebyshev coefficient and is ignored for Cauchy kinds.
pub fn apply_m(kind: PencilKind, b_m: Option<&DenseMatrix>, w: &BlockVector) -> Result<BlockVector> {
    if w.data.len() != kind.dim() {
        return Err(Error::DimensionMismatch {
            context: "apply_m (iterate layout)",
            expected: kind.dim(),
            found: w.data.len(),
        });
    }
    let mut out = w.clone();
    let last = kind.block_count - 1;
    if kind.tag.is_cauchy() {
        out.block_mut(last).fill(ZERO);
        return Ok(out);
    }
    let b_m = b_m.ok_or_else(|| Error::InvalidArgument("apply_m needs B_m for Chebyshev kinds".into()))?;
    if b_m.rows() != kind.block_size || !b_m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "apply_m (B_m size)",
            expected: kind.block_size,
            found: b_m.rows(),
        });
    }
    for i in 1..last {
        out.block_mut(i).iter_mut().for_each(|x| *x *= 2.0);
    }
    let top = b_m.matvec(w.block(last));
    for (o, t) in out.block_mut(last).iter_mut().zip(top) {
        *o = t * 2.0;
    }
    Ok(out)
}
