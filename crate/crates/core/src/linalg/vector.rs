//! Small helpers on complex vectors.

use super::{C64, ZERO};

/// Hermitian inner product `xᴴy`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm2(x: &[C64]) -> f64 {
    // scaled to avoid overflow for the large iterates of inverse power steps
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.re.abs()).max(v.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = x
        .iter()
        .map(|v| {
            let (a, b) = (v.re / scale, v.im / scale);
            a * a + b * b
        })
        .sum();
    scale * ssq.sqrt()
}

/// `y ← y + alpha·x`
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: C64, x: &mut [C64]) {
    for v in x.iter_mut() {
        *v *= alpha;
    }
}

/// Normalizes `x` in place and returns its former norm. Zero vectors are
/// left untouched.
pub fn normalize(x: &mut [C64]) -> f64 {
    let nrm = norm2(x);
    if nrm > 0.0 {
        let inv = 1.0 / nrm;
        for v in x.iter_mut() {
            *v *= inv;
        }
    }
    nrm
}

pub fn max_abs_diff(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}
