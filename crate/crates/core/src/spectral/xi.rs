//! Harish-Chandra's Ξ function of SL2(R) and SL2(C) at
//! `a_t = diag(e^{t/2}, e^{-t/2})`, by adaptive trapezoid quadrature of the
//! K-average of `δ^{-1/2}(a_t k)`.

use crate::error::{Error, Result};
use crate::volume::FieldLabel;

const REL_TOL: f64 = 1e-8;
const MAX_NODES: usize = 1 << 20;
const TAIL: f64 = 40.0;

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Composite trapezoid on `[lo, hi]`, halving the step until two successive
/// estimates agree to `REL_TOL`.
fn adaptive_trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let mut n = 16usize;
    let mut h = (hi - lo) / n as f64;
    let mut sum = 0.5 * (f(lo) + f(hi)) + (1..n).map(|i| f(lo + i as f64 * h)).sum::<f64>();
    let mut est = sum * h;
    while n < MAX_NODES {
        // new midpoints only
        let mids: f64 = (0..n).map(|i| f(lo + (i as f64 + 0.5) * h)).sum();
        sum += mids;
        n *= 2;
        h *= 0.5;
        let next = sum * h;
        if (next - est).abs() <= REL_TOL * next.abs() {
            return Ok(next);
        }
        est = next;
    }
    Err(Error::QuadratureDiverged(MAX_NODES))
}

/// `Ξ(a_t)` for `SL2(F)`, `F = R` or `C`. Even in `t`.
pub fn xi2_numeric(field: FieldLabel, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("Ξ argument"));
    }
    let t = t.abs();
    match field {
        FieldLabel::Real => {
            // circle average with tan θ = e^y
            let log_f = |y: f64| y - 0.5 * (softplus(2.0 * y) + t + softplus(2.0 * y - 2.0 * t));
            let integral = adaptive_trapezoid(|y| log_f(y).exp(), -TAIL, t + TAIL)?;
            Ok(integral * 2.0 / std::f64::consts::PI)
        }
        FieldLabel::Complex => {
            // 3-sphere average reduces to |v1|² = e^{-w} uniform
            let log_f = |w: f64| {
                let a = t - w;
                let b = -t + (-(-w).exp()).ln_1p();
                let m = a.max(b);
                -w - (m + ((a - m).exp() + (b - m).exp()).ln())
            };
            adaptive_trapezoid(|w| log_f(w).exp(), 0.0, 2.0 * t + TAIL)
        }
        FieldLabel::PAdic(_) => Err(Error::InvalidParameter("Ξ quadrature is archimedean only".into())),
    }
}

/// Howe–Tan functional: the minimum over ordered pairs `i ≠ j` of
/// `Ξ₂(log(a_i / a_j))` for a positive diagonal `a`.
pub fn howe_tan_psi(diagonal: &[f64]) -> Result<f64> {
    if diagonal.len() < 2 {
        return Err(Error::InvalidParameter("need at least two diagonal entries".into()));
    }
    if diagonal.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter("diagonal entries must be positive".into()));
    }
    let mut best = f64::INFINITY;
    for (i, ai) in diagonal.iter().enumerate() {
        for (j, aj) in diagonal.iter().enumerate() {
            if i != j {
                best = best.min(xi2_numeric(FieldLabel::Real, (ai / aj).ln())?);
            }
        }
    }
    Ok(best)
}

/// `∫_0^T Ξ₂(t)^q sinh(t) dt`, the truncated `L^q` mass of Ξ₂ against the
/// Cartan density of SL2(R) in the same parametrisation.
pub fn truncated_xi_moment(q: f64, upper: f64, step: f64) -> Result<f64> {
    if !(upper >= 0.0) || !(step > 0.0) {
        return Err(Error::InvalidParameter("bad truncation".into()));
    }
    let n = (upper / step).ceil().max(1.0) as usize;
    let h = upper / n as f64;
    let f = |t: f64| -> Result<f64> { Ok(xi2_numeric(FieldLabel::Real, t)?.powf(q) * t.sinh()) };
    // composite Simpson needs an even count
    let n = if n % 2 == 1 { n + 1 } else { n };
    let h = if n as f64 * h > upper { upper / n as f64 } else { h };
    let mut acc = f(0.0)? + f(upper)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}
