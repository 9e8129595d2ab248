//! Threshold searches over affine lattice balls.
//!
//! For `δ = (B, u)` the residual `Bx + u − y` splits by coordinate: row `i`
//! of `B` alone decides the fractional part of coordinate `i`. Any `δ` whose
//! full residual norm is `≤ thr` has every coordinate residual `≤ thr`, so
//! filtering first rows by their coordinate residual and then walking the
//! second-row progression finds every such `δ`.

use crate::algebra::{ext_gcd, GaussianInt};
use crate::enumeration::{gauss, sl2};
use num_complex::Complex64;
use std::ops::ControlFlow;

/// A candidate `δ = (B, u)` with its residual `Bx + u − y` as point coordinates.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Hit {
    pub linear: [GaussianInt; 4],
    pub translation: [GaussianInt; 2],
    pub residual: Vec<f64>,
}

fn frac(v: f64) -> f64 {
    v - v.floor()
}

/// Signed distance on the circle `R/Z`, in `[-1/2, 1/2)`.
fn wrap(v: f64) -> f64 {
    v - (v + 0.5).floor()
}

/// Integers `u` with `|v + u| ≤ thr`.
fn integer_shifts(v: f64, thr: f64) -> std::ops::RangeInclusive<i64> {
    ((-thr - v).ceil() as i64)..=((thr - v).floor() as i64)
}

fn gaussian_shifts(v: Complex64, thr: f64) -> impl Iterator<Item = GaussianInt> {
    let res = integer_shifts(v.re, thr);
    let ims = integer_shifts(v.im, thr);
    res.flat_map(move |r| ims.clone().map(move |i| GaussianInt::new(r, i)))
        .filter(move |u| (v + u.to_complex()).norm() <= thr)
}

/// Sorted fractional parts `{b·x2}` with their `b`, for interval queries.
struct CircleIndex {
    keys: Vec<f64>,
    values: Vec<i64>,
}

impl CircleIndex {
    fn new(x2: f64, bound: i64) -> Self {
        let mut pairs: Vec<(f64, i64)> = (-bound..=bound).map(|b| (frac(b as f64 * x2), b)).collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        let (keys, values) = pairs.into_iter().unzip();
        CircleIndex { keys, values }
    }

    fn range(&self, lo: f64, hi: f64, out: &mut Vec<i64>) {
        let i = self.keys.partition_point(|k| *k < lo);
        let j = self.keys.partition_point(|k| *k <= hi);
        out.extend_from_slice(&self.values[i..j.max(i)]);
    }

    /// Every `b` with `{b·x2}` within `thr` of `t` on the circle.
    fn query(&self, t: f64, thr: f64, out: &mut Vec<i64>) {
        out.clear();
        if thr >= 0.5 {
            out.extend_from_slice(&self.values);
            return;
        }
        let (lo, hi) = (t - thr, t + thr);
        if lo < 0.0 {
            self.range(lo + 1.0, 1.0, out);
            self.range(0.0, hi, out);
        } else if hi >= 1.0 {
            self.range(lo, 1.0, out);
            self.range(0.0, hi - 1.0, out);
        } else {
            self.range(lo, hi, out);
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// Every `δ ∈ SL2(Z) ⋉ Z²` with max entry of `B` at most `bound` and both
/// coordinate residuals `≤ thr`.
pub(crate) fn real_hits<F>(x: [f64; 2], y: [f64; 2], bound: i64, thr: f64, mut f: F) -> ControlFlow<()>
where
    F: FnMut(Hit) -> ControlFlow<()>,
{
    if bound < 1 {
        return ControlFlow::Continue(());
    }
    let index = CircleIndex::new(x[1], bound);
    let mut bs = Vec::new();
    for a in -bound..=bound {
        index.query(frac(y[0] - a as f64 * x[0]), thr, &mut bs);
        for &b in &bs {
            if ext_gcd(a, b).0 != 1 {
                continue;
            }
            let v1 = a as f64 * x[0] + b as f64 * x[1] - y[0];
            let shifts1 = integer_shifts(v1, thr);
            if shifts1.is_empty() {
                continue;
            }
            let Some((c0, d0)) = sl2::completion(a, b) else { continue };
            let Some((lo, hi)) = sl2::k_range(a, b, c0, d0, bound) else { continue };
            for k in lo..=hi {
                let (c, d) = (c0 + k * a, d0 + k * b);
                let v2 = c as f64 * x[0] + d as f64 * x[1] - y[1];
                for u2 in integer_shifts(v2, thr) {
                    for u1 in shifts1.clone() {
                        f(Hit {
                            linear: [a, b, c, d].map(GaussianInt::int),
                            translation: [GaussianInt::int(u1), GaussianInt::int(u2)],
                            residual: vec![v1 + u1 as f64, v2 + u2 as f64],
                        })?;
                    }
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Torus buckets of `{b·x2} ∈ C/Z[i]` over `b` in the disc.
struct TorusIndex {
    side: usize,
    cells: Vec<Vec<(Complex64, GaussianInt)>>,
}

impl TorusIndex {
    fn new(x2: Complex64, radius: f64, thr: f64) -> Self {
        let disc = gauss::disc(radius);
        let by_density = (disc.len() as f64).sqrt().ceil();
        let by_threshold = (1.0 / thr.max(1e-9)).floor();
        let side = by_density.min(by_threshold).clamp(1.0, 4096.0) as usize;
        let mut cells = vec![Vec::new(); side * side];
        for b in disc {
            let z = b.to_complex() * x2;
            let p = Complex64::new(frac(z.re), frac(z.im));
            let (i, j) = (Self::cell(p.re, side), Self::cell(p.im, side));
            cells[i * side + j].push((p, b));
        }
        TorusIndex { side, cells }
    }

    fn cell(v: f64, side: usize) -> usize {
        ((v * side as f64) as usize).min(side - 1)
    }

    fn axis(&self, t: f64, thr: f64) -> Vec<usize> {
        let s = self.side as i64;
        let lo = ((t - thr) * s as f64).floor() as i64;
        let hi = ((t + thr) * s as f64).floor() as i64;
        if hi - lo + 1 >= s {
            return (0..self.side).collect();
        }
        (lo..=hi).map(|c| c.rem_euclid(s) as usize).collect()
    }

    fn query(&self, t: Complex64, thr: f64, out: &mut Vec<GaussianInt>) {
        out.clear();
        let rows = self.axis(t.re, thr);
        let cols = self.axis(t.im, thr);
        for &i in &rows {
            for &j in &cols {
                for (p, b) in &self.cells[i * self.side + j] {
                    if wrap(p.re - t.re).hypot(wrap(p.im - t.im)) <= thr {
                        out.push(*b);
                    }
                }
            }
        }
        out.sort_by(|p, q| p.lex_cmp(q));
    }
}

/// Gaussian analogue of [`real_hits`]: entry moduli of `B` at most `radius`,
/// residual moduli per coordinate `≤ thr`.
pub(crate) fn gaussian_hits<F>(x: [Complex64; 2], y: [Complex64; 2], radius: f64, thr: f64, mut f: F) -> ControlFlow<()>
where
    F: FnMut(Hit) -> ControlFlow<()>,
{
    if radius < 1.0 {
        return ControlFlow::Continue(());
    }
    let index = TorusIndex::new(x[1], radius, thr);
    let mut bs = Vec::new();
    for a in gauss::disc(radius) {
        let t = y[0] - a.to_complex() * x[0];
        index.query(Complex64::new(frac(t.re), frac(t.im)), thr, &mut bs);
        for &b in &bs {
            let Some((c0, d0)) = gauss::completion(a, b) else { continue };
            let v1 = a.to_complex() * x[0] + b.to_complex() * x[1] - y[0];
            let shifts1: Vec<GaussianInt> = gaussian_shifts(v1, thr).collect();
            if shifts1.is_empty() {
                continue;
            }
            let mut steps = gauss::admissible_steps(a, b, c0, d0, radius);
            steps.sort_by(|p, q| p.lex_cmp(q));
            for k in steps {
                let (c, d) = (c0 + k * a, d0 + k * b);
                let v2 = c.to_complex() * x[0] + d.to_complex() * x[1] - y[1];
                for u2 in gaussian_shifts(v2, thr) {
                    for &u1 in &shifts1 {
                        let r1 = v1 + u1.to_complex();
                        let r2 = v2 + u2.to_complex();
                        f(Hit { linear: [a, b, c, d], translation: [u1, u2], residual: vec![r1.re, r1.im, r2.re, r2.im] })?;
                    }
                }
            }
        }
    }
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_centered() {
        assert!((wrap(0.75) + 0.25).abs() < 1e-15);
        assert!((wrap(-0.75) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn shifts_cover_band() {
        let r: Vec<i64> = integer_shifts(2.3, 0.31).collect();
        assert_eq!(r, vec![-2]);
        assert!(integer_shifts(2.5, 0.1).is_empty());
    }
}
