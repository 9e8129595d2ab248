//! SL2(Z[i]) with entry moduli bounded by `radius`.

use crate::algebra::{gaussian_ext_gcd, GaussianInt};
use std::ops::ControlFlow;

/// Gaussian integers in the closed disc of the given radius, lexicographic.
pub fn disc(radius: f64) -> Vec<GaussianInt> {
    if radius < 0.0 {
        return Vec::new();
    }
    let r = radius.floor() as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    for re in -r..=r {
        for im in -r..=r {
            if ((re * re + im * im) as f64) <= r2 {
                out.push(GaussianInt::new(re, im));
            }
        }
    }
    out
}

pub(crate) fn within(z: GaussianInt, r2: f64) -> bool {
    (z.norm() as f64) <= r2
}

/// Particular second row `(c0, d0)` with `a d0 - b c0 = 1`, if `(a, b)` is coprime.
pub(crate) fn completion(a: GaussianInt, b: GaussianInt) -> Option<(GaussianInt, GaussianInt)> {
    let (g, s, t) = gaussian_ext_gcd(a, b);
    let ginv = g.unit_inverse()?;
    Some((-(t * ginv), s * ginv))
}

/// All `k ∈ Z[i]` with `|c0 + k a| ≤ radius` and `|d0 + k b| ≤ radius`.
pub(crate) fn admissible_steps(
    a: GaussianInt,
    b: GaussianInt,
    c0: GaussianInt,
    d0: GaussianInt,
    radius: f64,
) -> Vec<GaussianInt> {
    let r2 = radius * radius;
    // the disc attached to the larger of |a|, |b| is the smaller one
    let (x, y0) = if a.norm() >= b.norm() { (a, c0) } else { (b, d0) };
    let xf = x.to_complex();
    let center = -y0.to_complex() / xf;
    let rk = radius / xf.norm();
    let mut out = Vec::new();
    let re_lo = (center.re - rk).floor() as i64 - 1;
    let re_hi = (center.re + rk).ceil() as i64 + 1;
    let im_lo = (center.im - rk).floor() as i64 - 1;
    let im_hi = (center.im + rk).ceil() as i64 + 1;
    for kr in re_lo..=re_hi {
        for ki in im_lo..=im_hi {
            let k = GaussianInt::new(kr, ki);
            if within(c0 + k * a, r2) && within(d0 + k * b, r2) {
                out.push(k);
            }
        }
    }
    out
}

/// Visit every element of SL2(Z[i]) with entry moduli `≤ radius`, in
/// lexicographic order of `(a, b, c, d)` compared by `(re, im)`.
pub fn visit<F>(radius: f64, mut f: F) -> ControlFlow<()>
where
    F: FnMut([GaussianInt; 4]) -> ControlFlow<()>,
{
    if radius < 1.0 {
        return ControlFlow::Continue(());
    }
    let d = disc(radius);
    let mut batch: Vec<[GaussianInt; 4]> = Vec::new();
    for &a in &d {
        for &b in &d {
            let Some((c0, d0)) = completion(a, b) else { continue };
            batch.clear();
            for k in admissible_steps(a, b, c0, d0, radius) {
                batch.push([a, b, c0 + k * a, d0 + k * b]);
            }
            batch.sort_by(|p, q| p[2].lex_cmp(&q[2]).then(p[3].lex_cmp(&q[3])));
            for g in &batch {
                f(*g)?;
            }
        }
    }
    ControlFlow::Continue(())
}

/// Element count with entry moduli `≤ radius`.
pub fn count(radius: f64) -> u64 {
    if radius < 1.0 {
        return 0;
    }
    let d = disc(radius);
    let mut total = 0u64;
    for &a in &d {
        for &b in &d {
            if let Some((c0, d0)) = completion(a, b) {
                total += admissible_steps(a, b, c0, d0, radius).len() as u64;
            }
        }
    }
    total
}
