//! Exhaustive brute-force oracles shared by the integration tests. Each one
//! loops over every candidate directly and shares no search code with the
//! library.
#![allow(dead_code)]

/// Every `[a, b, c, d]` with `ad − bc = 1` and max entry `≤ t`, sorted.
pub fn sl2z_ball(t: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in -t..=t {
        for b in -t..=t {
            for c in -t..=t {
                if a == 0 {
                    // then −bc = 1 and d is free
                    if b * c == -1 {
                        out.extend((-t..=t).map(|d| [a, b, c, d]));
                    }
                } else if (1 + b * c) % a == 0 {
                    let d = (1 + b * c) / a;
                    if d.abs() <= t {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

fn det3(m: &[i64; 9]) -> i64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
}

/// Every integer 3×3 matrix of determinant one with max entry `≤ t`, sorted.
pub fn sl3z_ball(t: i64) -> Vec<[i64; 9]> {
    let side = (2 * t + 1) as usize;
    let rows: Vec<[i64; 3]> = (0..side.pow(3))
        .map(|k| {
            let (x, y, z) = (k / (side * side), (k / side) % side, k % side);
            [x as i64 - t, y as i64 - t, z as i64 - t]
        })
        .collect();
    let mut out = Vec::new();
    for r1 in &rows {
        for r2 in &rows {
            for r3 in &rows {
                let m = [r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2]];
                if det3(&m) == 1 {
                    out.push(m);
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Gaussian 2×2 matrices `(re, im)` of determinant one with entry moduli
/// `≤ r`, as `[a, b, c, d]` flattened to 8 integers, sorted.
pub fn sl2_gauss_ball(r: i64) -> Vec<[i64; 8]> {
    let disc: Vec<(i64, i64)> =
        (-r..=r).flat_map(|x| (-r..=r).map(move |y| (x, y))).filter(|(x, y)| x * x + y * y <= r * r).collect();
    let mul = |p: (i64, i64), q: (i64, i64)| (p.0 * q.0 - p.1 * q.1, p.0 * q.1 + p.1 * q.0);
    let mut out = Vec::new();
    for &a in &disc {
        for &b in &disc {
            for &c in &disc {
                for &d in &disc {
                    let ad = mul(a, d);
                    let bc = mul(b, c);
                    if ad.0 - bc.0 == 1 && ad.1 - bc.1 == 0 {
                        out.push([a.0, a.1, b.0, b.1, c.0, c.1, d.0, d.1]);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Best inverse-direction approximation for `SL2(Z) ⋉ Z²` on the plane:
/// over `δ = (B, u)` with `‖B‖_max ≤ t`, minimise `|Bx + u − x0|`, scanning
/// each translation coordinate over `±(2t + 2)`. Ties within `1e-12`
/// relative go to the smaller max-entry norm of `γ = δ⁻¹`, then to the
/// lexicographically smaller flat entries of `γ`.
/// Returns `(epsilon, gamma flat entries)`.
pub fn best_affine_plane(x: [f64; 2], x0: [f64; 2], t: i64) -> (f64, Vec<i64>) {
    let span = 2 * t + 2;
    let mut best: Option<(f64, i64, Vec<i64>)> = None;
    for [a, b, c, d] in sl2z_ball(t) {
        let v = [a as f64 * x[0] + b as f64 * x[1] - x0[0], c as f64 * x[0] + d as f64 * x[1] - x0[1]];
        let pick = |vi: f64| -> i64 {
            let mut arg = -span;
            for u in -span..=span {
                if (vi + u as f64).abs() < (vi + arg as f64).abs() {
                    arg = u;
                }
            }
            arg
        };
        let (u1, u2) = (pick(v[0]), pick(v[1]));
        let dist = (v[0] + u1 as f64).hypot(v[1] + u2 as f64);
        // γ = (B⁻¹, −B⁻¹u)
        let (ia, ib, ic, id) = (d, -b, -c, a);
        let tr = [-(ia * u1 + ib * u2), -(ic * u1 + id * u2)];
        let flat = vec![ia, ib, ic, id, tr[0], tr[1]];
        let norm = flat.iter().map(|e| e.abs()).max().unwrap().max(1);
        let replace = match &best {
            None => true,
            Some((bd, bn, bf)) => {
                if (dist - bd).abs() <= 1e-12 * dist.max(*bd) {
                    (norm, &flat) < (*bn, bf)
                } else {
                    dist < *bd
                }
            }
        };
        if replace {
            best = Some((dist, norm, flat));
        }
    }
    let (dist, _, flat) = best.expect("identity is in every ball");
    (dist, flat)
}

/// `|{δ = (B, u) : ‖B‖_max ≤ t, |Bx + u − x0| ≤ eps}|` by scanning every
/// translation in `[−(2t+2), 2t+2]²`.
pub fn count_affine_plane(x: [f64; 2], x0: [f64; 2], eps: f64, t: i64) -> u64 {
    let span = 2 * t + 2;
    let mut n = 0;
    for [a, b, c, d] in sl2z_ball(t) {
        let v = [a as f64 * x[0] + b as f64 * x[1] - x0[0], c as f64 * x[0] + d as f64 * x[1] - x0[1]];
        let near = |vi: f64| -> Vec<f64> {
            (-span..=span).map(|u| vi + u as f64).filter(|r| r.abs() <= eps).collect()
        };
        let (r1, r2) = (near(v[0]), near(v[1]));
        for p in &r1 {
            for q in &r2 {
                if p.hypot(*q) <= eps {
                    n += 1;
                }
            }
        }
    }
    n
}

/// `γᵀ Q γ` for an integer 3×3 `γ` and symmetric `Q` (row-major).
pub fn congruence(g: &[i64; 9], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    out[i * 3 + j] += g[k * 3 + i] as f64 * q[k * 3 + l] * g[l * 3 + j] as f64;
                }
            }
        }
    }
    out
}
