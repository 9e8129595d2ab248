//! SL3(Z) by row backtracking: a primitive first row, a second row whose
//! cross product with it is primitive, then every third row `r` with
//! `r · (r1 × r2) = 1` inside the box.

use super::sl2::solve_window;
use crate::algebra::ext_gcd;
use num_integer::Integer;
use std::ops::ControlFlow;

fn gcd3(v: [i64; 3]) -> i64 {
    v[0].gcd(&v[1]).gcd(&v[2])
}

fn cross(u: [i64; 3], v: [i64; 3]) -> [i64; 3] {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

/// Push every `r` in `[-bound, bound]^3` with `r · c = 1` onto `out`.
fn third_rows(c: [i64; 3], bound: i64, out: &mut Vec<[i64; 3]>) {
    let j = (0..3).max_by_key(|&i| c[i].abs()).unwrap();
    let others: Vec<usize> = (0..3).filter(|&i| i != j).collect();
    let (p, q) = (others[0], others[1]);
    let (cj, cp, cq) = (c[j], c[p], c[q]);
    for xp in -bound..=bound {
        let rhs = 1 - cp * xp;
        if cq == 0 {
            if rhs % cj != 0 {
                continue;
            }
            let xj = rhs / cj;
            if xj.abs() > bound {
                continue;
            }
            for xq in -bound..=bound {
                let mut r = [0; 3];
                r[p] = xp;
                r[q] = xq;
                r[j] = xj;
                out.push(r);
            }
            continue;
        }
        let (g, s, t) = ext_gcd(cq, cj);
        if rhs % g != 0 {
            continue;
        }
        let m = rhs / g;
        let (xq0, xj0) = (s * m, t * m);
        // xq = xq0 + k cj/g, xj = xj0 - k cq/g
        let (stq, stj) = (cj / g, -cq / g);
        let Some(Some((l1, h1))) = solve_window(stq, xq0, bound) else { continue };
        let Some(Some((l2, h2))) = solve_window(stj, xj0, bound) else { continue };
        for k in l1.max(l2)..=h1.min(h2) {
            let mut r = [0; 3];
            r[p] = xp;
            r[q] = xq0 + k * stq;
            r[j] = xj0 + k * stj;
            out.push(r);
        }
    }
}

fn box_points(bound: i64) -> Vec<[i64; 3]> {
    let mut v = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            for z in -bound..=bound {
                v.push([x, y, z]);
            }
        }
    }
    v
}

/// Visit every element of SL3(Z) with max entry `≤ bound`, lexicographic in
/// the row-major entries.
pub fn visit<F>(bound: i64, mut f: F) -> ControlFlow<()>
where
    F: FnMut([i64; 9]) -> ControlFlow<()>,
{
    if bound < 1 {
        return ControlFlow::Continue(());
    }
    let pts = box_points(bound);
    let mut thirds = Vec::new();
    for &r1 in pts.iter().filter(|r| gcd3(**r) == 1) {
        for &r2 in &pts {
            let c = cross(r1, r2);
            if gcd3(c) != 1 {
                continue;
            }
            thirds.clear();
            third_rows(c, bound, &mut thirds);
            thirds.sort_unstable();
            for r3 in &thirds {
                f([r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2]])?;
            }
        }
    }
    ControlFlow::Continue(())
}

pub fn count(bound: i64) -> u64 {
    if bound < 1 {
        return 0;
    }
    let pts = box_points(bound);
    let mut thirds = Vec::new();
    let mut total = 0u64;
    for &r1 in pts.iter().filter(|r| gcd3(**r) == 1) {
        for &r2 in &pts {
            let c = cross(r1, r2);
            if gcd3(c) != 1 {
                continue;
            }
            thirds.clear();
            third_rows(c, bound, &mut thirds);
            total += thirds.len() as u64;
        }
    }
    total
}
