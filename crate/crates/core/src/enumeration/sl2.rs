//! SL2(Z) by first rows: each primitive `(a, b)` contributes the progression
//! `(c0 + k a, d0 + k b)` of second rows.

use crate::algebra::ext_gcd;
use num_integer::Integer;
use std::ops::ControlFlow;

/// `{k : |y0 + k x| ≤ bound}` as an inclusive range; `None` when empty,
/// `Some(None)` when every `k` works (only possible for `x = 0`).
pub(crate) fn solve_window(x: i64, y0: i64, bound: i64) -> Option<Option<(i64, i64)>> {
    if x == 0 {
        return if y0.abs() <= bound { Some(None) } else { None };
    }
    let (lo, hi) = if x > 0 {
        (Integer::div_ceil(&(-bound - y0), &x), Integer::div_floor(&(bound - y0), &x))
    } else {
        (Integer::div_ceil(&(bound - y0), &x), Integer::div_floor(&(-bound - y0), &x))
    };
    if lo > hi {
        None
    } else {
        Some(Some((lo, hi)))
    }
}

/// Intersection of two windows; at least one must be bounded.
pub(crate) fn k_range(a: i64, b: i64, c0: i64, d0: i64, bound: i64) -> Option<(i64, i64)> {
    let r1 = solve_window(a, c0, bound)?;
    let r2 = solve_window(b, d0, bound)?;
    match (r1, r2) {
        (Some((l1, h1)), Some((l2, h2))) => {
            let (lo, hi) = (l1.max(l2), h1.min(h2));
            (lo <= hi).then_some((lo, hi))
        }
        (Some(r), None) | (None, Some(r)) => Some(r),
        (None, None) => None,
    }
}

/// Particular second row `(c0, d0)` with `a d0 - b c0 = 1`, if `(a, b)` is primitive.
pub(crate) fn completion(a: i64, b: i64) -> Option<(i64, i64)> {
    let (g, s, t) = ext_gcd(a, b);
    (g == 1).then_some((-t, s))
}

/// Visit every `[a, b, c, d]` in SL2(Z) with max entry `≤ bound`, in
/// lexicographic order.
pub fn visit<F>(bound: i64, mut f: F) -> ControlFlow<()>
where
    F: FnMut([i64; 4]) -> ControlFlow<()>,
{
    if bound < 1 {
        return ControlFlow::Continue(());
    }
    for a in -bound..=bound {
        for b in -bound..=bound {
            let Some((c0, d0)) = completion(a, b) else { continue };
            let Some((lo, hi)) = k_range(a, b, c0, d0, bound) else { continue };
            // c (or d when a = 0) increases with k exactly when the step is positive
            let ascending = a > 0 || (a == 0 && b > 0);
            let emit = |k: i64| [a, b, c0 + k * a, d0 + k * b];
            if ascending {
                for k in lo..=hi {
                    f(emit(k))?;
                }
            } else {
                for k in (lo..=hi).rev() {
                    f(emit(k))?;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Number of elements with max entry `≤ bound`, without materialising them.
pub fn count(bound: i64) -> u64 {
    if bound < 1 {
        return 0;
    }
    let mut total = 0u64;
    for a in -bound..=bound {
        for b in -bound..=bound {
            let Some((c0, d0)) = completion(a, b) else { continue };
            if let Some((lo, hi)) = k_range(a, b, c0, d0, bound) {
                total += (hi - lo + 1) as u64;
            }
        }
    }
    total
}
