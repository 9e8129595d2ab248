//! Empirical approximation exponents: best approximations over lattice
//! balls, decay curves, their regression, orbit counts and separated sets.

mod runner;
mod search;

pub use runner::{
    pooled_estimate, predicted_kappa, run_experiment, sample_pair, write_curves, write_report, ExperimentConfig, ExperimentReport, PairReport,
    PooledEstimate,
};

use crate::algebra::{ExactAffine, ExactMatrix, GaussianInt, LatticeElement, NormGauge};
use crate::enumeration::{self, cache::decode, exact_norm, EnumerationBudget, LatticeId, LatticeSpec, OverflowPolicy};
use crate::error::{Error, Result};
use crate::spaces::{vector_norm, Point, Space, SpaceKind};
use num_complex::Complex64;
use search::Hit;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::ops::ControlFlow;

/// Which system is solved: `dist(γ⁻¹x, x₀) ≤ ε` or `dist(γx, x₀) ≤ ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Inverse,
    Forward,
}

/// Best approximation found within one search radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationRecord {
    pub pair_id: usize,
    /// Search radius `T`, a bound on the gauge norm of the linear part.
    #[serde(rename = "T")]
    pub t: f64,
    pub epsilon: f64,
    /// Gauge norm of `γ`, affine elements through their `(n+1)`-embedding.
    pub gamma_norm: f64,
    pub linear_norm: f64,
    pub lattice: LatticeId,
    /// Flat integer encoding of `γ`.
    pub gamma: Vec<i64>,
    pub direction: Direction,
    /// The search stopped at its budget; the minimum is over a subset.
    pub partial: bool,
}

/// Slope of `log ‖γ‖` against `log(1/ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub n_points: usize,
    /// `(largest, smallest)` ε level used in the fit.
    pub window: (f64, f64),
}

/// One `(x, x₀)` problem.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub space: &'a Space,
    pub lattice: LatticeSpec,
    pub x: &'a Point,
    pub x0: &'a Point,
    pub direction: Direction,
}

fn supported(space: &Space, id: LatticeId) -> bool {
    matches!(
        (space.kind, id),
        (SpaceKind::RealPlaneAffine, LatticeId::Sl2ZAffine)
            | (SpaceKind::ComplexPlaneAffine, LatticeId::Sl2GaussAffine)
            | (SpaceKind::TernaryForms { .. }, LatticeId::Sl3Z)
    )
}

impl Problem<'_> {
    fn validate(&self, t: f64) -> Result<()> {
        if !supported(self.space, self.lattice.id) {
            return Err(Error::InvalidParameter(format!(
                "lattice {} does not act on {}",
                self.lattice.id.key(),
                self.space.key()
            )));
        }
        for p in [self.x, self.x0] {
            if !self.space.contains(p) {
                return Err(Error::OffVariety(self.space.key()));
            }
        }
        if !(t >= 1.0) {
            return Err(Error::InvalidParameter(format!("search radius must be ≥ 1, got {t}")));
        }
        Ok(())
    }

    fn complex(&self) -> bool {
        self.space.kind == SpaceKind::ComplexPlaneAffine
    }

    fn residual_norm(&self, r: &[f64]) -> f64 {
        vector_norm(r, self.space.norm, self.complex())
    }

    /// The recorded `γ` for a searched `δ`: `δ⁻¹` in the inverse direction.
    fn gamma_of(&self, delta: LatticeElement) -> Result<LatticeElement> {
        match (self.direction, delta) {
            (Direction::Forward, d) => Ok(d),
            (Direction::Inverse, LatticeElement::Affine(a)) => Ok(LatticeElement::Affine(a.inverse()?)),
            (Direction::Inverse, LatticeElement::Linear(m)) => Ok(LatticeElement::Linear(m.inverse()?)),
        }
    }

    fn record(&self, pair_id: usize, t: f64, epsilon: f64, gamma: &LatticeElement, partial: bool) -> ApproximationRecord {
        ApproximationRecord {
            pair_id,
            t,
            epsilon,
            gamma_norm: exact_norm(gamma, self.lattice.gauge),
            linear_norm: exact_norm(&LatticeElement::Linear(gamma.linear().clone()), self.lattice.gauge),
            lattice: self.lattice.id,
            gamma: gamma.flat_entries(),
            direction: self.direction,
            partial,
        }
    }
}

/// Ordering of candidates: distance, then gauge norm, then flat entries.
/// Distances within `1e-12` relative count as ties.
fn better(d1: f64, n1: f64, g1: &[i64], d2: f64, n2: f64, g2: &[i64]) -> bool {
    let tie = (d1 - d2).abs() <= 1e-12 * d1.max(d2).max(1e-300);
    if !tie {
        return d1 < d2;
    }
    match n1.partial_cmp(&n2) {
        Some(Ordering::Less) => true,
        Some(Ordering::Greater) => false,
        _ => g1 < g2,
    }
}

struct Best {
    dist: f64,
    norm: f64,
    gamma: LatticeElement,
    flat: Vec<i64>,
}

impl Best {
    fn offer(slot: &mut Option<Best>, dist: f64, gamma: LatticeElement, gauge: NormGauge) {
        let norm = exact_norm(&gamma, gauge);
        let flat = gamma.flat_entries();
        let replace = match slot {
            None => true,
            Some(b) => better(dist, norm, &flat, b.dist, b.norm, &b.flat),
        };
        if replace {
            *slot = Some(Best { dist, norm, gamma, flat });
        }
    }
}

fn hit_delta(p: &Problem, h: &Hit) -> LatticeElement {
    let field = p.lattice.id.field();
    let linear = ExactMatrix::new(2, field, h.linear.to_vec()).expect("2×2 entries");
    LatticeElement::Affine(ExactAffine { linear, translation: h.translation.to_vec() })
}

fn affine_coords(p: &Problem) -> ([Complex64; 2], [Complex64; 2]) {
    let c = |pt: &Point| -> [Complex64; 2] {
        let v = pt.coords();
        if v.len() == 4 {
            [Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])]
        } else {
            [Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0)]
        }
    };
    (c(p.x), c(p.x0))
}

/// Visit hits of the affine threshold search; the budget caps the number of
/// hits examined.
fn affine_hits(p: &Problem, t: f64, thr: f64, budget: EnumerationBudget, mut f: impl FnMut(&Hit)) -> Result<bool> {
    let (x, y) = affine_coords(p);
    let mut seen = 0usize;
    let mut overflow = false;
    let mut visit = |h: Hit| {
        if budget.max_elements.is_some_and(|cap| seen >= cap) {
            overflow = true;
            return ControlFlow::Break(());
        }
        seen += 1;
        f(&h);
        ControlFlow::Continue(())
    };
    let slack = thr * (1.0 + 1e-12) + 1e-15;
    let _ = match p.lattice.id {
        LatticeId::Sl2ZAffine => search::real_hits([x[0].re, x[1].re], [y[0].re, y[1].re], t.floor() as i64, slack, &mut visit),
        LatticeId::Sl2GaussAffine => search::gaussian_hits(x, y, t, slack, &mut visit),
        _ => unreachable!("validated"),
    };
    if overflow && budget.on_overflow == OverflowPolicy::Error {
        return Err(Error::BudgetExceeded(budget.max_elements.unwrap_or(0)));
    }
    Ok(overflow)
}

fn linear_ok(p: &Problem, linear: &[GaussianInt; 4], t: f64) -> bool {
    if p.lattice.gauge == NormGauge::MaxEntry {
        return true;
    }
    let m = ExactMatrix::new(2, p.lattice.id.field(), linear.to_vec()).expect("2×2 entries");
    exact_norm(&LatticeElement::Linear(m), p.lattice.gauge) <= t
}

/// Exact best `δ` for affine lattices by threshold doubling: a search at
/// threshold `thr` sees every `δ` within `thr`, so once its minimum is
/// `≤ thr` it is the global minimum.
fn best_affine(p: &Problem, t: f64, start: f64, budget: EnumerationBudget) -> Result<(Option<Best>, bool)> {
    let mut thr = start.clamp(1e-12, 1.0);
    loop {
        let mut best: Option<Best> = None;
        let partial = affine_hits(p, t, thr, budget, |h| {
            if !linear_ok(p, &h.linear, t) {
                return;
            }
            let d = p.residual_norm(&h.residual);
            if d <= thr * (1.0 + 1e-12) {
                let gamma = p.gamma_of(hit_delta(p, h)).expect("unimodular");
                Best::offer(&mut best, d, gamma, p.lattice.gauge);
            }
        })?;
        if best.is_some() || thr >= 1.0 || partial {
            return Ok((best, partial));
        }
        thr = (thr * 2.0).min(1.0);
    }
}

/// `γ⁻¹·Q = γᵀ Q γ` (or `γ·Q` forward) for integer `γ` acting on ternary forms.
fn ternary_image(gamma: &ExactMatrix, q: &[f64], direction: Direction) -> Result<Vec<f64>> {
    let m = match direction {
        Direction::Inverse => gamma.clone(),
        Direction::Forward => gamma.inverse()?,
    };
    let g = |i: usize, j: usize| m.get(i, j).re as f64;
    let mut out = vec![0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    acc += g(k, i) * q[k * 3 + l] * g(l, j);
                }
            }
            out[i * 3 + j] = acc;
        }
    }
    Ok(out)
}

fn generic_distance(p: &Problem, gamma: &ExactMatrix) -> Result<f64> {
    let img = ternary_image(gamma, p.x.coords(), p.direction)?;
    p.space.distance(&Point(img), p.x0)
}

/// Brute force over the whole ball for linear lattices: per-level minima for
/// an increasing grid of radii.
fn generic_curve(p: &Problem, grid: &[f64], budget: EnumerationBudget) -> Result<(Vec<Option<Best>>, bool)> {
    let top = *grid.last().expect("nonempty grid");
    let mut bests: Vec<Option<Best>> = grid.iter().map(|_| None).collect();
    let mut seen = 0usize;
    let mut overflow = false;
    let mut failure = None;
    let _ = enumeration::visit_linear_parts(p.lattice.id, p.lattice.gauge, top, |m| {
        if budget.max_elements.is_some_and(|cap| seen >= cap) {
            overflow = true;
            return ControlFlow::Break(());
        }
        seen += 1;
        let norm = exact_norm(&LatticeElement::Linear(m.clone()), p.lattice.gauge);
        match generic_distance(p, &m) {
            Ok(d) => {
                for (level, slot) in grid.iter().zip(bests.iter_mut()) {
                    if norm <= *level {
                        Best::offer(slot, d, LatticeElement::Linear(m.clone()), p.lattice.gauge);
                    }
                }
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if overflow && budget.on_overflow == OverflowPolicy::Error {
        return Err(Error::BudgetExceeded(budget.max_elements.unwrap_or(0)));
    }
    Ok((bests, overflow))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty T grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("T grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Initial threshold for the affine search at radius `t`.
fn initial_threshold(t: f64) -> f64 {
    1.0 / t
}

/// Minimum of `dist(γ⁻¹x, x₀)` over `‖γ‖ ≤ t` (linear part).
pub fn best_approximation(
    problem: &Problem,
    pair_id: usize,
    t: f64,
    budget: EnumerationBudget,
) -> Result<ApproximationRecord> {
    Ok(decay_curve(problem, pair_id, &[t], budget)?.remove(0))
}

/// One record per radius of an increasing grid; epsilon is nonincreasing.
pub fn decay_curve(
    problem: &Problem,
    pair_id: usize,
    grid: &[f64],
    budget: EnumerationBudget,
) -> Result<Vec<ApproximationRecord>> {
    check_grid(grid)?;
    problem.validate(grid[0])?;
    let mut out = Vec::with_capacity(grid.len());
    if problem.lattice.id.is_affine() {
        let mut prev: Option<f64> = None;
        for &t in grid {
            let start = prev.map_or(initial_threshold(t), |e| e.min(initial_threshold(t)));
            let (best, partial) = best_affine(problem, t, start, budget)?;
            let best = best.ok_or_else(|| Error::Inconsistent("identity is always within reach".into()))?;
            prev = Some(best.dist);
            out.push(problem.record(pair_id, t, best.dist, &best.gamma, partial));
        }
    } else {
        let (bests, partial) = generic_curve(problem, grid, budget)?;
        for (t, best) in grid.iter().zip(bests) {
            let best = best.ok_or_else(|| Error::Degenerate("empty ball".into()))?;
            out.push(problem.record(pair_id, *t, best.dist, &best.gamma, partial));
        }
    }
    Ok(out)
}

/// `|{γ : ‖γ‖ ≤ t, dist(γ⁻¹x, x₀) ≤ ε}|`, linear part bounded by `t`.
pub fn count_orbit_points(problem: &Problem, epsilon: f64, t: f64) -> Result<u64> {
    problem.validate(t)?;
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter("radius must be nonnegative".into()));
    }
    let mut n = 0u64;
    if problem.lattice.id.is_affine() {
        affine_hits(problem, t, epsilon, EnumerationBudget::UNLIMITED, |h| {
            if linear_ok(problem, &h.linear, t) && problem.residual_norm(&h.residual) <= epsilon {
                n += 1;
            }
        })?;
    } else {
        let mut failure = None;
        let _ = enumeration::visit_linear_parts(problem.lattice.id, problem.lattice.gauge, t, |m| match generic_distance(problem, &m) {
            Ok(d) => {
                if d <= epsilon {
                    n += 1;
                }
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(n)
}

/// Recompute a record from its stored `γ`; returns `(epsilon, gamma_norm)`.
pub fn replay(space: &Space, lattice: LatticeSpec, x: &Point, x0: &Point, record: &ApproximationRecord) -> Result<(f64, f64)> {
    let gamma = decode(record.lattice, &record.gamma)?;
    let moved = match (record.direction, &gamma) {
        (Direction::Forward, g) => space.apply_action(&g.to_group_element(), x)?,
        (Direction::Inverse, LatticeElement::Affine(a)) => {
            space.apply_action(&LatticeElement::Affine(a.inverse()?).to_group_element(), x)?
        }
        (Direction::Inverse, LatticeElement::Linear(m)) => {
            space.apply_action(&LatticeElement::Linear(m.inverse()?).to_group_element(), x)?
        }
    };
    Ok((space.distance(&moved, x0)?, exact_norm(&gamma, lattice.gauge)))
}

/// Audit: every stored `γ` reproduces its `ε` and norm to `tol`.
pub fn audit(space: &Space, lattice: LatticeSpec, x: &Point, x0: &Point, records: &[ApproximationRecord], tol: f64) -> Result<()> {
    for r in records {
        let (eps, norm) = replay(space, lattice, x, x0, r)?;
        if (eps - r.epsilon).abs() > tol || (norm - r.gamma_norm).abs() > tol * norm.max(1.0) {
            return Err(Error::Inconsistent(format!(
                "record at T = {} replays to ε = {eps}, ‖γ‖ = {norm}; stored {} and {}",
                r.t, r.epsilon, r.gamma_norm
            )));
        }
    }
    Ok(())
}

/// Ordinary least squares `y = slope·x + intercept` with the slope's
/// standard error.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::TooFewPoints { needed: 2, have: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, intercept, stderr))
}

const MIN_FIT_POINTS: usize = 4;

/// Fit points `(log(1/ε), log N(ε))` over dyadic levels `ε_max 2^{-j}`,
/// `N(ε)` the least norm among records reaching `ε`; the top and bottom
/// levels are dropped and exact hits (`ε = 0`) ignored.
pub fn level_points(records: &[ApproximationRecord]) -> Result<Vec<(f64, f64)>> {
    let usable: Vec<&ApproximationRecord> = records.iter().filter(|r| r.epsilon > 0.0 && r.epsilon.is_finite()).collect();
    let mut distinct: Vec<f64> = usable.iter().map(|r| r.epsilon).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    match distinct.len() {
        0 => return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, have: 0 }),
        1 => return Err(Error::Degenerate("all records share one ε".into())),
        _ => {}
    }
    let (lo, hi) = (distinct[0], *distinct.last().unwrap());
    let levels: Vec<f64> = (0..).map(|j| hi * 0.5f64.powi(j)).take_while(|l| *l >= lo).collect();
    let inner = if levels.len() > 2 { &levels[1..levels.len() - 1] } else { &levels[0..0] };
    let mut out = Vec::with_capacity(inner.len());
    for &level in inner {
        let n = usable.iter().filter(|r| r.epsilon <= level).map(|r| r.gamma_norm).fold(f64::INFINITY, f64::min);
        if n.is_finite() && n > 0.0 {
            out.push((-level.ln(), n.ln()));
        }
    }
    Ok(out)
}

/// Least-squares slope of `log N(ε)` on `log(1/ε)` over [`level_points`];
/// needs at least four levels.
pub fn estimate_kappa(records: &[ApproximationRecord]) -> Result<ExponentEstimate> {
    let pts = level_points(records)?;
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, have: pts.len() });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let (slope, intercept, stderr) = ols(&xs, &ys)?;
    Ok(ExponentEstimate {
        slope,
        intercept,
        stderr,
        n_points: xs.len(),
        window: ((-xs[0]).exp(), (-xs[xs.len() - 1]).exp()),
    })
}

/// One slope shared by several curves, each with its own intercept: OLS on
/// the level points after centring every curve. The intercept reported is
/// the mean of the per-curve intercepts.
pub fn common_slope(curves: &[Vec<(f64, f64)>]) -> Result<ExponentEstimate> {
    let (mut sxx, mut sxy, mut n, mut groups) = (0.0, 0.0, 0usize, 0usize);
    let mut centred = Vec::new();
    for c in curves.iter().filter(|c| c.len() >= 2) {
        let k = c.len() as f64;
        let mx = c.iter().map(|p| p.0).sum::<f64>() / k;
        let my = c.iter().map(|p| p.1).sum::<f64>() / k;
        for &(x, y) in c {
            sxx += (x - mx).powi(2);
            sxy += (x - mx) * (y - my);
            centred.push((x - mx, y - my));
        }
        n += c.len();
        groups += 1;
    }
    if n < MIN_FIT_POINTS || groups == 0 {
        return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, have: n });
    }
    if sxx == 0.0 {
        return Err(Error::Degenerate("no spread in ε".into()));
    }
    let slope = sxy / sxx;
    let dof = n.saturating_sub(groups + 1).max(1) as f64;
    let rss: f64 = centred.iter().map(|(x, y)| (y - slope * x).powi(2)).sum();
    let intercept = curves
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let k = c.len() as f64;
            c.iter().map(|p| p.1).sum::<f64>() / k - slope * c.iter().map(|p| p.0).sum::<f64>() / k
        })
        .sum::<f64>()
        / groups as f64;
    let all_x = curves.iter().flatten().map(|p| p.0);
    let (xmin, xmax) = all_x.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    Ok(ExponentEstimate {
        slope,
        intercept,
        stderr: (rss / dof / sxx).sqrt(),
        n_points: n,
        window: ((-xmin).exp(), (-xmax).exp()),
    })
}

/// Greedy maximal subset with pairwise distance `> 2ε`; every input point is
/// within `2ε` of some kept point.
pub fn separated_set(space: &Space, points: &[Point], epsilon: f64) -> Result<Vec<Point>> {
    let mut kept: Vec<Point> = Vec::new();
    for p in points {
        let mut far = true;
        for q in &kept {
            if space.distance(p, q)? <= 2.0 * epsilon {
                far = false;
                break;
            }
        }
        if far {
            kept.push(p.clone());
        }
    }
    Ok(kept)
}

/// The lattice that acts on each catalog space in experiments.
pub fn default_lattice(space: &Space) -> Result<LatticeId> {
    match space.kind {
        SpaceKind::RealPlaneAffine => Ok(LatticeId::Sl2ZAffine),
        SpaceKind::ComplexPlaneAffine => Ok(LatticeId::Sl2GaussAffine),
        SpaceKind::TernaryForms { .. } => Ok(LatticeId::Sl3Z),
        _ => Err(Error::InvalidParameter(format!("no catalog lattice acts on {}", space.key()))),
    }
}
