//! Volume growth `m_H(H_t) ≈ T^a` of gauge balls in the acting subgroup:
//! closed forms and Monte Carlo in Cartan (KAK) coordinates.
//!
//! A chart integrates `∏_α g(α(u))^{m_α}` over the gap coordinates
//! `u ≥ 0` of a positive Weyl chamber, restricted to `Σ w_k u_k ≤ t` where
//! `Σ w_k u_k` is the log operator norm. Products of charts multiply volumes.

use crate::algebra::NormGauge;
use crate::error::{Error, Result};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldLabel {
    Real,
    Complex,
    /// The p-adic numbers for the given prime.
    PAdic(u32),
}

impl FieldLabel {
    /// Root multiplicity over this field (real dimension per F-dimension
    /// for the archimedean fields).
    pub fn multiplicity(self) -> i64 {
        match self {
            FieldLabel::Complex => 2,
            _ => 1,
        }
    }

    pub fn label(self) -> String {
        match self {
            FieldLabel::Real => "R".into(),
            FieldLabel::Complex => "C".into(),
            FieldLabel::PAdic(p) => format!("Q{p}"),
        }
    }
}

/// Structural description of an acting subgroup `H` inside its ambient group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupDescriptor {
    /// `SL_n(F)` in its defining representation.
    SpecialLinear { n: usize, field: FieldLabel },
    /// The image of `SL2(F)` under a representation with the given
    /// irreducible block dimensions; `[n]` is the irreducible `σ_n`.
    Sl2Image { blocks: Vec<usize>, field: FieldLabel },
    /// The diagonal copy of `SL_n(F)` in `SL_n(F)^copies`.
    Diagonal { n: usize, field: FieldLabel, copies: usize },
    Product(Vec<GroupDescriptor>),
}

/// Exact volume-growth exponent `a`.
pub fn closed_form_exponent(desc: &GroupDescriptor) -> Result<Rational> {
    match desc {
        GroupDescriptor::SpecialLinear { n, field } => {
            if *n < 2 {
                return Err(Error::InvalidParameter("SL_n needs n ≥ 2".into()));
            }
            let n = *n as i64;
            Ok(Rational::from_integer(field.multiplicity() * (n * n - n)))
        }
        GroupDescriptor::Sl2Image { blocks, field } => {
            let top = blocks.iter().copied().max().unwrap_or(0);
            if top < 2 {
                return Err(Error::InvalidParameter("trivial SL2 representation has no growth".into()));
            }
            Ok(Rational::new(2 * field.multiplicity(), top as i64 - 1))
        }
        GroupDescriptor::Diagonal { n, field, copies } => {
            if *copies == 0 {
                return Err(Error::InvalidParameter("diagonal needs at least one copy".into()));
            }
            closed_form_exponent(&GroupDescriptor::SpecialLinear { n: *n, field: *field })
        }
        GroupDescriptor::Product(parts) => {
            if parts.is_empty() {
                return Err(Error::InvalidParameter("empty product".into()));
            }
            parts.iter().map(closed_form_exponent).sum()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthMethod {
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeGrowth {
    pub a: f64,
    /// Exact value when known in closed form.
    pub a_exact: Option<(i64, i64)>,
    pub stderr: f64,
    /// Fitted power of `log T` (reported, not certified).
    pub log_power: Option<f64>,
    pub gauge: NormGauge,
    pub method: GrowthMethod,
}

/// Closed-form growth. All three gauges are equivalent up to constants and so
/// share the exponent.
pub fn growth_exponent_closed_form(desc: &GroupDescriptor, gauge: NormGauge) -> Result<VolumeGrowth> {
    let a = closed_form_exponent(desc)?;
    Ok(VolumeGrowth {
        a: *a.numer() as f64 / *a.denom() as f64,
        a_exact: Some((*a.numer(), *a.denom())),
        stderr: 0.0,
        log_power: Some(0.0),
        gauge,
        method: GrowthMethod::ClosedForm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityKind {
    /// `sinh(α(u))^m`, the Cartan density of a semisimple group.
    Sinh,
    /// `exp(m α(u))`, for analytic self-tests.
    Exp,
}

/// One positive root in gap coordinates with its multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootTerm {
    pub coeffs: Vec<f64>,
    pub multiplicity: f64,
}

/// Integration domain `{u ≥ 0 : Σ w_k u_k ≤ t}` with a product density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexChart {
    pub norm_weights: Vec<f64>,
    pub roots: Vec<RootTerm>,
    pub density: DensityKind,
}

impl SimplexChart {
    pub fn rank(&self) -> usize {
        self.norm_weights.len()
    }

    /// Type A chamber of `SL_n(F)` with log operator norm `t_1`.
    pub fn special_linear(n: usize, multiplicity: f64) -> Self {
        let r = n - 1;
        let norm_weights = (1..=r).map(|k| (n - k) as f64 / n as f64).collect();
        let mut roots = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut c = vec![0.0; r];
                for item in c.iter_mut().take(j).skip(i) {
                    *item = 1.0;
                }
                roots.push(RootTerm { coeffs: c, multiplicity });
            }
        }
        SimplexChart { norm_weights, roots, density: DensityKind::Sinh }
    }

    /// `SL2(F)` embedded so that its log operator norm is `(top - 1)/2` times
    /// the root value.
    pub fn sl2_image(top_block: usize, multiplicity: f64) -> Self {
        SimplexChart {
            norm_weights: vec![(top_block as f64 - 1.0) / 2.0],
            roots: vec![RootTerm { coeffs: vec![1.0], multiplicity }],
            density: DensityKind::Sinh,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rank() == 0 || self.norm_weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter("chart needs positive norm weights".into()));
        }
        if self.roots.iter().any(|r| r.coeffs.len() != self.rank()) {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: self.roots.iter().map(|r| r.coeffs.len()).find(|&l| l != self.rank()).unwrap(),
            });
        }
        Ok(())
    }

    /// Leading exponential rates per gap coordinate.
    fn rates(&self) -> Vec<f64> {
        (0..self.rank())
            .map(|k| self.roots.iter().map(|r| r.multiplicity * r.coeffs[k]).sum())
            .collect()
    }

    /// Log of the density, for quadrature and diagnostics.
    pub fn log_density(&self, u: &[f64]) -> f64 {
        self.roots
            .iter()
            .map(|r| {
                let x: f64 = r.coeffs.iter().zip(u).map(|(c, v)| c * v).sum();
                r.multiplicity
                    * match self.density {
                        DensityKind::Sinh => log_sinh(x),
                        DensityKind::Exp => x,
                    }
            })
            .sum()
    }
}

fn log_sinh(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
}

/// Truncated exponential on `[0, t]` with rate `r ≥ 0` (uniform at `r = 0`).
#[derive(Clone, Copy)]
struct TruncExp {
    rate: f64,
    t: f64,
}

impl TruncExp {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let v: f64 = rng.gen();
        if self.rate * self.t < 1e-12 {
            return v * self.t;
        }
        // inverse cdf of r e^{-r x} / (1 - e^{-r t})
        -(-v * (-(-self.rate * self.t).exp_m1())).ln_1p() / self.rate
    }

    /// `log q(x) + r x`, constant in `x`.
    fn log_norm(&self) -> f64 {
        if self.rate * self.t < 1e-12 {
            -self.t.ln()
        } else {
            self.rate.ln() - (-(-self.rate * self.t).exp_m1()).ln()
        }
    }
}

/// Log volume estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogVolume {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McBudget {
    pub samples: usize,
    /// Fail when the achieved stderr of the log volume exceeds this.
    pub max_stderr: Option<f64>,
}

impl Default for McBudget {
    fn default() -> Self {
        McBudget { samples: 1_000_000, max_stderr: None }
    }
}

const BATCHES: u64 = 32;

#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        Moments { n: self.n + o.n, sum: self.sum + o.sum, sum_sq: self.sum_sq + o.sum_sq }
    }
}

fn simplex_log_volume(chart: &SimplexChart, t: f64, samples: usize, seed: u64, stream: u64) -> Result<LogVolume> {
    chart.validate()?;
    let r = chart.rank();
    let lambda = chart.rates();
    let mu: Vec<f64> = lambda.iter().zip(&chart.norm_weights).map(|(l, w)| l / w).collect();
    let star = (0..r).fold(0, |best, k| if mu[k] > mu[best] { k } else { best });
    let mu_star = mu[star];
    let slack = TruncExp { rate: mu_star, t };
    let sides: Vec<(usize, TruncExp)> =
        (0..r).filter(|&k| k != star).map(|k| (k, TruncExp { rate: (mu_star - mu[k]).max(0.0), t })).collect();
    let log_const = mu_star * t
        - slack.log_norm()
        - sides.iter().map(|(_, d)| d.log_norm()).sum::<f64>()
        - chart.norm_weights.iter().map(|w| w.ln()).sum::<f64>()
        - match chart.density {
            DensityKind::Sinh => chart.roots.iter().map(|a| a.multiplicity).sum::<f64>() * std::f64::consts::LN_2,
            DensityKind::Exp => 0.0,
        };

    let per_batch = samples.div_ceil(BATCHES as usize).max(1);
    let moments: Vec<Moments> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream * BATCHES + b);
            let mut m = Moments::default();
            let mut s = vec![0.0; r];
            let mut u = vec![0.0; r];
            for _ in 0..per_batch {
                let z = slack.sample(&mut rng);
                let mut used = z;
                for (k, d) in &sides {
                    s[*k] = d.sample(&mut rng);
                    used += s[*k];
                }
                let w = if used > t {
                    0.0
                } else {
                    s[star] = t - used;
                    for k in 0..r {
                        u[k] = s[k] / chart.norm_weights[k];
                    }
                    match chart.density {
                        DensityKind::Exp => 1.0,
                        DensityKind::Sinh => chart
                            .roots
                            .iter()
                            .map(|a| {
                                let x: f64 = a.coeffs.iter().zip(&u).map(|(c, v)| c * v).sum();
                                (-(-2.0 * x).exp()).ln_1p() * a.multiplicity
                            })
                            .sum::<f64>()
                            .exp(),
                    }
                };
                m.n += 1.0;
                m.sum += w;
                m.sum_sq += w * w;
            }
            m
        })
        .collect();
    let m = moments.into_iter().fold(Moments::default(), Moments::merge);
    let mean = m.sum / m.n;
    if !(mean > 0.0) {
        return Err(Error::Degenerate(format!("no sample landed in the chart at t = {t}")));
    }
    let var = (m.sum_sq / m.n - mean * mean).max(0.0);
    let rel = (var / m.n).sqrt() / mean;
    Ok(LogVolume { t, value: log_const + mean.ln(), stderr: rel })
}

/// Chart for an acting subgroup: a product of simplex charts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanChart {
    pub factors: Vec<SimplexChart>,
}

impl CartanChart {
    pub fn for_group(desc: &GroupDescriptor) -> Result<Self> {
        let real_mult = |f: &FieldLabel| -> Result<f64> {
            match f {
                FieldLabel::Real => Ok(1.0),
                FieldLabel::Complex => Ok(2.0),
                FieldLabel::PAdic(_) => {
                    Err(Error::InvalidParameter("p-adic groups have no Monte Carlo chart".into()))
                }
            }
        };
        Ok(match desc {
            GroupDescriptor::SpecialLinear { n, field } | GroupDescriptor::Diagonal { n, field, .. } => {
                if *n < 2 {
                    return Err(Error::InvalidParameter("SL_n needs n ≥ 2".into()));
                }
                CartanChart { factors: vec![SimplexChart::special_linear(*n, real_mult(field)?)] }
            }
            GroupDescriptor::Sl2Image { blocks, field } => {
                let top = blocks.iter().copied().max().unwrap_or(0);
                if top < 2 {
                    return Err(Error::InvalidParameter("trivial SL2 representation".into()));
                }
                CartanChart { factors: vec![SimplexChart::sl2_image(top, real_mult(field)?)] }
            }
            GroupDescriptor::Product(parts) => {
                let mut factors = Vec::new();
                for p in parts {
                    factors.extend(CartanChart::for_group(p)?.factors);
                }
                CartanChart { factors }
            }
        })
    }

    pub fn single(chart: SimplexChart) -> Self {
        CartanChart { factors: vec![chart] }
    }
}

/// `log m_H(H_t)` up to the Haar normalisation constant.
pub fn monte_carlo_log_volume(chart: &CartanChart, t: f64, budget: McBudget, seed: u64) -> Result<LogVolume> {
    mc_log_volume_stream(chart, t, budget, seed, 0)
}

fn mc_log_volume_stream(chart: &CartanChart, t: f64, budget: McBudget, seed: u64, stream: u64) -> Result<LogVolume> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("log-norm level must be positive, got {t}")));
    }
    if budget.samples == 0 {
        return Err(Error::InvalidParameter("zero Monte Carlo samples".into()));
    }
    if chart.factors.is_empty() {
        return Err(Error::InvalidParameter("empty chart".into()));
    }
    let mut value = 0.0;
    let mut var = 0.0;
    for (i, f) in chart.factors.iter().enumerate() {
        let lv = simplex_log_volume(f, t, budget.samples, seed, stream * 64 + i as u64)?;
        value += lv.value;
        var += lv.stderr * lv.stderr;
    }
    let stderr = var.sqrt();
    if let Some(target) = budget.max_stderr {
        if stderr > target {
            return Err(Error::BudgetTooSmall { achieved: stderr, target });
        }
    }
    Ok(LogVolume { t, value, stderr })
}

/// Weighted least-squares line through `(x, y)` with per-point standard
/// errors. Returns `(slope, intercept, slope_stderr)`.
pub fn weighted_slope(x: &[f64], y: &[f64], sigma: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n || sigma.len() != n {
        return Err(Error::TooFewPoints { needed: 2, have: n.min(y.len()) });
    }
    let floor = sigma.iter().copied().filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        // no per-point errors: plain least squares with residual-based error
        return residual_slope(x, y);
    }
    let w: Vec<f64> = sigma.iter().map(|s| if *s > 0.0 { 1.0 / (s * s) } else { 1.0 / (floor * floor) }).collect();
    let sw: f64 = w.iter().sum();
    let xm = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(x).map(|(a, b)| a * (b - xm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((a, b), c)| a * (b - xm) * (c - ym)).sum();
    let slope = sxy / sxx;
    Ok((slope, ym - slope * xm, (1.0 / sxx).sqrt()))
}

/// Unweighted least squares; the slope error comes from the residual scatter,
/// so it also picks up curvature the straight line misses.
fn residual_slope(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, have: n });
    }
    let xm = x.iter().sum::<f64>() / n as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - xm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let slope = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum::<f64>() / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok((slope, intercept, (rss / (n - 2) as f64 / sxx).sqrt()))
}

/// Ordinary least squares for `y = c0 + c1 x1 + c2 x2`.
fn fit_two_regressors(x1: &[f64], x2: &[f64], y: &[f64]) -> Option<[f64; 3]> {
    let rows: Vec<[f64; 3]> = x1.iter().zip(x2).map(|(a, b)| [1.0, *a, *b]).collect();
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut aty = nalgebra::Vector3::<f64>::zeros();
    for (r, yv) in rows.iter().zip(y) {
        for i in 0..3 {
            aty[i] += r[i] * yv;
            for j in 0..3 {
                ata[(i, j)] += r[i] * r[j];
            }
        }
    }
    let sol = ata.try_inverse()? * aty;
    Some([sol[0], sol[1], sol[2]])
}

/// Slope of `log m(H_t)` against `t` over a grid of at least four levels.
pub fn estimate_growth_exponent(
    chart: &CartanChart,
    t_grid: &[f64],
    budget: McBudget,
    seed: u64,
    gauge: NormGauge,
) -> Result<(VolumeGrowth, Vec<LogVolume>)> {
    if t_grid.len() < 4 {
        return Err(Error::TooFewPoints { needed: 4, have: t_grid.len() });
    }
    let points: Vec<LogVolume> = t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| mc_log_volume_stream(chart, t, budget, seed, 1 + i as u64))
        .collect::<Result<_>>()?;
    let t: Vec<f64> = points.iter().map(|p| p.t).collect();
    let v: Vec<f64> = points.iter().map(|p| p.value).collect();
    let s: Vec<f64> = points.iter().map(|p| p.stderr).collect();
    let (a, _, stat) = weighted_slope(&t, &v, &s)?;
    // Sampling error and lack of fit (subleading terms of the volume) in quadrature.
    let (_, _, lack) = residual_slope(&t, &v)?;
    let stderr = stat.hypot(lack);
    let log_t: Vec<f64> = t.iter().map(|x| x.ln()).collect();
    let log_power = fit_two_regressors(&t, &log_t, &v).map(|c| c[2]);
    Ok((
        VolumeGrowth { a, a_exact: None, stderr, log_power, gauge, method: GrowthMethod::MonteCarlo },
        points,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let r = |n, d| Rational::new(n, d);
        let sl = |n, field| GroupDescriptor::SpecialLinear { n, field };
        assert_eq!(closed_form_exponent(&sl(2, FieldLabel::Real)).unwrap(), r(2, 1));
        assert_eq!(closed_form_exponent(&sl(2, FieldLabel::Complex)).unwrap(), r(4, 1));
        assert_eq!(closed_form_exponent(&sl(3, FieldLabel::Real)).unwrap(), r(6, 1));
        assert_eq!(closed_form_exponent(&sl(3, FieldLabel::PAdic(5))).unwrap(), r(6, 1));
        let sigma = |n| GroupDescriptor::Sl2Image { blocks: vec![n], field: FieldLabel::Real };
        assert_eq!(closed_form_exponent(&sigma(3)).unwrap(), r(1, 1));
        assert_eq!(closed_form_exponent(&sigma(5)).unwrap(), r(1, 2));
        let prod = GroupDescriptor::Product(vec![sl(2, FieldLabel::Real); 3]);
        assert_eq!(closed_form_exponent(&prod).unwrap(), r(6, 1));
    }

    #[test]
    fn truncated_exponential_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for rate in [0.0, 1e-9, 0.5, 6.0, 40.0] {
            let d = TruncExp { rate, t: 3.0 };
            for _ in 0..1000 {
                let x = d.sample(&mut rng);
                assert!((0.0..=3.0).contains(&x));
            }
        }
    }

    #[test]
    fn rejects_nonpositive_level() {
        let chart = CartanChart::single(SimplexChart::special_linear(2, 1.0));
        assert!(monte_carlo_log_volume(&chart, 0.0, McBudget::default(), 1).is_err());
    }
}
