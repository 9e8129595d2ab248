//! Experiment configuration, orchestration and report output.

use super::{audit, common_slope, decay_curve, default_lattice, estimate_kappa, level_points, ApproximationRecord, Direction, ExponentEstimate, Problem};
use crate::algebra::NormGauge;
use crate::enumeration::{EnumerationBudget, LatticeId, LatticeSpec, OverflowPolicy};
use crate::error::{Error, Result};
use crate::exponents::{complex_plane_affine, real_plane_affine, ternary_forms, Exact};
use crate::spaces::{Point, Space, SpaceKind, Window};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

const AUDIT_TOL: f64 = 1e-10;

fn default_gauge() -> String {
    NormGauge::MaxEntry.key().into()
}
fn default_pairs() -> usize {
    20
}
fn default_window() -> Window {
    Window::UNIT
}
fn default_tolerance() -> f64 {
    0.2
}
fn default_pair_tolerance() -> f64 {
    0.3
}
fn default_pair_fraction() -> f64 {
    0.8
}

/// Field names double as the JSON config schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Space catalog key.
    pub space: String,
    /// Lattice key; defaults to the lattice acting on the space.
    #[serde(default)]
    pub lattice: Option<String>,
    #[serde(default = "default_gauge")]
    pub gauge: String,
    /// Increasing search radii.
    pub t_grid: Vec<f64>,
    /// Number of `(x, x₀)` pairs.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_window")]
    pub window: Window,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Allowed distance of the pooled slope from the prediction.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Allowed distance of a single pair's slope from the prediction.
    #[serde(default = "default_pair_tolerance")]
    pub pair_tolerance: f64,
    /// Fraction of pairs that must fall within `pair_tolerance`.
    #[serde(default = "default_pair_fraction")]
    pub min_pair_fraction: f64,
    /// Cap on candidates examined per search.
    #[serde(default)]
    pub max_elements: Option<usize>,
}

impl ExperimentConfig {
    /// Config over `T ∈ {2^lo, …, 2^hi}` with defaults elsewhere.
    pub fn dyadic(space: &str, lo: i32, hi: i32) -> Self {
        ExperimentConfig {
            space: space.into(),
            lattice: None,
            gauge: default_gauge(),
            t_grid: (lo..=hi).map(|k| 2f64.powi(k)).collect(),
            pairs: default_pairs(),
            window: default_window(),
            seed: 0,
            direction: Direction::Inverse,
            out_dir: None,
            tolerance: default_tolerance(),
            pair_tolerance: default_pair_tolerance(),
            min_pair_fraction: default_pair_fraction(),
            max_elements: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Check the config and resolve its keys.
    pub fn resolve(&self) -> Result<(Space, LatticeSpec)> {
        if self.t_grid.is_empty() {
            return Err(Error::Config("t_grid is empty".into()));
        }
        if self.t_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("t_grid must be strictly increasing".into()));
        }
        if !(self.t_grid[0] >= 1.0) || self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("t_grid entries must be finite and ≥ 1".into()));
        }
        if self.pairs == 0 {
            return Err(Error::Config("need at least one pair".into()));
        }
        for (name, v) in [("tolerance", self.tolerance), ("pair_tolerance", self.pair_tolerance)] {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("{name} must be nonnegative")));
            }
        }
        if !(0.0..=1.0).contains(&self.min_pair_fraction) {
            return Err(Error::Config("min_pair_fraction must lie in [0, 1]".into()));
        }
        let space = Space::from_key(&self.space)?;
        let id = match &self.lattice {
            Some(k) => LatticeId::from_key(k)?,
            None => default_lattice(&space)?,
        };
        let gauge = NormGauge::from_key(&self.gauge)?;
        Ok((space, LatticeSpec::new(id, gauge)))
    }

    fn budget(&self) -> EnumerationBudget {
        match self.max_elements {
            Some(cap) => EnumerationBudget::capped(cap, OverflowPolicy::Truncate),
            None => EnumerationBudget::UNLIMITED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub pair_id: usize,
    pub x: Point,
    pub x0: Point,
    pub records: Vec<ApproximationRecord>,
    pub estimate: Option<ExponentEstimate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledEstimate {
    pub mean_slope: f64,
    /// Standard error of the mean over pairs.
    pub stderr: f64,
    pub n_pairs: usize,
    /// Fraction of all pairs whose slope lies within the pair tolerance of
    /// the prediction; absent without a prediction.
    pub fraction_within: Option<f64>,
    /// Shared slope over every pair's level points with per-pair intercepts;
    /// uses pairs too short for an individual fit.
    pub common: Option<ExponentEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub predicted_kappa: Option<Exact>,
    pub pairs: Vec<PairReport>,
    pub pooled: Option<PooledEstimate>,
    /// Pooled and per-pair tolerances met; absent without a prediction.
    pub pass: Option<bool>,
}

/// Predicted exponent for experiments on a catalog space.
pub fn predicted_kappa(space: &Space) -> Result<Option<Exact>> {
    Ok(match space.kind {
        SpaceKind::RealPlaneAffine => Some(real_plane_affine()?.kappa),
        SpaceKind::ComplexPlaneAffine => Some(complex_plane_affine(1)?.kappa),
        SpaceKind::TernaryForms { .. } => Some(ternary_forms()?.kappa),
        _ => None,
    })
}

/// Mean of per-pair slopes (pairs without an estimate count against the
/// within-tolerance fraction) and the common-slope fit over all pairs.
pub fn pooled_estimate(pairs: &[PairReport], predicted: Option<f64>, pair_tolerance: f64) -> Option<PooledEstimate> {
    let curves: Vec<Vec<(f64, f64)>> = pairs.iter().filter_map(|p| level_points(&p.records).ok()).collect();
    let common = common_slope(&curves).ok();
    let slopes: Vec<f64> = pairs.iter().filter_map(|p| p.estimate.as_ref().map(|e| e.slope)).collect();
    if slopes.is_empty() && common.is_none() {
        return None;
    }
    let n = slopes.len() as f64;
    let mean = if slopes.is_empty() { f64::NAN } else { slopes.iter().sum::<f64>() / n };
    let var = if slopes.len() > 1 { slopes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let fraction_within = predicted
        .map(|k| slopes.iter().filter(|s| (*s - k).abs() <= pair_tolerance).count() as f64 / pairs.len() as f64);
    Some(PooledEstimate { mean_slope: mean, stderr: (var / n).sqrt(), n_pairs: slopes.len(), fraction_within, common })
}

/// The `(x, x₀)` pair drawn for `pair_id`; one ChaCha stream per pair.
pub fn sample_pair(space: &Space, window: Window, seed: u64, pair_id: usize) -> (Point, Point) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pair_id as u64);
    let x = space.random_point(window, &mut rng);
    let x0 = space.random_point(window, &mut rng);
    (x, x0)
}

fn run_pair(config: &ExperimentConfig, space: &Space, lattice: LatticeSpec, pair_id: usize) -> PairReport {
    let (x, x0) = sample_pair(space, config.window, config.seed, pair_id);
    let problem = Problem { space, lattice, x: &x, x0: &x0, direction: config.direction };
    let outcome = decay_curve(&problem, pair_id, &config.t_grid, config.budget()).and_then(|records| {
        audit(space, lattice, &x, &x0, &records, AUDIT_TOL)?;
        Ok(records)
    });
    match outcome {
        Ok(records) => {
            let (estimate, error) = match estimate_kappa(&records) {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            PairReport { pair_id, x, x0, records, estimate, error }
        }
        Err(e) => PairReport { pair_id, x, x0, records: Vec::new(), estimate: None, error: Some(e.to_string()) },
    }
}

/// Run every pair (in parallel), pool the slopes and compare with the
/// prediction. Writes `report.json` and `curves.csv` when `out_dir` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (space, lattice) = config.resolve()?;
    let predicted = predicted_kappa(&space)?;
    let pairs: Vec<PairReport> =
        (0..config.pairs).into_par_iter().map(|i| run_pair(config, &space, lattice, i)).collect();
    let k = predicted.map(Exact::to_f64);
    let pooled = pooled_estimate(&pairs, k, config.pair_tolerance);
    let pass = match (k, &pooled) {
        (Some(k), Some(p)) => Some(
            (p.mean_slope - k).abs() <= config.tolerance
                && p.fraction_within.unwrap_or(0.0) >= config.min_pair_fraction,
        ),
        (Some(_), None) => Some(false),
        _ => None,
    };
    let report = ExperimentReport { config: config.clone(), predicted_kappa: predicted, pairs, pooled, pass };
    if let Some(dir) = &config.out_dir {
        write_report(&report, dir)?;
    }
    Ok(report)
}

/// `report.json` plus `curves.csv` (see [`write_curves`]).
pub fn write_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    write_curves(report, std::fs::File::create(dir.join("curves.csv"))?)
}

/// CSV with columns `pair_id, T, epsilon, gamma_norm, gamma_entries`.
pub fn write_curves<W: std::io::Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["pair_id", "T", "epsilon", "gamma_norm", "gamma_entries"]).map_err(io)?;
    for p in &report.pairs {
        for r in &p.records {
            let entries = r.gamma.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            w.write_record([
                r.pair_id.to_string(),
                r.t.to_string(),
                r.epsilon.to_string(),
                r.gamma_norm.to_string(),
                entries,
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}
