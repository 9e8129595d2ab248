use clap::{Args, Parser, Subcommand, ValueEnum};
use kappa_core::algebra::NormGauge;
use kappa_core::enumeration::LatticeId;
use kappa_core::experiments::{
    count_orbit_points, default_lattice, ols, run_experiment, sample_pair, write_curves, Direction, ExperimentConfig,
    ExperimentReport, Problem,
};
use kappa_core::exponents::{corollary_table, corollary_table_with_variants, TableRow};
use kappa_core::spaces::{Space, Window};
use kappa_core::spectral::{certify_by_id, certify_temperedness, temperedness_catalog, Certificate};
use kappa_core::volume::{
    closed_form_exponent, estimate_growth_exponent, CartanChart, FieldLabel, GroupDescriptor, LogVolume, McBudget,
    VolumeGrowth,
};
use kappa_core::{Error, Result};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kappa", version, about = "Diophantine exponents of lattice orbits: predictions, certificates and experiments")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// JSON experiment config (field names as in ExperimentConfig).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report.json / curves.csv and other artefacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Inverse,
    Forward,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Inverse => Direction::Inverse,
            DirectionArg::Forward => Direction::Forward,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the table of predicted exponents.
    Predict {
        /// Include the field and parameter variants of each row.
        #[arg(long)]
        variants: bool,
    },
    /// Run an orbit approximation experiment and compare with the prediction.
    Estimate(EstimateArgs),
    /// Fit the volume growth exponent of norm balls by Monte Carlo.
    Volume(VolumeArgs),
    /// Certify temperedness for catalogued cases.
    Certify {
        /// Case id; all cases when omitted.
        #[arg(long)]
        case: Option<String>,
    },
    /// Count orbit points in shrinking targets and fit the growth in T.
    Count(CountArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Space key; ignored when --config is given.
    #[arg(long, default_value = "real-plane-affine")]
    space: String,
    /// Search radii are 2^lo, ..., 2^hi.
    #[arg(long, default_value_t = 4)]
    t_lo: i32,
    #[arg(long, default_value_t = 12)]
    t_hi: i32,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
}

#[derive(Args)]
struct VolumeArgs {
    /// Group key: sl<n>-r, sl<n>-c or sigma<n> (irreducible SL2 in SL_n(R)).
    #[arg(long, default_value = "sl2-r")]
    group: String,
    /// Log-norm levels t (norm bound e^t), comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = (12..=24).map(f64::from).collect::<Vec<_>>())]
    levels: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Allowed absolute deviation from the closed form.
    #[arg(long, default_value_t = 0.15)]
    tolerance: f64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, default_value = "real-plane-affine")]
    space: String,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 5)]
    t_lo: i32,
    #[arg(long, default_value_t = 10)]
    t_hi: i32,
    #[arg(long, default_value_t = 0)]
    pair: usize,
}

/// Outcome of a subcommand that checks a tolerance.
enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

fn main() -> ExitCode {
    // usage errors exit 1; 2 is reserved for a failed tolerance check
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Verdict::Fail) => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Predict { variants } => predict(g, *variants),
        Command::Estimate(args) => estimate(g, args),
        Command::Volume(args) => volume(g, args),
        Command::Certify { case } => certify(g, case.as_deref()),
        Command::Count(args) => count(g, args),
    }
}

fn emit(g: &GlobalOpts, name: &str, text: &str) -> Result<()> {
    if let Some(dir) = &g.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn csv_text<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn predict(g: &GlobalOpts, variants: bool) -> Result<Verdict> {
    let rows = if variants { corollary_table_with_variants()? } else { corollary_table()? };
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => csv_text(
            &["case", "variant", "d", "a", "kappa", "theta_source"],
            rows.iter().map(|r| {
                [&r.case, &r.variant, &r.d.to_string(), &r.a.to_string(), &r.kappa.to_string(), &r.theta_source]
                    .map(|s| s.to_string())
            }),
        )?,
        Format::Text => table_text(&rows),
    };
    emit(g, "predict.txt", &text)?;
    Ok(Verdict::NotApplicable)
}

fn table_text(rows: &[TableRow]) -> String {
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| [r.case.clone(), r.variant.clone(), r.d.to_string(), r.a.to_string(), r.kappa.to_string()])
        .collect();
    let header = ["case", "variant", "d", "a", "kappa"].map(String::from);
    let mut widths = header.clone().map(|h| h.chars().count());
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let line = |c: &[String; 5]| {
        let mut s = String::new();
        for (i, (cell, w)) in c.iter().zip(widths).enumerate() {
            let pad = w - cell.chars().count();
            if i < 2 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
            s.push_str("  ");
        }
        s.trim_end().to_string() + "\n"
    };
    std::iter::once(&header).chain(&cells).map(line).collect()
}

fn load_config(g: &GlobalOpts, args: &EstimateArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::dyadic(&args.space, args.t_lo, args.t_hi),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(p) = args.pairs {
        cfg.pairs = p;
    }
    if let Some(d) = args.direction {
        cfg.direction = d.into();
    }
    if g.out.is_some() {
        cfg.out_dir = g.out.clone();
    }
    Ok(cfg)
}

fn estimate(g: &GlobalOpts, args: &EstimateArgs) -> Result<Verdict> {
    let cfg = load_config(g, args)?;
    let report = run_experiment(&cfg)?;
    let mut out = std::io::stdout().lock();
    match g.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
        Format::Csv => write_curves(&report, &mut out)?,
        Format::Text => out.write_all(estimate_text(&report).as_bytes())?,
    }
    Ok(match report.pass {
        Some(true) => Verdict::Pass,
        Some(false) => Verdict::Fail,
        None => Verdict::NotApplicable,
    })
}

fn estimate_text(r: &ExperimentReport) -> String {
    let mut s = format!("space {}  pairs {}  seed {}\n", r.config.space, r.config.pairs, r.config.seed);
    if let Some(k) = r.predicted_kappa {
        s += &format!("predicted kappa {k}\n");
    }
    for p in &r.pairs {
        match (&p.estimate, &p.error) {
            (Some(e), _) => s += &format!("pair {:>3}  slope {:.4} ± {:.4}  ({} levels)\n", p.pair_id, e.slope, e.stderr, e.n_points),
            (None, Some(err)) => s += &format!("pair {:>3}  no estimate: {err}\n", p.pair_id),
            (None, None) => s += &format!("pair {:>3}  no estimate\n", p.pair_id),
        }
    }
    if let Some(p) = &r.pooled {
        s += &format!("mean slope {:.4} ± {:.4} over {} pairs\n", p.mean_slope, p.stderr, p.n_pairs);
        if let Some(f) = p.fraction_within {
            s += &format!("fraction of pairs within tolerance {f:.2}\n");
        }
        if let Some(c) = &p.common {
            s += &format!("common slope {:.4} ± {:.4} over {} levels\n", c.slope, c.stderr, c.n_points);
        }
    }
    s += match r.pass {
        Some(true) => "PASS\n",
        Some(false) => "FAIL\n",
        None => "no prediction to compare against\n",
    };
    s
}

fn parse_group(key: &str) -> Result<GroupDescriptor> {
    let bad = || Error::UnknownKey { kind: "group", key: key.into() };
    if let Some(n) = key.strip_prefix("sigma") {
        let n: usize = n.parse().map_err(|_| bad())?;
        return Ok(GroupDescriptor::Sl2Image { blocks: vec![n], field: FieldLabel::Real });
    }
    let rest = key.strip_prefix("sl").ok_or_else(bad)?;
    let (n, f) = rest.split_once('-').ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    let field = match f {
        "r" => FieldLabel::Real,
        "c" => FieldLabel::Complex,
        _ => return Err(bad()),
    };
    Ok(GroupDescriptor::SpecialLinear { n, field })
}

fn volume(g: &GlobalOpts, args: &VolumeArgs) -> Result<Verdict> {
    let desc = parse_group(&args.group)?;
    let exact = closed_form_exponent(&desc)?;
    let chart = CartanChart::for_group(&desc)?;
    let budget = McBudget { samples: args.samples, max_stderr: None };
    let (fit, points) = estimate_growth_exponent(&chart, &args.levels, budget, g.seed.unwrap_or(0), NormGauge::Operator)?;
    let a = *exact.numer() as f64 / *exact.denom() as f64;
    let dev = (fit.a - a).abs();
    let pass = dev <= args.tolerance && dev <= 2.0 * fit.stderr.max(f64::EPSILON);
    let text = match g.format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct Out<'a> {
                group: &'a str,
                closed_form: String,
                fit: &'a VolumeGrowth,
                points: &'a [LogVolume],
                pass: bool,
            }
            let o = Out { group: &args.group, closed_form: exact.to_string(), fit: &fit, points: &points, pass };
            serde_json::to_string_pretty(&o)? + "\n"
        }
        Format::Csv => csv_text(
            &["t", "log_volume", "stderr"],
            points.iter().map(|p| [p.t.to_string(), p.value.to_string(), p.stderr.to_string()]),
        )?,
        Format::Text => format!(
            "{}: fitted a = {:.4} ± {:.4}, closed form {}  {}\n",
            args.group,
            fit.a,
            fit.stderr,
            exact,
            if pass { "PASS" } else { "FAIL" }
        ),
    };
    emit(g, "volume.txt", &text)?;
    Ok(if pass { Verdict::Pass } else { Verdict::Fail })
}

fn certify(g: &GlobalOpts, case: Option<&str>) -> Result<Verdict> {
    let certs: Vec<Certificate> = match case {
        Some(id) => vec![certify_by_id(id)?],
        None => temperedness_catalog().iter().map(certify_temperedness).collect::<Result<_>>()?,
    };
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&certs)? + "\n",
        Format::Csv => csv_text(
            &["case", "method", "tempered", "theta", "provenance"],
            certs.iter().map(|c| {
                [
                    c.case.clone(),
                    format!("{:?}", c.method),
                    c.tempered.to_string(),
                    c.theta.map(|t| t.to_string()).unwrap_or_default(),
                    c.provenance.clone(),
                ]
            }),
        )?,
        Format::Text => certs
            .iter()
            .map(|c| {
                let theta = c.theta.map(|t| format!("θ = {t}")).unwrap_or_else(|| "θ unknown".into());
                format!("{:<32} {:<14} {theta:<10} {}\n", c.case, format!("{:?}", c.method), c.provenance)
            })
            .collect(),
    };
    emit(g, "certificates.txt", &text)?;
    Ok(Verdict::NotApplicable)
}

fn count(g: &GlobalOpts, args: &CountArgs) -> Result<Verdict> {
    let space = Space::from_key(&args.space)?;
    let id: LatticeId = default_lattice(&space)?;
    let lattice = kappa_core::enumeration::LatticeSpec::new(id, NormGauge::MaxEntry);
    let (x, x0) = sample_pair(&space, Window::UNIT, g.seed.unwrap_or(0), args.pair);
    let problem = Problem { space: &space, lattice, x: &x, x0: &x0, direction: Direction::Inverse };
    let grid: Vec<f64> = (args.t_lo..=args.t_hi).map(|k| 2f64.powi(k)).collect();
    let counts: Vec<u64> = grid.iter().map(|&t| count_orbit_points(&problem, args.epsilon, t)).collect::<Result<_>>()?;
    let fit_pts: Vec<(f64, f64)> =
        grid.iter().zip(&counts).filter(|(_, c)| **c > 0).map(|(t, c)| (t.ln(), (*c as f64).ln())).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = fit_pts.into_iter().unzip();
    let slope = ols(&lx, &ly).ok().map(|f| f.0);
    let text = match g.format {
        Format::Json => {
            let v = serde_json::json!({
                "space": args.space, "epsilon": args.epsilon, "x": x, "x0": x0,
                "T": grid, "counts": counts, "slope": slope,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => csv_text(&["T", "count"], grid.iter().zip(&counts).map(|(t, c)| [t.to_string(), c.to_string()]))?,
        Format::Text => {
            let mut s: String = grid.iter().zip(&counts).map(|(t, c)| format!("T = {t:<8} count {c}\n")).collect();
            match slope {
                Some(v) => s += &format!("slope of log count against log T: {v:.4}\n"),
                None => s += "too few nonzero counts for a slope\n",
            }
            s
        }
    };
    emit(g, "counts.txt", &text)?;
    Ok(Verdict::NotApplicable)
}
