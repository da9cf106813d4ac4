//! Command-line front end. Every command writes its CSV output and a
//! `manifest.json` into the `--out` directory.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 numeric or I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curves::{self, PUBLISHED_SOURCE_KURTOSIS, TABLE_ALPHA, TABLE_SIGMA};
use crate::distributions::{GaussianSpec, StudentT};
use crate::error::Error;
use crate::gaussianize::{GammaMapSpec, Route};
use crate::inherited::{InheritedSpec, MOMENT_REL_TOL, TAIL_EPS};
use crate::output::{csv_table, num};
use crate::response::GeneralizedSigmoid;
use crate::stats::{histogram, sample_moments, HistogramSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "thintails", version, about = "Fat-tailed sources through bounded response curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the inherited law and write samples or a histogram plus moments.
    Simulate(SimulateArgs),
    /// Sample and quadrature kurtosis for the benchmark curves.
    KurtosisTable(KurtosisTableArgs),
    /// Analytic density of a single-term curve on a grid over its support.
    Density(DensityArgs),
    /// Gaussianization map on a grid with the cdf-identity residual.
    Gaussianize(GaussianizeArgs),
    /// Quadrature kurtosis of the inherited law across source scales.
    SweepSigma(SweepSigmaArgs),
    /// Quadrature raw moments 1..4 of the inherited law.
    Moments(MomentsArgs),
    /// Print the shape report of a response curve as JSON.
    Shape(ShapeArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub alpha: f64,
    /// Curve spec; when omitted the source itself is sampled.
    #[arg(long)]
    pub response: Option<GeneralizedSigmoid>,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write a histogram with this many bins instead of raw samples.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub bins: Option<u64>,
    /// Histogram range `lo:hi`; defaults to the attained range of the curve.
    #[arg(long)]
    pub range: Option<Range>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct KurtosisTableArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(10_000..))]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Source scale; the default reproduces the published table.
    #[arg(long, default_value_t = TABLE_SIGMA)]
    pub sigma: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub response: GeneralizedSigmoid,
    #[arg(long, default_value_t = 100_001, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid_points: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    /// Closed form for alpha 2 or 3, composed otherwise.
    Auto,
    /// Always `m − √2 s erfc⁻¹(2F(x))`.
    Composed,
}

#[derive(Debug, Args)]
pub struct GaussianizeArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sd: f64,
    /// `lo:hi:points`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Grid,
    #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
    pub route: RouteArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepSigmaArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub response: GeneralizedSigmoid,
    /// `lo:hi:points`
    #[arg(long)]
    pub sigma: Grid,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub response: GeneralizedSigmoid,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long)]
    pub response: GeneralizedSigmoid,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Evenly spaced points `lo:hi:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.hi } else { self.lo + i as f64 * step })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, points] = parts.as_slice() else {
            return Err(format!("expected lo:hi:points, got '{s}'"));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
        let points: usize = points.trim().parse().map_err(|_| format!("bad point count '{points}'"))?;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(format!("grid bounds must be finite with lo <= hi, got {lo}:{hi}"));
        }
        if points == 0 || (points == 1 && lo != hi) || (points > 1 && lo == hi) {
            return Err(format!("grid {s} is degenerate"));
        }
        Ok(Grid { lo, hi, points })
    }
}

/// Closed range `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("range must satisfy lo < hi, got '{s}'"));
        }
        Ok(Range { lo, hi })
    }
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub curve_spec: Option<String>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub algorithm_id: Option<String>,
    pub tool_version: String,
    /// Command line without the program name and `--out`.
    pub argv: Vec<String>,
    /// Command-specific settings.
    pub details: serde_json::Value,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Numeric(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses and runs a command line, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let argv = replayable_argv(&args);
    match execute(cli.command, argv) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            EXIT_NUMERIC
        }
    }
}

/// Drops the program name and the `--out` flag.
fn replayable_argv(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut iter = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = iter.next() {
        if a == "--out" {
            iter.next();
        } else if !a.starts_with("--out=") {
            out.push(a);
        }
    }
    out
}

fn execute(command: Command, argv: Vec<String>) -> CliResult<()> {
    match command {
        Command::Simulate(a) => simulate(a, argv),
        Command::KurtosisTable(a) => kurtosis_table(a, argv),
        Command::Density(a) => density(a, argv),
        Command::Gaussianize(a) => gaussianize(a, argv),
        Command::SweepSigma(a) => sweep_sigma(a, argv),
        Command::Moments(a) => moments(a, argv),
        Command::Shape(a) => shape(a),
        Command::Replay(a) => replay(a),
    }
}

fn write_out(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Failure(format!("manifest serialization: {e}")))?;
    text.push('\n');
    write_out(dir, "manifest.json", &text)
}

fn to_usize(n: u64) -> CliResult<usize> {
    usize::try_from(n).map_err(|_| CliError::Usage(format!("count {n} is too large")))
}

fn simulate(a: SimulateArgs, argv: Vec<String>) -> CliResult<()> {
    let source = StudentT::new(a.sigma, a.alpha)?;
    let n = to_usize(a.n)?;
    let (batch, support) = match &a.response {
        Some(curve) => {
            let spec = InheritedSpec::new(curve.clone(), source);
            (spec.sample(a.seed, n)?, Some(spec.support()))
        }
        None => (source.sample(a.seed, n)?, None),
    };
    let mut details = json!({
        "kurtosis_convention": "raw m4/m2^2 from biased central moments",
        "output": if a.bins.is_some() { "histogram.csv" } else { "samples.csv" },
    });
    if let Some(bins) = a.bins {
        let (lo, hi) = match (a.range, support) {
            (Some(r), _) => (r.lo, r.hi),
            (None, Some(s)) => (s.lo, s.hi),
            (None, None) => {
                let lo = batch.values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = batch.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, if hi > lo { hi } else { lo + 1.0 })
            }
        };
        let spec = HistogramSpec::new(lo, hi, to_usize(bins)?)?;
        let h = histogram(&batch.values, spec);
        details["histogram"] = json!({
            "lo": lo, "hi": hi, "bins": bins,
            "underflow": h.underflow, "overflow": h.overflow,
        });
        write_out(&a.out, "histogram.csv", &h.to_csv())?;
    } else {
        write_out(&a.out, "samples.csv", &batch.to_csv())?;
    }
    if let Some(s) = support {
        details["attained_range"] = json!([s.lo, s.hi]);
    }
    match sample_moments(&batch.values) {
        Ok(m) => {
            let text = serde_json::to_string_pretty(&m)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            write_out(&a.out, "moments.json", &(text + "\n"))?;
        }
        Err(e) => details["moments_error"] = json!(e.to_string()),
    }
    write_manifest(
        &a.out,
        &RunManifest {
            command: "simulate".into(),
            curve_spec: a.response.as_ref().map(ToString::to_string),
            sigma: Some(a.sigma),
            alpha: Some(a.alpha),
            seed: Some(a.seed),
            n: Some(a.n),
            algorithm_id: Some(batch.algorithm_id.clone()),
            tool_version: TOOL_VERSION.into(),
            argv,
            details,
        },
    )
}

/// One row of the kurtosis table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub published: f64,
    pub sample: f64,
    pub quadrature: Option<f64>,
}

/// Sample kurtosis of the source and of each benchmark curve (all from the
/// same source draws), with quadrature kurtosis for the curves.
pub fn kurtosis_table_rows(sigma: f64, seed: u64, n: usize) -> crate::Result<(Vec<TableRow>, String)> {
    let source = curves::table_source(sigma)?;
    let batch = source.sample(seed, n)?;
    let mut rows = vec![TableRow {
        label: format!("f({sigma},{TABLE_ALPHA})"),
        published: PUBLISHED_SOURCE_KURTOSIS,
        sample: sample_moments(&batch.values)?.kurtosis,
        quadrature: None,
    }];
    for b in curves::benchmark_curves() {
        let spec = InheritedSpec::new(b.curve.clone(), source);
        let mapped: Vec<f64> = batch.values.iter().map(|&x| b.curve.eval(x)).collect::<crate::Result<_>>()?;
        rows.push(TableRow {
            label: b.label.to_string(),
            published: b.published_kurtosis,
            sample: sample_moments(&mapped)?.kurtosis,
            quadrature: Some(spec.kurtosis()?),
        });
    }
    Ok((rows, format!("{}/pushforward", batch.algorithm_id)))
}

fn kurtosis_table(a: KurtosisTableArgs, argv: Vec<String>) -> CliResult<()> {
    let n = to_usize(a.n)?;
    let (rows, algorithm_id) = kurtosis_table_rows(a.sigma, a.seed, n)?;
    let mut csv = String::from("distribution,published_kurtosis,sample_kurtosis,quadrature_kurtosis\n");
    let mut shown = String::new();
    for r in &rows {
        let quad = r.quadrature.map(num).unwrap_or_default();
        let _ = writeln!(csv, "\"{}\",{},{},{}", r.label, num(r.published), num(r.sample), quad);
        let _ = writeln!(
            shown,
            "{:<22} published {:>9.5}  sample {:>10.5}  quadrature {}",
            r.label,
            r.published,
            r.sample,
            r.quadrature.map(|q| format!("{q:.5}")).unwrap_or_else(|| "-".into())
        );
    }
    write_out(&a.out, "kurtosis_table.csv", &csv)?;
    print!("{shown}");
    write_manifest(
        &a.out,
        &RunManifest {
            command: "kurtosis-table".into(),
            curve_spec: Some(
                curves::benchmark_curves().iter().map(|b| b.curve.to_string()).collect::<Vec<_>>().join(" | "),
            ),
            sigma: Some(a.sigma),
            alpha: Some(TABLE_ALPHA),
            seed: Some(a.seed),
            n: Some(a.n),
            algorithm_id: Some(algorithm_id),
            tool_version: TOOL_VERSION.into(),
            argv,
            details: json!({
                "source_assumption": "StudentT(sigma, alpha=3); sigma=0.4 reproduces the published rows",
                "kurtosis_convention": "raw m4/m2^2 from biased central moments",
                "tail_eps": TAIL_EPS,
                "quadrature_rel_tol": MOMENT_REL_TOL,
            }),
        },
    )
}

fn density(a: DensityArgs, argv: Vec<String>) -> CliResult<()> {
    let source = StudentT::new(a.sigma, a.alpha)?;
    if a.response.len() != 1 {
        return Err(CliError::Usage(
            "density needs a single-term curve; the inverse of a multi-term curve is not analytic".into(),
        ));
    }
    let spec = InheritedSpec::new(a.response.clone(), source);
    let grid = spec.density_grid(to_usize(a.grid_points)?)?;
    let rows: Vec<[f64; 2]> = grid.iter().map(|&(y, g)| [y, g]).collect();
    write_out(&a.out, "density.csv", &csv_table(&["y", "g"], rows.iter().map(|r| &r[..])))?;
    write_manifest(
        &a.out,
        &RunManifest {
            command: "density".into(),
            curve_spec: Some(a.response.to_string()),
            sigma: Some(a.sigma),
            alpha: Some(a.alpha),
            seed: None,
            n: None,
            algorithm_id: None,
            tool_version: TOOL_VERSION.into(),
            argv,
            details: json!({ "grid_points": a.grid_points, "endpoint_offset": "1e-6 of support width" }),
        },
    )
}

fn gaussianize(a: GaussianizeArgs, argv: Vec<String>) -> CliResult<()> {
    let spec = GammaMapSpec::new(StudentT::new(a.sigma, a.alpha)?, GaussianSpec::new(a.mean, a.sd)?);
    let route = match a.route {
        RouteArg::Auto => spec.default_route(),
        RouteArg::Composed => Route::Composed,
    };
    let mut rows = Vec::with_capacity(a.grid.points);
    let mut max_residual = 0.0_f64;
    for x in a.grid.values() {
        let g = spec.eval_with(route, x)?;
        let r = (spec.target.cdf(g)? - spec.source.cdf(x)?).abs();
        max_residual = max_residual.max(r);
        rows.push([x, g, r]);
    }
    write_out(&a.out, "gaussianize.csv", &csv_table(&["x", "gamma_x", "residual"], rows.iter().map(|r| &r[..])))?;
    println!("max_residual {}", num(max_residual));
    write_manifest(
        &a.out,
        &RunManifest {
            command: "gaussianize".into(),
            curve_spec: None,
            sigma: Some(a.sigma),
            alpha: Some(a.alpha),
            seed: None,
            n: None,
            algorithm_id: None,
            tool_version: TOOL_VERSION.into(),
            argv,
            details: json!({
                "route": route.as_str(),
                "extension": route == Route::Composed,
                "mean": a.mean,
                "sd": a.sd,
                "max_residual": max_residual,
            }),
        },
    )
}

fn sweep_sigma(a: SweepSigmaArgs, argv: Vec<String>) -> CliResult<()> {
    if a.sigma.lo <= 0.0 {
        return Err(CliError::Usage(format!("sigma sweep must be positive, got lower bound {}", a.sigma.lo)));
    }
    let mut rows = Vec::with_capacity(a.sigma.points);
    for sigma in a.sigma.values() {
        let spec = InheritedSpec::new(a.response.clone(), StudentT::new(sigma, a.alpha)?);
        rows.push([sigma, spec.kurtosis()?]);
    }
    write_out(&a.out, "sweep_sigma.csv", &csv_table(&["sigma", "kurtosis"], rows.iter().map(|r| &r[..])))?;
    write_manifest(
        &a.out,
        &RunManifest {
            command: "sweep-sigma".into(),
            curve_spec: Some(a.response.to_string()),
            sigma: None,
            alpha: Some(a.alpha),
            seed: None,
            n: None,
            algorithm_id: None,
            tool_version: TOOL_VERSION.into(),
            argv,
            details: json!({
                "sigma_grid": [a.sigma.lo, a.sigma.hi, a.sigma.points],
                "tail_eps": TAIL_EPS,
                "quadrature_rel_tol": MOMENT_REL_TOL,
            }),
        },
    )
}

fn moments(a: MomentsArgs, argv: Vec<String>) -> CliResult<()> {
    let spec = InheritedSpec::new(a.response.clone(), StudentT::new(a.sigma, a.alpha)?);
    let rows: Vec<[f64; 2]> = (1..=4)
        .map(|k| Ok([k as f64, spec.moment(k)?]))
        .collect::<crate::Result<_>>()?;
    let mut csv = String::from("moment_order,value\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{}", r[0] as u32, num(r[1]));
    }
    let q = spec.quadrature_moments()?;
    write_out(&a.out, "moments.csv", &csv)?;
    write_manifest(
        &a.out,
        &RunManifest {
            command: "moments".into(),
            curve_spec: Some(a.response.to_string()),
            sigma: Some(a.sigma),
            alpha: Some(a.alpha),
            seed: None,
            n: None,
            algorithm_id: None,
            tool_version: TOOL_VERSION.into(),
            argv,
            details: json!({
                "central": q,
                "tail_eps": TAIL_EPS,
                "quadrature_rel_tol": MOMENT_REL_TOL,
            }),
        },
    )
}

fn shape(a: ShapeArgs) -> CliResult<()> {
    let report = a.response.validate_shape();
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Failure(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn replay(a: ReplayArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.manifest)?;
    let m: RunManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("unreadable manifest {}: {e}", a.manifest.display())))?;
    let mut args: Vec<OsString> = vec!["thintails".into()];
    args.extend(m.argv.iter().map(OsString::from));
    args.push("--out".into());
    args.push(a.out.into_os_string());
    let cli = Cli::try_parse_from(&args)
        .map_err(|e| CliError::Usage(format!("manifest argv does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("a manifest cannot replay another replay".into()));
    }
    execute(cli.command, m.argv)
}
