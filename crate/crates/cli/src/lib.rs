//! Command-line front end: `detect`, `simulate` and `prune-stats`.

pub mod error;
pub mod input;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cp3o::eval::{run_benchmark, ScenarioKind, ScenarioSpec};
use cp3o::{run_cp3o, validate_config, Cp3oConfig, GofMetric, MetricKind, TimeSeries};

use error::{CliError, CliResult};
use input::{load_series, HeaderMode, Transform};
use report::{prune_stats_csv, ConfigEcho, DetectOutput, SimulationRow};

#[derive(Debug, Parser)]
#[command(
    name = "cp3o",
    version,
    about = "Nonparametric multiple change point detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect change points in the columns of a CSV file.
    Detect(DetectArgs),
    /// Run seeded simulation trials and report mean accuracy.
    Simulate(SimulateArgs),
    /// Write the candidate-set size matrix |S_t(kappa)|.
    PruneStats(PruneStatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Energy distance exponent in (0, 2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Locality window of the windowed metrics (default min-size - 1).
    #[arg(long)]
    pub delta: Option<usize>,
    /// Upper bound on the number of change points.
    #[arg(long = "K", default_value_t = 5)]
    pub max_changes: usize,
    /// Minimum segment length w (default ceil(1.5 sqrt(T))).
    #[arg(long = "min-size")]
    pub min_size: Option<usize>,
    /// Search every candidate at every iteration.
    #[arg(long)]
    pub no_prune: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file, one observation per row.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated column names or 1-based positions (default: all).
    #[arg(long)]
    pub columns: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub header: HeaderMode,
    /// Applied in the order given; repeatable.
    #[arg(long = "transform", value_enum)]
    pub transforms: Vec<Transform>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub data: InputArgs,
    /// energy, energy-complete, ks or ks-windowed.
    #[arg(long, default_value = "energy")]
    pub metric: String,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output file (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also write the |S_t(kappa)| matrix to this CSV file.
    #[arg(long = "prune-stats")]
    pub prune_stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// gaussian, dist-mean-tail or heavytail; repeatable.
    #[arg(long = "scenario", default_value = "gaussian")]
    pub scenarios: Vec<String>,
    /// Series length; repeatable.
    #[arg(long = "T", default_value = "400")]
    pub lengths: Vec<usize>,
    /// Metric; repeatable.
    #[arg(long = "metric", default_value = "energy")]
    pub metrics: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PruneStatsArgs {
    /// CSV input; when absent a simulated series is used.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub columns: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub header: HeaderMode,
    #[arg(long = "transform", value_enum)]
    pub transforms: Vec<Transform>,
    #[arg(long, default_value = "gaussian")]
    pub scenario: String,
    #[arg(long = "T", default_value_t = 400)]
    pub len: usize,
    #[arg(long, default_value = "energy")]
    pub metric: String,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// `ceil(1.5 sqrt(T))`, at least 2.
pub fn default_min_size(len: usize) -> usize {
    ((1.5 * (len as f64).sqrt()).ceil() as usize).max(2)
}

fn parse_metric(name: &str, alpha: Option<f64>, delta: Option<usize>) -> CliResult<GofMetric> {
    let kind: MetricKind = name.parse()?;
    if !kind.is_energy() && alpha.is_some() {
        return Err(CliError::Config(format!(
            "--alpha does not apply to metric {}",
            kind.name()
        )));
    }
    Ok(GofMetric {
        kind,
        alpha: alpha.unwrap_or(1.0),
        delta,
    })
}

fn build_config(args: &RunArgs, metric: GofMetric, len: usize) -> Cp3oConfig {
    let min_size = args.min_size.unwrap_or_else(|| default_min_size(len));
    Cp3oConfig::new(args.max_changes, min_size, metric).with_pruning(!args.no_prune)
}

fn write_output(path: Option<&Path>, body: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Detect(args) => detect(&args),
        Command::Simulate(args) => simulate(&args),
        Command::PruneStats(args) => prune_stats(&args),
    }
}

/// Runs `detect` and returns the document it writes.
pub fn detect_document(args: &DetectArgs) -> CliResult<DetectOutput> {
    let m = &args.run;
    let metric = parse_metric(&args.metric, m.alpha, m.delta)?;
    let loaded = load_series(
        &args.data.input,
        args.data.header,
        args.data.columns.as_deref(),
        &args.data.transforms,
    )?;
    let cfg = validate_config(
        &loaded.series,
        &build_config(m, metric, loaded.series.len()),
    )?;
    let result = run_cp3o(&loaded.series, &cfg)?;
    let echo = ConfigEcho {
        input: args.data.input.display().to_string(),
        columns: loaded.columns.clone(),
        header: loaded.header.clone(),
        transforms: args.data.transforms.clone(),
        metric: cfg.metric.kind,
        alpha: cfg.metric.kind.is_energy().then_some(cfg.metric.alpha),
        delta: cfg.metric.delta,
        max_changes: cfg.max_changes,
        min_size: cfg.min_size,
        pruning: cfg.pruning,
        seed: m.seed,
        series_len: loaded.series.len(),
        dim: loaded.series.dim(),
    };
    let path = args.prune_stats.as_ref().map(|p| p.display().to_string());
    Ok(DetectOutput::new(echo, &result, &loaded.rows, path))
}

fn detect(args: &DetectArgs) -> CliResult<()> {
    let doc = detect_document(args)?;
    eprintln!(
        "header: {} ({:?} mode)",
        if doc.config.header.present {
            "present"
        } else {
            "absent"
        },
        doc.config.header.mode
    );
    if let Some(p) = &args.prune_stats {
        let result = doc.to_result()?;
        write_output(Some(p), &prune_stats_csv(&result.prune_stats)?)?;
    }
    let body = match args.format {
        Format::Json => doc.to_json()?,
        Format::Csv => doc.to_csv()?,
    };
    write_output(args.output.as_deref(), &body)
}

fn simulate(args: &SimulateArgs) -> CliResult<()> {
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let m = &args.run;
    let mut rows = Vec::new();
    for scenario in &args.scenarios {
        let kind: ScenarioKind = scenario.parse()?;
        for &len in &args.lengths {
            for name in &args.metrics {
                let mut metric = parse_metric(name, m.alpha, m.delta)?;
                if kind == ScenarioKind::HeavyTail && metric.kind.is_energy() && m.alpha.is_none() {
                    // The 0.1-df segment has no finite moments of order 0.1 or more.
                    metric.alpha = 0.09;
                }
                let spec = ScenarioSpec::new(kind, len, m.seed);
                let cfg = build_config(m, metric, len);
                let summary = run_benchmark(&spec, &cfg, args.trials)?;
                rows.push(SimulationRow::new(&spec, &cfg, args.trials, &summary.mean));
            }
        }
    }
    let body = match args.format {
        Format::Csv => report::rows_csv(&rows)?,
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    write_output(args.output.as_deref(), &body)
}

fn prune_stats(args: &PruneStatsArgs) -> CliResult<()> {
    let m = &args.run;
    let metric = parse_metric(&args.metric, m.alpha, m.delta)?;
    let series: TimeSeries = match &args.input {
        Some(path) => {
            load_series(path, args.header, args.columns.as_deref(), &args.transforms)?.series
        }
        None => {
            let kind: ScenarioKind = args.scenario.parse()?;
            cp3o::eval::generate_scenario(&ScenarioSpec::new(kind, args.len, m.seed))?.0
        }
    };
    let cfg = build_config(m, metric, series.len());
    let result = run_cp3o(&series, &cfg)?;
    write_output(
        args.output.as_deref(),
        &prune_stats_csv(&result.prune_stats)?,
    )
}
