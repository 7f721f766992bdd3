use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finslerlab_core::frame::indicatrix_sample;
use finslerlab_core::metric::{registry_list, MetricConfig};
use finslerlab_core::report::{
    adiabatic_sweep, convergence_measure, point_table, run_suite, RunConfig, Suite, SuiteReport, ADIABATIC_RATIO, DEFAULT_EPS,
};
use finslerlab_core::sasaki::adiabatic_csv;
use finslerlab_core::{ChartPoint, FinslerMetric, GeomError, SigmaSpec};

#[derive(Parser)]
#[command(name = "finslerlab", version, about = "Numerical verification of Finsler sphere-bundle identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registry metrics and their default parameters.
    ListMetrics,
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Print the pointwise objects at one chart point.
    Table(TableArgs),
    /// Write the adiabatic ε sweep as CSV.
    Adiabatic(AdiabaticArgs),
    /// Run the conformal suite for a basic factor σ.
    Conformal(ConformalArgs),
}

#[derive(Args, Clone)]
struct MetricArgs {
    /// Registry metric name.
    #[arg(long)]
    metric: Option<String>,
    /// Dimension of the base.
    #[arg(long)]
    dim: Option<usize>,
    /// Metric parameter `key=value`, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// TOML file with a `[metric]` table.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SampleArgs {
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "jet-order", default_value_t = 4)]
    jet_order: usize,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long, default_value = "all")]
    suite: String,
    /// Replace the tolerance of every residual check.
    #[arg(long)]
    tol: Option<f64>,
    /// Conformal factor, e.g. "c0=0.1,c1=0.2,c11=0.1".
    #[arg(long)]
    sigma: Option<String>,
    /// Comma separated ε sweep.
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    metric: MetricArgs,
    /// Chart point "x=…;y=…"; the first indicatrix sample when absent.
    #[arg(long)]
    at: Option<String>,
    /// Rescale y so that F(x, y) = 1.
    #[arg(long)]
    normalize: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "jet-order", default_value_t = 4)]
    jet_order: usize,
}

#[derive(Args)]
struct AdiabaticArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Args)]
struct ConformalArgs {
    #[command(flatten)]
    metric: MetricArgs,
    #[command(flatten)]
    sample: SampleArgs,
    #[arg(long, default_value = "c1=0.3")]
    sigma: String,
    #[arg(long)]
    tol: Option<f64>,
}

enum Failure {
    Config(String),
    Check(String),
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, Failure> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (k, v) = item.split_once('=').ok_or_else(|| Failure::Config(format!("--param expects KEY=VALUE, got '{item}'")))?;
        let v: f64 = v.trim().parse().map_err(|_| Failure::Config(format!("--param {k}: '{v}' is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn build_metric(a: &MetricArgs) -> Result<FinslerMetric, Failure> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            MetricConfig::from_toml(&text)?
        }
        None => MetricConfig {
            name: a.metric.clone().ok_or_else(|| Failure::Config("--metric or --config is required".into()))?,
            dim: None,
            params: BTreeMap::new(),
            domain: Default::default(),
        },
    };
    if let Some(name) = &a.metric {
        cfg.name = name.clone();
    }
    if a.dim.is_some() {
        cfg.dim = a.dim;
    }
    cfg.params.extend(parse_params(&a.params)?);
    Ok(cfg.build()?)
}

fn parse_eps(raw: &Option<String>) -> Result<Vec<f64>, Failure> {
    match raw {
        None => Ok(DEFAULT_EPS.to_vec()),
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Config(format!("--eps: '{t}' is not a number"))))
            .collect(),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summarize(report: &SuiteReport) -> Result<(), Failure> {
    for c in &report.checks {
        let r = c.max_residual.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        let tail = c.error.as_deref().map(|e| format!("  [{e}]")).unwrap_or_default();
        eprintln!("{:<4} {:<32} {:>10} (tol {:.0e}){}", if c.pass { "ok" } else { "FAIL" }, c.id, r, c.tol, tail);
    }
    if report.pass {
        Ok(())
    } else {
        let ids: Vec<&str> = report.failed().map(|c| c.id.as_str()).collect();
        Err(Failure::Check(format!("failed checks: {}", ids.join(", "))))
    }
}

fn run_and_emit(m: &FinslerMetric, cfg: &RunConfig, out: &Option<PathBuf>) -> Result<(), Failure> {
    let report = run_suite(m, cfg)?;
    emit(out, &(report.to_json()? + "\n"))?;
    summarize(&report)
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let m = build_metric(&a.metric)?;
    let cfg = RunConfig {
        suite: Suite::parse(&a.suite)?,
        samples: a.sample.samples,
        seed: a.sample.seed,
        tol: a.tol,
        jet_order: a.sample.jet_order,
        sigma: match &a.sigma {
            Some(s) => SigmaSpec::parse(s)?,
            None => RunConfig::default().sigma,
        },
        eps: parse_eps(&a.eps)?,
    };
    run_and_emit(&m, &cfg, &a.sample.out)
}

fn conformal(a: ConformalArgs) -> Result<(), Failure> {
    let m = build_metric(&a.metric)?;
    let cfg = RunConfig {
        suite: Suite::Conformal,
        samples: a.sample.samples,
        seed: a.sample.seed,
        tol: a.tol,
        jet_order: a.sample.jet_order,
        sigma: SigmaSpec::parse(&a.sigma)?,
        ..RunConfig::default()
    };
    run_and_emit(&m, &cfg, &a.sample.out)
}

fn table(a: TableArgs) -> Result<(), Failure> {
    let m = build_metric(&a.metric)?;
    let mut p = match &a.at {
        Some(s) => ChartPoint::parse(s)?,
        None => indicatrix_sample(&m, 1, a.seed)?.remove(0),
    };
    if p.dim() != m.dim() {
        return Err(Failure::Config(format!("--at has dimension {}, metric has {}", p.dim(), m.dim())));
    }
    if a.normalize {
        let f = m.value(&p)?;
        p = p.scaled(1.0 / f)?;
    }
    let text = point_table(&m, &p, a.jet_order).map_err(|e| match e {
        GeomError::NotPositiveDefinite(_) | GeomError::DegenerateFrame(_) => Failure::Check(e.to_string()),
        other => Failure::Config(other.to_string()),
    })?;
    print!("{text}");
    Ok(())
}

fn adiabatic(a: AdiabaticArgs) -> Result<(), Failure> {
    let m = build_metric(&a.metric)?;
    let eps = parse_eps(&a.eps)?;
    let (rows, slope) = adiabatic_sweep(&m, a.sample.samples, a.sample.seed, &eps, a.sample.jet_order)?;
    emit(&a.sample.out, &adiabatic_csv(&rows, slope)?)?;
    let bad = rows
        .chunks(eps.len())
        .filter(|c| convergence_measure(&c.iter().map(|r| (r.eps, r.deviation)).collect::<Vec<_>>()) >= ADIABATIC_RATIO)
        .count();
    match slope {
        Some(s) => eprintln!("log-log slope {s:.6}"),
        None => eprintln!("log-log slope undefined (all deviations vanish)"),
    }
    if bad > 0 {
        return Err(Failure::Check(format!("{bad} point(s) without adiabatic convergence")));
    }
    Ok(())
}

fn list_metrics() -> Result<(), Failure> {
    for d in registry_list() {
        let params: Vec<String> = d.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{:<24} dim={} {:<10} {:<22} {}",
            d.name,
            d.default_dim,
            if d.riemannian { "riemannian" } else { "finsler" },
            params.join(","),
            d.description
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListMetrics => list_metrics(),
        Command::Verify(a) => verify(a),
        Command::Table(a) => table(a),
        Command::Adiabatic(a) => adiabatic(a),
        Command::Conformal(a) => conformal(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("finslerlab: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("finslerlab: {msg}");
            ExitCode::from(2)
        }
    }
}
