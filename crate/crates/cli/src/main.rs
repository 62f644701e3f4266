//! `ladder`: build the ladder table, run verification suites, list zeros.

mod config;
mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ladder_core::critical_line::{find_zeros, ZeroScan};
use ladder_core::formulas::CheckKind;
use ladder_core::ladder::{resolve_cache_dir, CacheStatus, LadderConfig, LadderModel, T0};
use ladder_core::quadrature::QuadratureConfig;
use ladder_core::report::{records_to_csv, ExperimentReport};

use config::Settings;
use suites::{Suite, SuiteParams, UPolicy};

const EXIT_SOFT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_HARD: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

const DEFAULT_CACHE_DIR: &str = ".ladder-cache";

#[derive(Parser)]
#[command(name = "ladder", version, about = "Ladder-function experiments on the critical line")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load) the ladder table and print diagnostics.
    BuildLadder(BuildArgs),
    /// Run a verification suite and write its records.
    Verify(VerifyArgs),
    /// List consecutive zeros of Z(t) from a starting ordinate.
    Zeros(ZerosArgs),
}

#[derive(Args)]
struct LadderArgs {
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Relative residual accepted when inverting the defining equation.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the table cache.
    #[arg(long)]
    no_cache: bool,
    /// `key = value` file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    ladder: LadderArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    ladder: LadderArgs,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Comma-separated list of T values.
    #[arg(long = "T", value_name = "T,...")]
    t: Option<String>,
    #[arg(long = "U")]
    u: Option<f64>,
    #[arg(long = "U-policy", value_enum)]
    u_policy: Option<UPolicy>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Include the expensive deep levels.
    #[arg(long)]
    deep: bool,
}

#[derive(Args)]
struct ZerosArgs {
    #[arg(long)]
    near: f64,
    /// Number of gaps; count + 1 zeros are printed.
    #[arg(long, default_value_t = 10)]
    count: usize,
}

/// Bad input detected after argument parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::BuildLadder(a) => build_ladder(a),
        Command::Verify(a) => verify(a),
        Command::Zeros(a) => zeros(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<UsageError>()) {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_RUNTIME)
            }
        }
    }
}

fn settings(args: &LadderArgs, extra: Vec<(&'static str, Option<String>)>) -> Result<Settings> {
    let base = match &args.config {
        Some(p) => Settings::load(p).map_err(|e| usage(format!("{e:#}")))?,
        None => Settings::default(),
    };
    let mut flags = vec![
        ("t-min", args.t_min.map(|v| v.to_string())),
        ("t-max", args.t_max.map(|v| v.to_string())),
        ("tol", args.tol.map(|v| v.to_string())),
        ("cache-dir", args.cache_dir.as_ref().map(|p| p.display().to_string())),
    ];
    flags.extend(extra);
    Ok(base.overlay(flags))
}

fn get<T: std::str::FromStr>(s: &Settings, key: &str) -> Result<Option<T>> {
    s.get(key).map_err(|e| usage(e.to_string()))
}

fn ladder_config(s: &Settings, default_max: f64) -> Result<LadderConfig> {
    let t_min = get(s, "t-min")?.unwrap_or(T0);
    let t_max = get(s, "t-max")?.unwrap_or(default_max);
    let mut cfg = LadderConfig::new(t_min, t_max);
    if let Some(tol) = get(s, "tol")? {
        cfg.newton_tol = tol;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn cache_dir(s: &Settings, disabled: bool) -> Option<PathBuf> {
    if disabled {
        return None;
    }
    let explicit = s.raw("cache-dir").map(PathBuf::from);
    resolve_cache_dir(explicit.as_deref()).or_else(|| Some(PathBuf::from(DEFAULT_CACHE_DIR)))
}

fn load_model(cfg: LadderConfig, dir: Option<&Path>) -> Result<(LadderModel, CacheStatus)> {
    if let Some(d) = dir {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let (model, status) = LadderModel::build_cached(cfg, dir).context("building the ladder table")?;
    match &status {
        CacheStatus::Hit(p) => eprintln!("cache hit: {}", p.display()),
        CacheStatus::Miss(p) => eprintln!("cache miss: built and stored {}", p.display()),
        CacheStatus::Disabled => eprintln!("cache disabled"),
    }
    Ok((model, status))
}

fn build_ladder(a: BuildArgs) -> Result<u8> {
    let s = settings(&a.ladder, Vec::new())?;
    let cfg = ladder_config(&s, 1.0e4)?;
    let dir = cache_dir(&s, a.ladder.no_cache);
    let (model, _) = load_model(cfg, dir.as_deref())?;
    let (ts, _, _) = model.grid();
    let probe: Vec<f64> = ts.iter().copied().step_by((ts.len() / 200).max(1)).collect();
    let residual = model.max_residual(&probe)?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "range        [{}, {}]", model.t_min(), model.t_max())?;
    writeln!(out, "grid points  {}", ts.len())?;
    writeln!(out, "max residual {residual:.3e}")?;
    writeln!(out, "calibration  {:.3e}", model.calibration_residual())?;
    writeln!(out)?;
    writeln!(out, "{:>14} {:>18} {:>12}", "t", "phi1(t)", "deficit")?;
    let mut t = 1.0e3_f64.max(model.t_min());
    while t <= model.t_max() {
        let phi = model.value(t)?;
        let deficit = model.deficit_ratio(t)?;
        writeln!(out, "{t:>14.1} {phi:>18.6} {deficit:>12.6}")?;
        t *= 10.0;
    }
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let extra = vec![
        ("suite", a.suite.map(|v| v.name().to_string())),
        ("T", a.t.clone()),
        ("U", a.u.map(|v| v.to_string())),
        ("U-policy", a.u_policy.map(|p| format!("{p:?}").to_lowercase())),
        ("l", a.l.map(|v| v.to_string())),
        ("n", a.n.map(|v| v.to_string())),
        ("out", a.out.as_ref().map(|p| p.display().to_string())),
        ("format", a.format.map(|f| if f == Format::Csv { "csv" } else { "json" }.to_string())),
        ("epsilon", a.epsilon.map(|v| v.to_string())),
        ("levels", a.levels.map(|v| v.to_string())),
        ("rel-tol", a.rel_tol.map(|v| v.to_string())),
        ("deep", a.deep.then(|| "true".to_string())),
    ];
    let s = settings(&a.ladder, extra)?;
    let suite: Suite = get(&s, "suite")?.ok_or_else(|| usage("no suite given (use --suite)"))?;
    let format = match s.raw("format").unwrap_or("csv") {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => return Err(usage(format!("unknown format `{other}`"))),
    };
    let mut quad = QuadratureConfig::default();
    if let Some(tol) = get(&s, "rel-tol")? {
        quad.rel_tol = tol;
    }
    quad.validate().map_err(|e| usage(e.to_string()))?;
    let params = SuiteParams {
        ts: s.list("T").map_err(|e| usage(e.to_string()))?.unwrap_or_else(|| suite.default_ts()),
        u: get(&s, "U")?,
        policy: get(&s, "U-policy")?.unwrap_or(UPolicy::Max),
        l: get(&s, "l")?,
        n: get(&s, "n")?,
        epsilon: get(&s, "epsilon")?.unwrap_or(0.3),
        levels: get(&s, "levels")?.unwrap_or(5),
        deep: get(&s, "deep")?.unwrap_or(false),
        quad,
    };
    suites::validate(suite, &params).map_err(|e| usage(e.to_string()))?;

    let reach = params.reach(suite);
    let cfg = ladder_config(&s, (1.01 * reach).max(2.0 * T0))?;
    if cfg.t_max < reach {
        return Err(usage(format!("t-max {} below the largest ordinate needed, {reach}", cfg.t_max)));
    }
    let dir = cache_dir(&s, a.ladder.no_cache);
    let (model, status) = load_model(cfg, dir.as_deref())?;
    let key = match status {
        CacheStatus::Disabled => None,
        _ => Some(ladder_core::ladder::cache_key(&cfg)),
    };

    let mut report = ExperimentReport::new(suite.name(), s.map(), key);
    suites::run(suite, &model, &params, &mut report).map_err(|e| match e.downcast_ref::<ladder_core::Error>() {
        Some(ladder_core::Error::Inadmissible(m)) => usage(m.clone()),
        _ => e,
    })?;

    let body = match format {
        Format::Csv => records_to_csv(&report.records),
        Format::Json => report.to_json()?,
    };
    match s.raw("out") {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {path}"))?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        eprintln!("{mark} [{:?}] {}: {}", c.kind, c.family, c.detail);
    }
    let code = if !report.failures(CheckKind::Hard).is_empty() {
        EXIT_HARD
    } else if !report.failures(CheckKind::Soft).is_empty() {
        EXIT_SOFT
    } else {
        0
    };
    Ok(code)
}

fn zeros(a: ZerosArgs) -> Result<u8> {
    if !(a.near >= 10.0) {
        return Err(usage("--near must be at least 10"));
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "{:>4} {:>24} {:>12} {:>14}", "#", "gamma", "|Z|", "gap")?;
    if a.count == 0 {
        return Ok(0);
    }
    let scan = ZeroScan::default();
    let found = find_zeros(a.near, a.near + scan.max_span, a.count + 1, &scan)?;
    if found.len() < a.count + 1 {
        return Err(anyhow!("only {} zeros found after {}", found.len(), a.near));
    }
    let mut prev: Option<f64> = None;
    for (i, (g, r)) in found.iter().enumerate() {
        let gap = prev.map_or(String::from("-"), |p| format!("{:.10}", g - p));
        writeln!(out, "{i:>4} {g:>24.16} {r:>12.3e} {gap:>14}")?;
        prev = Some(*g);
    }
    Ok(0)
}
