//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::bounds::{
    validate_kesten, validate_lemma_sup, validate_sstar, validate_stopping_t, validate_wald,
    KestenOptions, LemmaSupOptions, ValidationReport,
};
use crate::distributions::{Family, TailModel};
use crate::error::{Error, Result};
use crate::experiments::{
    approx_only, compare, csv::write_estimates, mc_tail_estimate, ExperimentConfig,
};
use crate::processes::{Caps, ProcessKind, ProcessSpec};
use crate::random_times::{HorizonLaw, TimeRule};

/// Environment variable consulted when `--workers` is absent.
pub const WORKERS_ENV: &str = "HTM_DEFAULT_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "htm",
    version,
    about = "Tail probabilities of running maxima over random horizons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Empirical tail estimates on the configured grid.
    Sim(RunArgs),
    /// Asymptotic forms only, from simulated horizons.
    Approx(RunArgs),
    /// Empirical estimates joined with the asymptotic forms.
    Compare(RunArgs),
    /// Numerical checks of identities and bounds.
    #[command(subcommand)]
    Validate(Validator),
    /// Built-in fixture checks.
    Selftest,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configured replicate count.
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Validator {
    Sstar(SstarArgs),
    Kesten(RunArgs),
    Wald(RunArgs),
    LemmaSup(RunArgs),
    #[command(name = "stopping-T", alias = "stopping-t")]
    StoppingT(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SstarArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// pareto, lognormal, weibull, exponential, two_point or degenerate.
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub shift: f64,
    /// Grid points, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
}

fn default_decades() -> Vec<f64> {
    vec![1e2, 1e3, 1e4, 1e5, 1e6]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SstarConfig {
    model: TailModel,
    #[serde(default = "default_decades")]
    x_grid: Vec<f64>,
    #[serde(default)]
    output: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}
fn draws() -> usize {
    256
}
fn ceiling() -> f64 {
    1e4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KestenConfig {
    model: TailModel,
    horizon: HorizonLaw,
    delta: f64,
    n_max: usize,
    #[serde(default = "one")]
    c: f64,
    #[serde(default = "draws")]
    horizon_draws: usize,
    #[serde(default)]
    master_seed: u64,
    #[serde(default)]
    step: Option<f64>,
    #[serde(default = "ceiling")]
    ceiling: f64,
    #[serde(default)]
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WaldConfig {
    process: ProcessKind,
    rule: TimeRule,
    n_reps: u64,
    master_seed: u64,
    #[serde(default)]
    caps: Caps,
    #[serde(default)]
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LemmaSupConfig {
    process: ProcessSpec,
    epsilon: f64,
    rules: Vec<TimeRule>,
    n_reps: u64,
    master_seed: u64,
    sup_horizon: f64,
    #[serde(default)]
    caps: Caps,
    #[serde(default)]
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StoppingTConfig {
    process: ProcessSpec,
    rules: Vec<TimeRule>,
    t_max: f64,
    x_grid: Vec<f64>,
    n_reps: u64,
    master_seed: u64,
    #[serde(default)]
    caps: Caps,
    #[serde(default)]
    output: Option<PathBuf>,
}

fn read_config<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| Error::Config("--config is required".into()))?;
    let s = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| Error::Config(e.to_string()))
}

/// `--workers`, else the environment default, else the global pool.
pub fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}={v} is not a worker count"))),
        _ => Ok(None),
    }
}

/// Writes `body` to `path`, or to standard output when absent. Returns
/// whether standard output was used.
fn emit(path: Option<&Path>, body: &str) -> Result<bool> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, body)?;
            Ok(false)
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(true)
        }
    }
}

fn note(to_stderr: bool, line: &str) {
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

fn experiment(args: &RunArgs) -> Result<ExperimentConfig> {
    let path = args
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(n) = args.reps {
        cfg.n_reps = n;
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn family_from_flags(name: &str, p: &[f64]) -> Result<TailModel> {
    let need = |k: usize| -> Result<()> {
        if p.len() == k {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "family {name} takes {k} parameters, got {}",
                p.len()
            )))
        }
    };
    let fam = match name {
        "pareto" => {
            need(2)?;
            Family::Pareto {
                alpha: p[0],
                xm: p[1],
            }
        }
        "lognormal" => {
            need(2)?;
            Family::Lognormal {
                mu: p[0],
                sigma: p[1],
            }
        }
        "weibull" => {
            need(2)?;
            Family::Weibull {
                shape: p[0],
                scale: p[1],
            }
        }
        "exponential" => {
            need(1)?;
            Family::Exponential { rate: p[0] }
        }
        "two_point" => {
            need(3)?;
            Family::TwoPoint {
                p: p[0],
                up: p[1],
                down: p[2],
            }
        }
        "degenerate" => {
            need(1)?;
            Family::Degenerate { v: p[0] }
        }
        other => return Err(Error::Config(format!("unknown family {other}"))),
    };
    TailModel::new(fam, 0.0)
}

fn report(rep: &ValidationReport, out: Option<&Path>) -> Result<ExitCode> {
    let to_stdout = emit(out, &rep.to_csv())?;
    note(to_stdout, &rep.verdict_line());
    if rep.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        error_line("ValidationFailed", &format!("{} check failed", rep.name));
        Ok(ExitCode::from(1))
    }
}

fn validate(v: &Validator) -> Result<ExitCode> {
    match v {
        Validator::Sstar(a) => {
            let (model, grid, output) = match &a.family {
                Some(name) => {
                    let m = family_from_flags(name, &a.params)?.with_shift(a.shift)?;
                    let g = if a.grid.is_empty() {
                        default_decades()
                    } else {
                        a.grid.clone()
                    };
                    (m, g, None)
                }
                None => {
                    let c: SstarConfig = read_config(a.run.config.as_deref())?;
                    let g = if a.grid.is_empty() {
                        c.x_grid
                    } else {
                        a.grid.clone()
                    };
                    (c.model, g, c.output)
                }
            };
            let rep = validate_sstar(&model, &grid)?;
            report(&rep, a.run.out.as_deref().or(output.as_deref()))
        }
        Validator::Kesten(a) => {
            let c: KestenConfig = read_config(a.config.as_deref())?;
            let opts = KestenOptions {
                c: c.c,
                horizon_draws: c.horizon_draws,
                seed: a.seed.unwrap_or(c.master_seed),
                step: c.step,
                ceiling: c.ceiling,
            };
            let workers = resolve_workers(a.workers)?;
            let rep = in_pool(workers, || {
                validate_kesten(&c.model, &c.horizon, c.delta, c.n_max, &opts)
            })??;
            report(&rep, a.out.as_deref().or(c.output.as_deref()))
        }
        Validator::Wald(a) => {
            let c: WaldConfig = read_config(a.config.as_deref())?;
            let spec = ProcessSpec::unchecked_drift(c.process)?;
            let rep = validate_wald(
                &spec,
                &c.rule,
                a.reps.unwrap_or(c.n_reps),
                a.seed.unwrap_or(c.master_seed),
                &c.caps,
                resolve_workers(a.workers)?,
            )?;
            report(&rep, a.out.as_deref().or(c.output.as_deref()))
        }
        Validator::LemmaSup(a) => {
            let c: LemmaSupConfig = read_config(a.config.as_deref())?;
            let opts = LemmaSupOptions {
                seed: a.seed.unwrap_or(c.master_seed),
                caps: c.caps,
                sup_horizon: c.sup_horizon,
            };
            let rep = validate_lemma_sup(
                &c.process,
                c.epsilon,
                &c.rules,
                a.reps.unwrap_or(c.n_reps),
                &opts,
                resolve_workers(a.workers)?,
            )?;
            report(&rep, a.out.as_deref().or(c.output.as_deref()))
        }
        Validator::StoppingT(a) => {
            let c: StoppingTConfig = read_config(a.config.as_deref())?;
            let rep = validate_stopping_t(
                &c.process,
                &c.rules,
                c.t_max,
                &c.x_grid,
                a.reps.unwrap_or(c.n_reps),
                a.seed.unwrap_or(c.master_seed),
                &c.caps,
                resolve_workers(a.workers)?,
            )?;
            report(&rep, a.out.as_deref().or(c.output.as_deref()))
        }
    }
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?
            .install(f)),
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Sim(a) => {
            let cfg = experiment(a)?;
            let mut run_cfg = cfg.clone();
            run_cfg.forms.clear();
            let run = mc_tail_estimate(&run_cfg, resolve_workers(a.workers)?)?;
            emit(cfg.output.as_deref(), &write_estimates(&run.estimates, &[]))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Approx(a) => {
            let cfg = experiment(a)?;
            emit(
                cfg.output.as_deref(),
                &approx_only(&cfg, resolve_workers(a.workers)?)?,
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(a) => {
            let cfg = experiment(a)?;
            let out = compare(&cfg, resolve_workers(a.workers)?)?;
            let to_stdout = emit(cfg.output.as_deref(), &out.csv)?;
            for s in &out.summary {
                note(to_stdout, &s.line());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(v) => validate(v),
        Command::Selftest => {
            let checks = crate::selftest::run();
            let mut ok = true;
            for c in &checks {
                println!(
                    "{} {}{}",
                    if c.pass { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail_suffix()
                );
                ok &= c.pass;
            }
            if ok {
                Ok(ExitCode::SUCCESS)
            } else {
                error_line("SelftestFailed", "one or more fixture checks failed");
                Ok(ExitCode::from(1))
            }
        }
    }
}

/// Machine-readable error line on standard error.
pub fn error_line(kind: &str, message: &str) {
    eprintln!(
        "{}",
        serde_json::json!({ "error": kind, "message": message })
    );
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            error_line("Usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            error_line(e.kind(), &e.to_string());
            ExitCode::from(2)
        }
    }
}
