//! Command-line front end. Every command is a thin wrapper over library
//! calls; [`main_with_args`] is the whole program minus process exit.

mod config;
mod input;
mod report;

pub use config::{parse_theta_grid, ColumnSelector, ConfigFile, Overrides, RunConfig, KNOWN_KEYS};
pub use input::{load_sample, read_column};
pub use report::{bounds_json, cdf_csv, cdf_dump, config_json, interval_warnings, upper_lp_dump, SCHEMA_VERSION};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bounds::compute_bounds;
use crate::error::{Error, Result};
use crate::numfmt::to_json_string;
use crate::sample::Sample;
use crate::sim::{coverage_experiment, Scenario, SelectionModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EMPTY_SET: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Exit status for an error: 3 for an empty plausibility set, 4 for a
/// solver failure, 2 for everything else (input, parsing, configuration).
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::EmptyPlausibilitySet(_) => EXIT_EMPTY_SET,
        Error::SolverFailure(_) => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

/// One-line `error kind=<kind> [line=<n>]: <message>` diagnostic.
pub fn error_line(e: &Error) -> String {
    let msg = match e {
        Error::Parse { line, message } => return format!("error kind=parse line={line}: {message}"),
        Error::InvalidInput(m)
        | Error::EmptyPlausibilitySet(m)
        | Error::SolverFailure(m)
        | Error::Degenerate(m)
        | Error::Config(m)
        | Error::Io(m) => m,
    };
    format!("error kind={}: {}", e.kind(), msg.replace('\n', " "))
}

#[derive(Debug, Parser)]
#[command(name = "shapebounds", version, about = "Identification intervals for a population mean under bounded selection bias")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the identification interval for one data column (JSON output).
    Bounds(BoundsArgs),
    /// Weighted CDFs behind the upper endpoints, as long-format CSV.
    CdfDump(BoundsArgs),
    /// Monte Carlo coverage experiment (CSV per replication, JSON summary).
    Simulate(SimArgs),
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// key = value configuration file; flags take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Bound on the ratio of largest to smallest selection probability
    #[arg(long)]
    gamma: Option<f64>,
    /// none | normal | symmetric | logconcave
    #[arg(long)]
    family: Option<String>,
    /// Band level (default 1/sqrt(n))
    #[arg(long)]
    alpha: Option<f64>,
    /// Extra band width
    #[arg(long = "delta-star")]
    delta_star: Option<f64>,
    /// Number of centers (symmetric) or thresholds (logconcave)
    #[arg(long = "m-grid", value_name = "N")]
    m_grid: Option<usize>,
    /// Location-by-scale grid for the normal family
    #[arg(long = "theta-grid", value_name = "NxM")]
    theta_grid: Option<String>,
    /// Output path (default stdout)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// CSV file with the outcomes
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Zero-based column index, or a header name
    #[arg(long)]
    column: Option<String>,
    /// Treat the first non-blank row as a header
    #[arg(long)]
    header: bool,
    /// Write ECDF and weighted-CDF series to PATH
    #[arg(long = "emit-cdf", value_name = "PATH")]
    emit_cdf: Option<PathBuf>,
    /// Include the optimal weights in the JSON output
    #[arg(long = "emit-weights")]
    emit_weights: bool,
    /// Write the upper-endpoint LP in text form to PATH
    #[arg(long = "emit-lp", value_name = "PATH")]
    emit_lp: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Population, e.g. normal:0,1 | logistic:0,1 | gamma:2,1 | uniform:0,1
    #[arg(long)]
    population: Option<String>,
    /// True selection ratio (default: the analysis gamma)
    #[arg(long = "gamma-true")]
    gamma_true: Option<f64>,
    #[arg(long = "sample-size", value_name = "N")]
    sample_size: Option<usize>,
    /// Largest selection probability
    #[arg(long = "pi-max")]
    pi_max: Option<f64>,
    /// Write the JSON summary to PATH (default stdout)
    #[arg(long, value_name = "PATH")]
    summary: Option<PathBuf>,
}

fn spec_overrides(a: &SpecArgs) -> Overrides {
    Overrides {
        config: a.config.clone(),
        gamma: a.gamma,
        family: a.family.clone(),
        alpha: a.alpha,
        delta_star: a.delta_star,
        m_grid: a.m_grid,
        theta_grid: a.theta_grid.clone(),
        output: a.output.clone(),
        ..Default::default()
    }
}

fn bounds_overrides(a: &BoundsArgs) -> Overrides {
    Overrides {
        input: a.input.clone(),
        column: a.column.clone(),
        header: a.header,
        emit_cdf: a.emit_cdf.clone(),
        emit_weights: a.emit_weights,
        emit_lp: a.emit_lp.clone(),
        ..spec_overrides(&a.spec)
    }
}

fn sim_overrides(a: &SimArgs) -> Overrides {
    Overrides {
        seed: a.seed,
        reps: a.reps,
        population: a.population.clone(),
        gamma_true: a.gamma_true,
        sample_size: a.sample_size,
        pi_max: a.pi_max,
        summary: a.summary.clone(),
        ..spec_overrides(&a.spec)
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// What a command produced: the main document (written to `--output` or
/// stdout), side files, and warnings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutput {
    pub main: String,
    /// Send `main` to stdout even when `--output` is set.
    pub main_to_stdout: bool,
    pub files: Vec<(PathBuf, String)>,
    pub warnings: Vec<String>,
}

fn input_sample(cfg: &RunConfig) -> Result<Sample> {
    let path = cfg.input.as_ref().ok_or_else(|| Error::Config("--input is required".into()))?;
    load_sample(path, &cfg.column, cfg.header)
}

/// `bounds`: JSON report for the configured family.
pub fn cmd_bounds(cfg: &RunConfig) -> Result<CommandOutput> {
    let sample = input_sample(cfg)?;
    let iv = compute_bounds(&sample, &cfg.spec)?;
    let warnings = interval_warnings(&iv);
    let doc = bounds_json(cfg, &sample, &iv, &warnings)?;
    let mut files = Vec::new();
    if let Some(p) = &cfg.emit_cdf {
        files.push((p.clone(), cdf_csv(&sample, &[(cfg.spec.family.name(), &iv)])?));
    }
    if let Some(p) = &cfg.emit_lp {
        files.push((p.clone(), upper_lp_dump(&sample, &iv)?));
    }
    Ok(CommandOutput { main: to_json_string(&doc), files, warnings, main_to_stdout: false })
}

/// `cdf-dump`: ECDF plus the none/symmetric/logconcave upper-endpoint CDFs.
pub fn cmd_cdf_dump(cfg: &RunConfig) -> Result<CommandOutput> {
    let sample = input_sample(cfg)?;
    Ok(CommandOutput { main: cdf_dump(&sample, &cfg.spec)?, ..Default::default() })
}

/// `simulate`: coverage CSV to `--output` (stdout if only `--summary` is
/// given) and JSON summary to `--summary` (stdout otherwise).
pub fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutput> {
    let seed = cfg.seed.ok_or_else(|| Error::Config("--seed is required for simulate".into()))?;
    if cfg.reps == 0 {
        return Err(Error::Config("reps must be positive".into()));
    }
    let gamma_true = cfg.gamma_true.unwrap_or(cfg.spec.gamma);
    let scenario = Scenario {
        population: cfg.population,
        selection: SelectionModel::logistic_for(&cfg.population, gamma_true, cfg.pi_max),
        n: cfg.sample_size,
        seed,
    };
    let report = coverage_experiment(&scenario, &cfg.spec, cfg.reps)?;
    let mut summary = report.summary_json();
    if let Value::Object(map) = &mut summary {
        map.insert("schemaVersion".into(), json!(SCHEMA_VERSION));
        map.insert("config".into(), config_json(cfg));
    }
    let summary = to_json_string(&summary);
    let csv = report.to_csv()?;
    let mut warnings = Vec::new();
    if report.empty_reps() > 0 {
        warnings.push(format!("{} of {} replications had an empty plausibility set", report.empty_reps(), report.reps()));
    }
    let mut out = CommandOutput { warnings, ..Default::default() };
    match (&cfg.output, &cfg.summary) {
        (Some(_), Some(s)) => {
            out.main = csv;
            out.files.push((s.clone(), summary));
        }
        (Some(path), None) => {
            out.files.push((path.clone(), csv));
            out.main = summary;
            out.main_to_stdout = true;
        }
        (None, Some(s)) => {
            out.main = csv;
            out.files.push((s.clone(), summary));
        }
        (None, None) => out.main = summary,
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<(RunConfig, CommandOutput)> {
    let (overrides, run): (Overrides, fn(&RunConfig) -> Result<CommandOutput>) = match &cli.command {
        Command::Bounds(a) => (bounds_overrides(a), cmd_bounds),
        Command::CdfDump(a) => (bounds_overrides(a), cmd_cdf_dump),
        Command::Simulate(a) => (sim_overrides(a), cmd_simulate),
    };
    let cfg = RunConfig::resolve(&overrides)?;
    let out = run(&cfg)?;
    Ok((cfg, out))
}

/// Parses `args` (including the program name), runs the command, writes
/// results and diagnostics, and returns the exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
                let _ = writeln!(stderr, "error kind=usage: {first}");
            }
            return code;
        }
    };
    let result = dispatch(&cli).and_then(|(cfg, out)| {
        for (path, text) in &out.files {
            write_file(path, text)?;
        }
        match &cfg.output {
            Some(p) if !out.main_to_stdout => write_file(p, &out.main)?,
            _ => stdout.write_all(out.main.as_bytes())?,
        }
        Ok(out.warnings)
    });
    match result {
        Ok(warnings) => {
            for w in warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_line(&e));
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    main_with_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
