//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure (or a
//! failed oracle in `verify`). Diagnostics go to stderr; stdout only carries
//! progress lines.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{parse_config, ScenarioConfig};
use crate::error::Error;
use crate::scenario::{
    estimate_convergence_order, run_scenario, verify_builtin, ConvergenceOutcome, OracleCheck, RunReport,
    BUILTIN_NAMES,
};

pub const CSV_HEADER: &str =
    "t,psi_norm,unitarity_defect,schrodinger_residual,heisenberg_residual,picture_gap,expectation_re,expectation_im";

pub const THREADS_ENV: &str = "TRANSPORTQ_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "transportq", version, about = "Quantum evolution as parallel transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its CSV time series and JSON summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the oracle checks of the built-in scenarios.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Convergence study: terminal error against step count.
    Order {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        steps: Vec<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION },
            message: e.to_string(),
        }
    }
}

/// Parses `args` (program name first) and executes the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run { config, csv, json } => cmd_run(&config, csv, json),
        Command::Verify { suite } => cmd_verify(&suite),
        Command::Order { config, steps, csv } => cmd_order(&config, &steps, csv),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

/// Output path: explicit flag, then the config's `outputs`, then a sibling
/// of the config file.
fn output_path(flag: Option<PathBuf>, configured: Option<&String>, config: &Path, suffix: &str) -> PathBuf {
    if let Some(p) = flag {
        return p;
    }
    if let Some(p) = configured {
        let p = PathBuf::from(p);
        return if p.is_relative() {
            config.parent().map(|d| d.join(&p)).unwrap_or(p)
        } else {
            p
        };
    }
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    config.with_file_name(format!("{stem}{suffix}"))
}

fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_value).unwrap_or_default()
}

/// CSV time series: one row per grid point, 17 significant digits, empty
/// fields where a quantity does not apply to the run.
pub fn report_csv(report: &RunReport) -> String {
    let mut out = String::with_capacity(64 * (report.records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        let (re, im) = match r.expectation {
            Some((re, im)) => (Some(re), Some(im)),
            None => (None, None),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_value(r.t),
            fmt_opt(r.psi_norm),
            fmt_value(r.unitarity_defect),
            fmt_opt(r.schrodinger_residual),
            fmt_opt(r.heisenberg_residual),
            fmt_opt(r.picture_gap),
            fmt_opt(re),
            fmt_opt(im),
        );
    }
    out
}

/// CSV of a convergence study: `steps,dt,error`.
pub fn order_csv(t_final: f64, outcome: &ConvergenceOutcome) -> String {
    let mut out = String::from("steps,dt,error\n");
    for &(n, e) in outcome.errors() {
        let _ = writeln!(out, "{n},{},{}", fmt_value(t_final / n as f64), fmt_value(e));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn cmd_run(config_path: &Path, csv: Option<PathBuf>, json: Option<PathBuf>) -> Result<i32, Failure> {
    let config = load_config(config_path)?;
    let scenario = config
        .to_scenario()
        .map_err(|e| Failure::validation(format!("{}: {e}", config_path.display())))?;
    println!(
        "running {} ({} steps, {})",
        scenario.name, scenario.steps, scenario.method
    );
    let report = run_scenario(&scenario)?;
    let csv_path = output_path(csv, config.outputs.csv.as_ref(), config_path, ".csv");
    let json_path = output_path(json, config.outputs.json.as_ref(), config_path, ".summary.json");
    write_file(&csv_path, &report_csv(&report))?;
    let summary = serde_json::to_string_pretty(&report.summary).expect("summary serializes");
    write_file(&json_path, &(summary + "\n"))?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(EXIT_OK)
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn cmd_verify(suite: &str) -> Result<i32, Failure> {
    let names: Vec<&str> = if suite == "all" {
        BUILTIN_NAMES.to_vec()
    } else if let Some(&name) = BUILTIN_NAMES.iter().find(|&&n| n == suite) {
        vec![name]
    } else {
        return Err(Failure::validation(format!(
            "unknown suite `{suite}`, expected all or one of {}",
            BUILTIN_NAMES.join(", ")
        )));
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::validation(format!("thread pool: {e}")))?;
    let results: Vec<(&str, Result<Vec<OracleCheck>, Error>)> =
        pool.install(|| names.par_iter().map(|&n| (n, verify_builtin(n))).collect());

    let mut failed = 0usize;
    for (name, result) in results {
        match result {
            Ok(checks) => {
                for c in checks {
                    let status = if c.passed() { "PASS" } else { "FAIL" };
                    println!(
                        "{status} {}/{}: {:.3e} <= {:.1e}",
                        c.scenario, c.check, c.value, c.threshold
                    );
                    if !c.passed() {
                        failed += 1;
                        eprintln!(
                            "oracle failed: {}/{} = {:e} exceeds {:e}",
                            c.scenario, c.check, c.value, c.threshold
                        );
                    }
                }
            }
            Err(e) => {
                failed += 1;
                eprintln!("scenario {name} failed to run: {e}");
            }
        }
    }
    if failed == 0 {
        Ok(EXIT_OK)
    } else {
        eprintln!("{failed} oracle check(s) failed");
        Ok(EXIT_NUMERICAL)
    }
}

fn cmd_order(config_path: &Path, steps: &[usize], csv: Option<PathBuf>) -> Result<i32, Failure> {
    let config = load_config(config_path)?;
    let scenario = config
        .to_scenario()
        .map_err(|e| Failure::validation(format!("{}: {e}", config_path.display())))?;
    println!("convergence study for {} ({})", scenario.name, scenario.method);
    let outcome = estimate_convergence_order(&scenario, steps)?;
    let csv_path = output_path(csv, None, config_path, ".order.csv");
    write_file(&csv_path, &order_csv(scenario.t_final, &outcome))?;
    match &outcome {
        ConvergenceOutcome::Slope { slope, .. } => println!("measured order {slope:.4}"),
        ConvergenceOutcome::Exact { max_error, .. } => {
            println!("exact to roundoff (max error {max_error:.3e})")
        }
    }
    println!("wrote {}", csv_path.display());
    Ok(EXIT_OK)
}
