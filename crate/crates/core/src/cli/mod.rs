//! The `quasimetric` command-line driver.
//!
//! Every subcommand produces a [`RunReport`]. The process exits with 0 when
//! every asserted check passes, 1 when one fails and 2 on usage or input
//! errors.

mod commands;
pub mod demo;
pub mod report;
pub mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::randers::Stencil;
use crate::space::{ValidationOptions, DEFAULT_TOL};

pub use report::{emit_report, render_stdout, CheckResult, Format, RunReport, Table};
pub use scenario::RandersScenario;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "quasimetric",
    version,
    about = "Quasi-metric, weighted quasi-metric and Randers distance checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Base tolerance, scaled by the largest matrix entry.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Only require d(x,y) = d(y,x) = 0 => x = y instead of d(x,y) > 0.
    #[arg(long, global = true)]
    pub weak_separation: bool,
    /// Directory for report.json and CSV tables. Without it the report goes to stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Stdout format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    pub format: Format,
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Add wall-clock timings to the report (makes it non-reproducible).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub timings: bool,
}

impl GlobalArgs {
    pub fn validation(&self) -> ValidationOptions {
        ValidationOptions {
            tol: self.tol,
            weak_separation: self.weak_separation,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Stencil size, 8 or 16.
    #[arg(long, value_parser = parse_stencil)]
    pub stencil: Option<Stencil>,
    /// Grid nodes per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
}

fn parse_stencil(s: &str) -> Result<Stencil, String> {
    let k: u32 = s.parse().map_err(|e| format!("{e}"))?;
    Stencil::try_from(k)
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Check the quasi-metric axioms of a space file.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Detect weightability and recover the weight.
    Weigh {
        #[arg(long)]
        input: PathBuf,
        /// Label (or index) of the basepoint; defaults to the first point.
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Build d = rho + (w(y) - w(x)) / 2 from a metric and a weight.
    Compose {
        /// Metric space file; a JSON file may carry the weight.
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated weight, overriding the file's.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        weight: Option<Vec<f64>>,
    },
    /// Verify the bundle embedding x -> (x, w(x)/2) of a weighted space.
    EmbedCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run a Randers grid scenario (JSON or TOML).
    Randers {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Quasi-Hausdorff distances between subsets.
    Hausdorff {
        #[arg(long)]
        input: PathBuf,
        /// JSON list of subsets (labels or indices).
        #[arg(long)]
        subsets: PathBuf,
    },
    /// Built-in scenarios.
    Demo {
        #[arg(value_enum)]
        name: demo::DemoName,
        #[command(flatten)]
        grid: GridArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Weigh { .. } => "weigh",
            Command::Compose { .. } => "compose",
            Command::EmbedCheck { .. } => "embed-check",
            Command::Randers { .. } => "randers",
            Command::Hausdorff { .. } => "hausdorff",
            Command::Demo { .. } => "demo",
        }
    }
}

/// Exit code for an error: input problems are usage errors, everything the
/// computational modules reject counts as a failed check.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::Io { .. }
        | Error::Structural(_)
        | Error::IndexOutOfRange { .. }
        | Error::EmptySubset
        | Error::Domain(_)
        | Error::RayExitsMask { .. } => 2,
        _ => 1,
    }
}

/// Runs one parsed command line and returns its report.
pub fn run(cli: &Cli) -> crate::Result<RunReport> {
    let scenario = serde_json::to_value(cli).expect("cli args serialize");
    let mut report = RunReport::new(cli.command.name(), scenario);
    let opts = cli.global.validation();
    match &cli.command {
        Command::Validate { input } => commands::validate(&mut report, input, &opts)?,
        Command::Weigh { input, basepoint } => commands::weigh(&mut report, input, basepoint.as_deref(), &opts)?,
        Command::Compose { input, weight } => commands::compose(&mut report, input, weight.as_deref(), &opts)?,
        Command::EmbedCheck { input } => commands::embed_check(&mut report, input, &opts)?,
        Command::Randers { input, grid } => commands::randers(&mut report, input, grid)?,
        Command::Hausdorff { input, subsets } => commands::hausdorff(&mut report, input, subsets, &opts)?,
        Command::Demo { name, grid } => demo::run(&mut report, *name, grid, &opts)?,
    }
    if !cli.global.timings {
        report.timings_ms = None;
    }
    Ok(report)
}

/// Full entry point: parse arguments, run, emit, map to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(k) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("warning: could not configure {k} threads: {e}");
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    match &cli.global.output {
        Some(dir) => match emit_report(&report, dir) {
            Ok(files) => {
                for c in &report.checks {
                    let status = match (c.asserted, c.passed) {
                        (false, _) => "INFO",
                        (true, true) => "PASS",
                        (true, false) => "FAIL",
                    };
                    println!("{status} {} = {} (residual {:e})", c.name, c.value, c.residual);
                }
                for f in files {
                    println!("wrote {}", dir.join(f).display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => print!("{}", render_stdout(&report, cli.global.format)),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
