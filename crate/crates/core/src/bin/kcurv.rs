//! `kcurv` — verification suites, solves and sweeps from the command line.
//!
//! Exit codes: 0 success, 1 a check failed or a solve did not converge,
//! 2 usage or validation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kcurv::harness::{self, Command, Format, RunConfig, SolveProblem, SweepProblem};
use kcurv::{Error, Result};

#[derive(Parser)]
#[command(name = "kcurv", version, about = "Curvature-equation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Common {
    /// JSON file: a run configuration for `verify`, the problem for
    /// `solve` and `sweep`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $KCURV_OUT_DIR, else stdout only).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run seeded verification suites.
    Verify {
        /// Suite name, repeatable; `all` runs every suite.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve one problem file.
    Solve {
        /// Problem file (same as --config).
        problem: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Continuation sweep over a family on several grids.
    Sweep {
        /// Family file (same as --config).
        problem: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

enum Outcome {
    Success,
    Failure,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
}

fn problem_path(positional: Option<PathBuf>, common: &Common) -> Result<PathBuf> {
    positional
        .or_else(|| common.config.clone())
        .ok_or_else(|| Error::validation("problem", "a problem file is required (positional or --config)"))
}

fn format_of(common: &Common, fallback: Format) -> Format {
    match common.format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) => Format::Csv,
        None => fallback,
    }
}

fn run(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Verify { suite, samples, seed, common } => {
            let mut cfg: RunConfig = match &common.config {
                Some(p) => harness::parse_json(&read(p)?)?,
                None => RunConfig::default(),
            };
            cfg.command = Command::Verify;
            if !suite.is_empty() {
                cfg.suites = suite;
            }
            cfg.samples = samples.unwrap_or(cfg.samples);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.format = format_of(&common, cfg.format);
            cfg.out = harness::output_dir(common.out.as_deref().or(cfg.out.as_deref()));
            let reports = harness::run_verify(&cfg)?;
            let text = match cfg.format {
                Format::Json => serde_json::to_string_pretty(&reports)?,
                Format::Csv => harness::suites_csv(&reports),
            };
            if let Some(dir) = &cfg.out {
                harness::write_json(dir, "verify.json", &reports)?;
                harness::write_text(dir, "verify.csv", &harness::suites_csv(&reports))?;
            }
            println!("{text}");
            for r in &reports {
                for c in r.checks.iter().filter(|c| c.failed()) {
                    eprintln!(
                        "FAIL {}/{}: {} of {} admissible samples passed, {} errors, worst margin {:?}",
                        r.suite, c.name, c.passed, c.admissible, c.skipped_errors, c.worst_margin
                    );
                }
            }
            Ok(if reports.iter().any(|r| r.hard_failure) {
                Outcome::Failure
            } else {
                Outcome::Success
            })
        }
        Cmd::Solve { problem, common } => {
            let path = problem_path(problem, &common)?;
            let p: SolveProblem = harness::parse_json(&read(&path)?)?;
            let out = harness::run_solve(&p)?;
            if let Some(dir) = harness::output_dir(common.out.as_deref()) {
                harness::write_json(&dir, "solve.json", &out)?;
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            if !out.report.converged {
                eprintln!("solve did not converge: status {}, residual {:e}", out.report.status.as_str(), out.report.residual);
                return Ok(Outcome::Failure);
            }
            Ok(Outcome::Success)
        }
        Cmd::Sweep { problem, common } => {
            let path = problem_path(problem, &common)?;
            let p: SweepProblem = harness::parse_json(&read(&path)?)?;
            let out = harness::run_sweep(&p)?;
            let csv = out.table.to_csv();
            if let Some(dir) = harness::output_dir(common.out.as_deref()) {
                harness::write_text(&dir, "sweep.csv", &csv)?;
                harness::write_json(&dir, "sweep_summary.json", &out)?;
            }
            match format_of(&common, Format::Csv) {
                Format::Csv => print!("{csv}"),
                Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
            }
            // per-row failures are data, not errors
            Ok(Outcome::Success)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failure) => ExitCode::from(1),
        Err(e @ (Error::Validation { .. } | Error::Json(_) | Error::Io(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
