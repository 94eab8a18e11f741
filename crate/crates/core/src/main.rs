use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use hofer_depth::certificate::{
    asymptotic_slope, emit_report, generator_csv, plot_profile, run_certificate, slope_csv, slope_markdown,
    ReportFormat, Scenario,
};
use hofer_depth::generators::enumerate_generators;
use hofer_depth::geometry::{assess_assumption, AssumptionReport};
use hofer_depth::Error;

/// Worker threads used when a scenario file holds several scenarios.
const WORKERS_ENV: &str = "HOFER_DEPTH_WORKERS";

#[derive(Parser)]
#[command(name = "hofer-depth", version, about = "Certified boundary-depth lower bounds for geodesic-flow Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the four geodesic clauses for the scenario's class and k.
    VerifyAssumption {
        scenario: PathBuf,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// List the generators of f_{a-b} with gradings and actions.
    Enumerate {
        scenario: PathBuf,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Run the full pipeline and report every verdict.
    Certify {
        scenario: PathBuf,
        /// Also minimize the depth over all admissible acyclic differentials.
        #[arg(long)]
        brute_force: bool,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized bounds for m (a - b), m = 1..=K.
    Slope {
        scenario: PathBuf,
        #[arg(long)]
        m_max: u32,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
    /// Sample the profile of a - b on [0, R].
    Plot {
        scenario: PathBuf,
        #[arg(long)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit status for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Pass = 0,
    VerdictFailure = 2,
    ScenarioError = 3,
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::AssumptionViolated { .. } => Status::VerdictFailure,
        _ => Status::ScenarioError,
    }
}

fn assumption_markdown(r: &AssumptionReport) -> String {
    let mut out = String::from("| clause | holds | detail |\n|---|---|---|\n");
    for c in &r.clauses {
        out += &format!("| {} | {} | {} |\n", c.clause, if c.holds { "yes" } else { "no" }, c.detail);
    }
    out
}

fn run_one(cmd: &Command, s: &Scenario) -> hofer_depth::Result<(String, Status)> {
    match cmd {
        Command::VerifyAssumption { format, .. } => {
            let r = assess_assumption(&s.manifold, &s.submanifold, &s.endpoint, &s.class, s.k, 0.0)?;
            let text = match format {
                ReportFormat::Markdown | ReportFormat::Csv => assumption_markdown(&r),
                ReportFormat::Json => serde_json::to_string_pretty(&r).expect("serializable"),
            };
            Ok((text, if r.holds { Status::Pass } else { Status::VerdictFailure }))
        }
        Command::Enumerate { format, .. } => {
            let p = hofer_depth::profile::Profile::new(s.bump()?, s.difference());
            let set = enumerate_generators(&s.manifold, &s.submanifold, &s.endpoint, &s.class, &p)?;
            let text = match format {
                ReportFormat::Json => set.to_json()?,
                _ => generator_csv(&set),
            };
            Ok((text, Status::Pass))
        }
        Command::Certify { brute_force, format, .. } => {
            let r = run_certificate(s, *brute_force)?;
            let status = if r.all_hold() { Status::Pass } else { Status::VerdictFailure };
            Ok((emit_report(&r, *format)?, status))
        }
        Command::Slope { m_max, format, .. } => {
            let rows = asymptotic_slope(s, *m_max)?;
            let status = if rows.iter().all(|r| r.holds) { Status::Pass } else { Status::VerdictFailure };
            let text = match format {
                ReportFormat::Json => serde_json::to_string_pretty(&rows).expect("serializable"),
                ReportFormat::Csv => slope_csv(&rows),
                ReportFormat::Markdown => slope_markdown(&rows),
            };
            Ok((text, status))
        }
        Command::Plot { resolution, .. } => Ok((plot_profile(s, &s.difference(), *resolution)?, Status::Pass)),
    }
}

fn scenario_path(cmd: &Command) -> &Path {
    match cmd {
        Command::VerifyAssumption { scenario, .. }
        | Command::Enumerate { scenario, .. }
        | Command::Certify { scenario, .. }
        | Command::Slope { scenario, .. }
        | Command::Plot { scenario, .. } => scenario,
    }
}

fn output_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Certify { out, .. } => out.as_deref(),
        Command::Plot { out, .. } => Some(out),
        _ => None,
    }
}

fn workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.parse().with_context(|| format!("{WORKERS_ENV} must be a positive integer, got {v:?}")),
        Err(_) => Ok(0),
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let path = scenario_path(&cli.command);
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scenarios = match Scenario::batch_from_json(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Ok(Status::ScenarioError);
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers()?).build()?;
    let results: Vec<hofer_depth::Result<(String, Status)>> =
        pool.install(|| scenarios.par_iter().map(|s| run_one(&cli.command, s)).collect());

    let mut status = Status::Pass;
    let mut outputs = Vec::new();
    for (s, result) in scenarios.iter().zip(results) {
        match result {
            Ok((text, st)) => {
                status = status.max(st);
                outputs.push(text);
            }
            Err(e) => {
                let name = if s.name.is_empty() { path.display().to_string() } else { s.name.clone() };
                eprintln!("error: {name}: {e}");
                status = status.max(status_of(&e));
            }
        }
    }
    let is_json = matches!(
        cli.command,
        Command::VerifyAssumption { format: ReportFormat::Json, .. }
            | Command::Enumerate { format: ReportFormat::Json, .. }
            | Command::Certify { format: ReportFormat::Json, .. }
            | Command::Slope { format: ReportFormat::Json, .. }
    );
    let body = if scenarios.len() > 1 && is_json {
        format!("[\n{}\n]\n", outputs.join(",\n"))
    } else {
        let mut joined = outputs.join("\n");
        if !joined.ends_with('\n') {
            joined.push('\n');
        }
        joined
    };
    match output_path(&cli.command) {
        Some(out) => fs::write(out, body).with_context(|| format!("writing {}", out.display()))?,
        None => print!("{body}"),
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::ScenarioError as u8)
        }
    }
}
