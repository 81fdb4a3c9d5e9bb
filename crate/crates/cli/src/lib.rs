//! Batch commands behind the `sami` binary: run a scenario under one policy,
//! compare all policies, and validate a scenario file.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 configuration
//! error (including an unreadable scenario), 3 a service has no admissible
//! node at setup.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use sami_core::arbitrator::schedule_service;
use sami_core::infra::{simulate, Policy, SimOutcome};
use sami_core::metrics::{rows_to_csv, MetricsReport};
use sami_core::registry::{handle_request, Registry, Request};
use sami_core::workload::{load_scenario, Scenario, ScenarioError};
use sami_core::ServiceId;

pub use sami_core::infra::UnknownPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("no admissible node at setup for: {}", .0.iter().map(ServiceId::as_str).collect::<Vec<_>>().join(", "))]
    NoAdmissibleNode(Vec<ServiceId>),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Config(_) => 2,
            CliError::NoAdmissibleNode(_) => 3,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Output {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_owned(),
        source,
    })
}

/// Services the full decision flow cannot place at time zero.
pub fn setup_failures(scenario: &Scenario) -> Vec<ServiceId> {
    scenario
        .services
        .iter()
        .filter(|d| schedule_service(d, &scenario.topology, scenario.weights_for(&d.id), 0.0).is_err())
        .map(|d| d.id.clone())
        .collect()
}

fn prepare(scenario_path: &Path) -> Result<Scenario, CliError> {
    let scenario = load_scenario(scenario_path)?;
    let failures = setup_failures(&scenario);
    if !failures.is_empty() {
        return Err(CliError::NoAdmissibleNode(failures));
    }
    Ok(scenario)
}

fn simulate_or_config_error(scenario: &Scenario, policy: Policy, seed: u64) -> Result<SimOutcome, CliError> {
    simulate(scenario, policy, seed).map_err(|e| CliError::Config(e.to_string()))
}

/// Runs one policy and writes `metrics.csv` and/or `metrics.json`.
pub fn run(
    scenario_path: &Path,
    seed: Option<u64>,
    policy: Policy,
    out_dir: &Path,
    format: Format,
) -> Result<Vec<PathBuf>, CliError> {
    let scenario = prepare(scenario_path)?;
    let seed = seed.unwrap_or(scenario.seed);
    let outcome = simulate_or_config_error(&scenario, policy, seed)?;
    let report = MetricsReport::from_outcome(&outcome);
    prepare_out_dir(out_dir)?;
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        written.push(write_file(out_dir.join("metrics.csv"), &report.to_csv())?);
    }
    if matches!(format, Format::Json | Format::Both) {
        written.push(write_file(out_dir.join("metrics.json"), &report.to_json())?);
    }
    Ok(written)
}

/// Runs every policy on the same seed in parallel and returns the reports
/// in [`Policy::ALL`] order.
pub fn compare_reports(scenario: &Scenario, seed: u64) -> Result<Vec<MetricsReport>, CliError> {
    let results: Vec<Result<SimOutcome, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = Policy::ALL
            .into_iter()
            .map(|p| s.spawn(move || simulate_or_config_error(scenario, p, seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });
    results
        .into_iter()
        .map(|r| r.map(|o| MetricsReport::from_outcome(&o)))
        .collect()
}

/// Runs all policies and writes `compare.csv`.
pub fn compare(scenario_path: &Path, seed: Option<u64>, out_dir: &Path) -> Result<PathBuf, CliError> {
    let scenario = prepare(scenario_path)?;
    let seed = seed.unwrap_or(scenario.seed);
    let reports = compare_reports(&scenario, seed)?;
    prepare_out_dir(out_dir)?;
    write_file(out_dir.join("compare.csv"), &rows_to_csv(&reports))
}

/// Every problem found in a scenario file: load errors, or one line per
/// standard violation of each service.
pub fn validate(scenario_path: &Path) -> Result<Vec<String>, CliError> {
    let scenario = match load_scenario(scenario_path) {
        Ok(s) => s,
        Err(ScenarioError::Validation(errors)) => {
            return Ok(errors.iter().map(ToString::to_string).collect());
        }
        Err(e) => return Err(e.into()),
    };
    let mut registry = Registry::new(scenario.vocabulary.clone()).with_weights(scenario.weights);
    let mut problems = Vec::new();
    for (i, desc) in scenario.services.iter().enumerate() {
        let id = desc.id.clone();
        let response = handle_request(
            &mut registry,
            &scenario.topology,
            Request::Register {
                descriptor: desc.clone(),
                at_ms: 0.0,
            },
        );
        let Some(err) = response.error else { continue };
        match err.kind.as_str() {
            "NoAdmissibleNode" => {}
            "StandardViolation" => problems.extend(
                err.violations
                    .iter()
                    .map(|v| format!("services[{i}] ({id}).{}: {}", v.field, v.message)),
            ),
            _ => problems.push(format!("services[{i}] ({id}): {}", err.message)),
        }
    }
    Ok(problems)
}

fn report_error(e: &CliError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

pub fn cmd_run(scenario_path: &Path, seed: Option<u64>, policy: Policy, out_dir: &Path, format: Format) -> i32 {
    match run(scenario_path, seed, policy, out_dir, format) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => report_error(&e),
    }
}

pub fn cmd_compare(scenario_path: &Path, seed: Option<u64>, out_dir: &Path) -> i32 {
    match compare(scenario_path, seed, out_dir) {
        Ok(path) => {
            eprintln!("wrote {}", path.display());
            0
        }
        Err(e) => report_error(&e),
    }
}

pub fn cmd_validate(scenario_path: &Path) -> i32 {
    match validate(scenario_path) {
        Ok(problems) if problems.is_empty() => {
            println!("{}: ok", scenario_path.display());
            0
        }
        Ok(problems) => {
            let mut out = std::io::stdout().lock();
            for p in &problems {
                let _ = writeln!(out, "{p}");
            }
            eprintln!("{} problem(s) found", problems.len());
            2
        }
        Err(e) => report_error(&e),
    }
}
