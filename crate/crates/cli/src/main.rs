use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sami_cli::{cmd_compare, cmd_run, cmd_validate, Format};
use sami_core::infra::Policy;

#[derive(Parser)]
#[command(name = "sami", version, about = "Run, compare and validate service placement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one policy and write metrics files.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// sami, cloud-only, mno-only or dealer-only.
        #[arg(long, default_value = "sami")]
        policy: Policy,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Simulate all four policies on one seed and write compare.csv.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check a scenario and its services against the registration standard.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Run {
            scenario,
            seed,
            policy,
            out,
            format,
        } => cmd_run(&scenario, seed, policy, &out, format),
        Command::Compare { scenario, seed, out } => cmd_compare(&scenario, seed, &out),
        Command::Validate { scenario } => cmd_validate(&scenario),
    };
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}
