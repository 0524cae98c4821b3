//! `hybridmech`: evaluate hybrid matching mechanisms, verify partial
//! strategyproofness, compute mixing-factor curves and reproduce reference
//! figures and examples.

mod args;
mod commands;
mod reproduce;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit codes. Runtime failures other than the ones below share code 1 with
/// a false verdict.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

/// Signals a completed run whose verdict did not match `--expect`.
#[derive(Debug)]
pub struct VerdictMismatch {
    pub expected: String,
    pub found: String,
}

impl std::fmt::Display for VerdictMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verdict is {}, expected {}", self.found, self.expected)
    }
}

impl std::error::Error for VerdictMismatch {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot size worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = match &cli.command {
        Command::Reproduce(r) => reproduce::run(&cli.global, r),
        other => commands::run(&cli.global, other),
    };
    match outcome {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerdictMismatch>().is_some() {
        return EXIT_FAILURE;
    }
    match e.downcast_ref::<hybrid_core::Error>() {
        Some(hybrid_core::Error::SettingTooLarge { .. }) => EXIT_BUDGET,
        Some(
            hybrid_core::Error::Parse { .. }
            | hybrid_core::Error::InvalidPreference(_)
            | hybrid_core::Error::ProfileLength { .. }
            | hybrid_core::Error::NonPositiveDimension { .. }
            | hybrid_core::Error::SupplyShortfall { .. }
            | hybrid_core::Error::BetaOutOfRange(_)
            | hybrid_core::Error::RZero
            | hybrid_core::Error::ROutOfRange(_)
            | hybrid_core::Error::InvalidValuation(_)
            | hybrid_core::Error::NotHybridAdmissible(_),
        ) => EXIT_USAGE,
        _ if e.downcast_ref::<args::UsageError>().is_some() => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}
