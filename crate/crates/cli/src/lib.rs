//! Library side of the `dctraj` command-line tool.
//!
//! Exit codes: 0 success, 1 internal failure, 2 invalid input, 3 iteration
//! cap reached (outputs still written), 4 infeasible scenario.

pub mod args;
pub mod commands;
pub mod compare;
pub mod output;

use dctraj_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_MAX_ITERATIONS: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) | Error::InfeasibleAltitude { .. } | Error::EmptyWindow { .. } => EXIT_INFEASIBLE,
        Error::Domain(_) | Error::InvalidScenario(_) | Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => {
            EXIT_INVALID
        }
        Error::SizeGuard(_) | Error::Unscheduled(_) | Error::OracleMismatch(_) => EXIT_FAILURE,
    }
}

pub fn run(cli: args::Cli) -> dctraj_core::Result<u8> {
    use args::Command::*;
    match cli.command {
        Generate(a) => commands::generate(&a),
        Solve(a) => commands::solve(&a),
        Baseline(a) => commands::baseline(&a),
        Compare(a) => commands::compare(&a),
    }
}
