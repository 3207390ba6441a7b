//! Experiment harness for the inertial Levenberg-Marquardt solver: parameter
//! sweeps on the bundled problems and the verification suites.

pub mod args;
pub mod config;
pub mod error;
pub mod experiment;
pub mod nn_cmd;
pub mod output;
pub mod pde_cmd;
pub mod verify;

use std::ffi::OsString;

use clap::Parser;

pub use error::{CliError, CliResult};

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 on success, 1 on runtime failure, 2 on invalid flags or settings.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        args::Command::Pde(a) => pde_cmd::run(a),
        args::Command::Nn(a) => nn_cmd::run(a),
        args::Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 2 {
                eprintln!("\nFor more information, try '--help'.");
            }
            e.exit_code()
        }
    }
}
