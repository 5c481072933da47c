//! `cibench`: command-line pipeline over the analytics core — ingestion,
//! correlation and regression suites, benchmark sizing, positioning, and
//! capacity projection, rendered as markdown, CSV, or JSON.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use clap::Parser;

/// Parses arguments from the process environment and executes. Returns the
/// process exit code: 0 success, 2 validation error, 3 statistical
/// degeneracy, 4 I/O error. Failures print a machine-readable error record
/// to stderr.
pub fn run() -> i32 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap reports usage problems with exit code 2, help/version 0.
            let _ = err.print();
            return err.exit_code();
        }
    };
    let precision = report::Precision::from_env();
    let command = cli.command.name();
    match commands::execute(cli.command, precision) {
        Ok(()) => 0,
        Err(err) => {
            let record = serde_json::json!({
                "error": {
                    "kind": err.kind(),
                    "command": command,
                    "message": err.to_string(),
                }
            });
            eprintln!("{record}");
            err.exit_code()
        }
    }
}
