//! Command-line front end for `thermovqa`.
//!
//! Every command is also callable as a function so that tests and scripts can
//! skip process startup. [`run`] parses arguments, executes one command and
//! returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage error |
//! | 3 | input error (unreadable, unwritable or malformed files) |
//! | 4 | capacity error |
//! | 5 | internal invariant failure |

pub mod args;
pub mod commands;
mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

pub use error::{CliError, CliResult};

use args::{Cli, Command};

/// Parses `argv`, runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("thermovqa: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command inside a pool of `--jobs` workers.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Prepare(a) => commands::prepare(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Tfd(a) => commands::tfd(a),
        Command::Shots(a) => commands::shots(a),
        Command::Resources(a) => commands::resources(a),
    })
}
