//! Command-line front end for the `relloc` simulator.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod tof;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::{execute, summary, write_outputs};
use crate::error::CliError;
use crate::output::RunRecord;

/// What a successful invocation produced.
#[derive(Debug)]
pub struct Outcome {
    pub record: RunRecord,
    pub files: Vec<PathBuf>,
}

/// Parses `argv`, runs the command and writes its outputs.
pub fn run<I, S>(argv: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    if let Command::Replay(replay) = &cli.command {
        let recorded = RunRecord::read(&replay.record)?;
        let execution = execute(&recorded.config)?;
        if execution.results != recorded.results {
            return Err(CliError::ReplayMismatch(replay.record.display().to_string()));
        }
        let files = write_outputs(&recorded.config, &execution, &replay.out_dir)?;
        return Ok(Outcome {
            record: RunRecord::new(recorded.config, execution.results),
            files,
        });
    }
    let (config, out_dir) = cli
        .command
        .to_config(rand::random::<u64>)
        .expect("replay handled above");
    let execution = execute(&config)?;
    let files = write_outputs(&config, &execution, &out_dir)?;
    Ok(Outcome {
        record: RunRecord::new(config, execution.results),
        files,
    })
}

/// Runs the CLI and maps the result to a process exit status.
pub fn main_with<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    match run(argv) {
        Ok(outcome) => {
            if let Some(seed) = outcome.record.config.seed() {
                println!("seed {seed}");
            }
            println!("{}", summary(&outcome.record.results));
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(CliError::Usage(e)) => {
            let code = if e.use_stderr() { error::EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
