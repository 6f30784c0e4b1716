mod args;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// An input file that does not exist; reported with exit code 2.
#[derive(Debug)]
pub struct MissingInput(pub PathBuf);

impl std::fmt::Display for MissingInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "input file not found: {}", self.0.display())
    }
}

impl std::error::Error for MissingInput {}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<MissingInput>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
