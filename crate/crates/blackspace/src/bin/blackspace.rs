use std::process::ExitCode;

use blackspace::cli::{exit_code, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let result = run(Cli::parse());
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}
