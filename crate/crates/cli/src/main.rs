use std::process::ExitCode;

use clap::Parser;
use uhrlab_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uhrlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
