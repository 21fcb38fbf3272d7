use std::process::ExitCode;

use clap::Parser;
use cp3o_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cp3o: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
