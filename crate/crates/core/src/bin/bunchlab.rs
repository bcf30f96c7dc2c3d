use std::process::ExitCode;

use bunchlab::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bunchlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
