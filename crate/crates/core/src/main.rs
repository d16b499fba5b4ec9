use std::process::ExitCode;

use clap::Parser;
use noma::cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::from_cli(Cli::parse());
    match run(&config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("noma: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
