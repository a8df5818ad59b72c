use std::process::ExitCode;

use clap::Parser;
use nppqo_cli::{execute, Cli, Failure};

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(match f {
                Failure::Config(_) => 2,
                Failure::Runtime(_) => 1,
            })
        }
    }
}
