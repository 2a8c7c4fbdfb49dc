use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    qtps_cli::run(qtps_cli::Cli::parse())
}
