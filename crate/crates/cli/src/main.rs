use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    fpa_cli::execute(fpa_cli::Cli::parse())
}
