use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    nsmx_cli::run(nsmx_cli::Cli::parse())
}
