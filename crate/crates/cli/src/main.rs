use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ultraspec_cli::main_with(ultraspec_cli::Cli::parse())
}
