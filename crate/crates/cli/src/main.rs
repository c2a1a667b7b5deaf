//! `gpr` — subcommand CLI over the de-noising toolkit.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
//! failure. All file writes are atomic (write-then-rename), so a nonzero
//! exit never leaves partial outputs behind.

mod commands;
mod error;

use std::process::ExitCode;

use clap::Parser;

use commands::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };

    let result = match cli.command {
        Command::Ricker(args) => commands::ricker(args),
        Command::Forward(args) => commands::forward(args),
        Command::Addnoise(args) => commands::addnoise(args),
        Command::Decompose(args) => commands::decompose(args),
        Command::Denoise(args) => commands::denoise(args),
        Command::Snr(args) => commands::snr(args),
        Command::Compare(args) => commands::compare(args),
        Command::Render(args) => commands::render(args),
    };

    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
