mod commands;
mod config;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{Failure, EXIT_USAGE};
use config::{Cli, Command, Config};

fn run(cli: Cli) -> Result<i32, Failure> {
    let resolve = |common| {
        Config::resolve(common, std::env::var("IMO_SEED").ok()).map_err(|message| Failure {
            code: EXIT_USAGE,
            message,
        })
    };
    match cli.command {
        Command::Solve(c) => commands::solve_cmd(&resolve(c)?),
        Command::Bench(c) => commands::bench_cmd(&resolve(c)?),
        Command::Profile(c) => commands::profile_cmd(&resolve(c)?),
        Command::Verify(c) => commands::verify_cmd(&resolve(c)?),
        Command::Portfolio(c) => commands::portfolio_cmd(&resolve(c)?),
        Command::List => commands::list_cmd(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
