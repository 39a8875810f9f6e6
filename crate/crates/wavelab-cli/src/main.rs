//! Entry point: parse, dispatch, and map failures to exit codes.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 failed numerical
//! assertion, 3 solver failure. Errors go to stderr as one JSON object.

use clap::error::ErrorKind;
use clap::Parser;
use wavelab_cli::cli::Cli;
use wavelab_cli::Failure;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            let failure = Failure::Usage(e.to_string());
            eprintln!("{}", failure.to_json());
            std::process::exit(failure.exit_code());
        }
    };
    if let Err(failure) = wavelab_cli::run(&cli) {
        eprintln!("{}", failure.to_json());
        std::process::exit(failure.exit_code());
    }
}
