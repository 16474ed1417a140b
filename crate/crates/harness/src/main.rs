use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = temof_harness::cli::Cli::parse();
    match temof_harness::cli::dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
