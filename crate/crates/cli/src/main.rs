use std::process::ExitCode;

use clap::Parser;
use lr_horizon_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lr-horizon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
