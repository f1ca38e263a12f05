use std::process::ExitCode;

use clap::Parser;
use nlo_teleport::experiment::{emit, exit_code, run_sweep, write_output, Cli};

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let result = cli.into_config().and_then(|config| {
        for warning in config.warnings() {
            eprintln!("{warning}");
        }
        let result = run_sweep(&config)?;
        write_output(&emit(&result, config.format), config.out.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
