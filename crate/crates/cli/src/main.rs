use std::process::ExitCode;

use clap::Parser;

mod commands;

use commands::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("RIBBONLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("RIBBONLAB_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(CliError::Usage("RIBBONLAB_THREADS must be a positive integer".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}
