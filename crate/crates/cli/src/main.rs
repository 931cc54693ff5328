use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rmflat_cli::{emit, run, Cli, ExperimentConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = ExperimentConfig::new(&cli.command);
    let result = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    match emit(&config, &result) {
        Ok(Some(text)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match &result.first_failure {
        None => ExitCode::SUCCESS,
        Some(msg) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
