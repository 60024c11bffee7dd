use std::process::ExitCode;

use clap::Parser;
use nlhk_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            match outcome.failure {
                Some(reason) if !outcome.pass => {
                    eprintln!("error: {reason}");
                    ExitCode::FAILURE
                }
                _ if !outcome.pass => ExitCode::FAILURE,
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
