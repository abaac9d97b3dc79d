use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use resknap_cli::args::Cli;
use resknap_cli::error::{EXIT_PASS, EXIT_VIOLATION};
use resknap_cli::execute;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = out.write_all(outcome.stdout.as_bytes());
            let _ = out.flush();
            ExitCode::from(if outcome.passed { EXIT_PASS } else { EXIT_VIOLATION })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
