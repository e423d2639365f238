use std::process::ExitCode;

use clap::Parser;
use qcl::config::Cli;
use qcl::exit;
use qcl::report::Status;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    if let Err(e) = qcl::init_threads() {
        eprintln!("qcl: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    match qcl::commands::run(&cli.command) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for c in &outcome.checks {
                println!("{} {}: expected {}, observed {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.expected, c.observed);
            }
            for a in &outcome.artifacts {
                println!("wrote {} ({})", a.file, &a.sha256[..16]);
            }
            match outcome.status() {
                Status::Ok => ExitCode::from(exit::OK as u8),
                Status::Mismatch => {
                    eprintln!("qcl {}: verdict mismatch", outcome.command);
                    ExitCode::from(exit::MISMATCH as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("qcl {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
