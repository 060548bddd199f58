use std::process::ExitCode;

use clap::Parser;
use hodge_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = report.to_json();
    match &cli.common.json_out {
        Some(path) => {
            if let Err(source) = std::fs::write(path, format!("{json}\n")) {
                let e = CliError::Io { path: path.clone(), source };
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        }
        None => println!("{json}"),
    }
    for check in report.failed_checks() {
        eprintln!("FAIL {}: residual {:.3e} > tolerance {:.1e}", check.name, check.residual, check.tolerance);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
