use std::process::ExitCode;

use crystor_cli::commands::{EXIT_INPUT, EXIT_OK};
use crystor_cli::{run, Payload, Settings};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv, Settings::from_env()) {
        Ok(outcome) => {
            if outcome.json {
                print!("{}", outcome.report.to_json());
            } else if matches!(outcome.report.result, Payload::Error { .. }) {
                eprint!("{}", outcome.report.to_human());
            } else {
                print!("{}", outcome.report.to_human());
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK })
        }
    }
}
