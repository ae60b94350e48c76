use std::process::ExitCode;

use cdsite_cli::commands::{execute, Cli};
use cdsite_cli::report::INPUT_ERROR;
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::from(report.verdict.exit_code())
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
