use std::process::ExitCode;

use topicforge_cli::{parse_args, run, CliError};

fn main() -> ExitCode {
    let result = parse_args(std::env::args_os()).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
