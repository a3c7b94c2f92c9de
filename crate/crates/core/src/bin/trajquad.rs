use clap::Parser;
use std::process::ExitCode;
use trajquad::cli::{execute, Args};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match args.resolve().and_then(|cfg| execute(&cfg)) {
        Ok(Some(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trajquad: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
