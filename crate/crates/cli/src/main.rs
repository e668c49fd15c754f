use std::process::ExitCode;

use clap::Parser;
use cstarlab_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(cli).and_then(|outcome| {
        print!("{}", outcome.report.render());
        outcome.finish()
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
