use std::process::ExitCode;

use clap::Parser;
use dtwhar::cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with code 2 on its own for malformed command lines
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
