use std::process::ExitCode;

use clap::Parser;
use dctraj_cli::args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DCTRAJ_LOG", "warn")).init();
    let cli = Cli::parse();
    match dctraj_cli::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(dctraj_cli::exit_code(&e))
        }
    }
}
