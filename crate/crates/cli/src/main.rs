use std::process::ExitCode;

use clap::Parser;
use splinegen_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("splinegen: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
