use std::process::ExitCode;

use clap::Parser;
use nclp_cli::{apply_thread_cap, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    apply_thread_cap(std::env::var("NCLP_THREADS").ok().as_deref());
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
