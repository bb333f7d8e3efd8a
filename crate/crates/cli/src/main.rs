use std::io::Write;
use std::process::ExitCode;

use arrac::args::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = arrac::run(cli, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("arrac: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
