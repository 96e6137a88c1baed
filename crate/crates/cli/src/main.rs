mod args;
mod commands;
mod error;
mod output;
mod spec;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    let result = commands::run(&cli.command).and_then(|o| Ok((o.document.render()?, o.code)));
    match result {
        Ok((text, code)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("tailtrace: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
