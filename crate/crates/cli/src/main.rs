//! Entry point for the `kpos` binary.

#![forbid(unsafe_code)]

use std::io::Write;

use clap::Parser;

fn main() {
    let cli = kpos_cli::Cli::parse();
    match kpos_cli::execute(cli) {
        Ok(outcome) => {
            if !outcome.report.is_empty() {
                // A closed pipe (e.g. piping into `head`) is not an error;
                // exit with the verdict code we already computed.
                let mut stdout = std::io::stdout();
                if let Err(e) = writeln!(stdout, "{}", outcome.report) {
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        eprintln!("kpos: cannot write report: {e}");
                        std::process::exit(2);
                    }
                }
            }
            std::process::exit(outcome.code);
        }
        Err(e) => {
            eprintln!("{}", kpos_cli::render_error(&e));
            std::process::exit(e.code);
        }
    }
}
