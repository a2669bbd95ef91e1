use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use qhc_cli::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };

    let out = match qhc_cli::run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("qhc: {e}");
            return ExitCode::from(e.exit_code());
        }
    };

    let written = match &cli.output {
        Some(path) => fs::write(path, format!("{}\n", out.json)),
        None => writeln!(io::stdout().lock(), "{}", out.json),
    };
    if let Err(e) = written {
        eprintln!("qhc: i/o error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(out.code)
}
