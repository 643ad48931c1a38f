use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use lefschetz_cli::commands::{run, Cli, Command};
use lefschetz_cli::table::render;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = render(&outcome.output, cli.format);
    let is_table = matches!(cli.command, Command::Table { .. });
    if cli.out.is_some() && !is_table && outcome.file.is_none() {
        eprintln!("error: --out needs an explicit word; this run has none (ledger mode or verify)");
        return ExitCode::from(2);
    }
    match (&cli.out, is_table) {
        (Some(path), true) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        (out, _) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            if let Some(path) = out {
                let file = outcome.file.as_ref().expect("checked above");
                if let Err(e) = std::fs::write(path, file.to_json()) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
        }
    }
    if !outcome.ok {
        for f in &outcome.failures {
            eprintln!("check failed: {f}");
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
