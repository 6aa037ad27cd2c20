mod args;
mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use config::Resolved;
use error::CliError;
use output::{to_json_bytes, Table};

fn emit(cfg: &Resolved, bytes: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(bytes)?;
            o.flush()?;
        }
    }
    Ok(())
}

fn emit_table(cfg: &Resolved, t: &Table) -> Result<(), CliError> {
    let bytes = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => t.csv(),
        Format::Json => to_json_bytes(&t.json()).map_err(std::io::Error::from)?,
    };
    emit(cfg, &bytes)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config::resolve(&cli.global)?;
    match cli.command {
        Command::Cutoffs { m_max } => emit_table(&cfg, &commands::cutoffs(&cfg, m_max)?),
        Command::Mode => {
            if cfg.format == Some(Format::Csv) {
                return Err(CliError::Usage("mode writes JSON only".into()));
            }
            let v = commands::mode(&cfg)?;
            emit(&cfg, &to_json_bytes(&v).map_err(std::io::Error::from)?)
        }
        Command::Fields { nr, ntheta, z, t, em } => {
            emit_table(&cfg, &commands::fields(&cfg, nr, ntheta, z, t, em)?)
        }
        Command::Currents { ns, z, t, em } => emit_table(&cfg, &commands::currents(&cfg, ns, z, t, em)?),
        Command::Fig3 { ratios, ms, nr } => emit_table(&cfg, &commands::fig3(&cfg, &ratios, &ms, nr)?),
        Command::Verify { timing } => {
            let (report, text) = commands::verify(&cfg, &cli.global, timing)?;
            let json = to_json_bytes(&serde_json::to_value(&report).map_err(std::io::Error::from)?)
                .map_err(std::io::Error::from)?;
            match (&cfg.out, cfg.format) {
                (Some(p), _) => {
                    std::fs::write(p, &json)?;
                    print!("{text}");
                }
                (None, Some(Format::Json)) => emit(&cfg, &json)?,
                (None, _) => print!("{text}"),
            }
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::Verification { failed: report.failed, total: report.total })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
