//! Command-line entry point for running and checking session files.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use foliation_cli::parser::parse_session;
use foliation_cli::report::{to_json, to_text};
use foliation_cli::runner::run_session;
use foliation_cli::GOLDEN_SESSIONS;

#[derive(Parser)]
#[command(
    name = "foliation",
    about = "Run blowup sessions for singular distributions on affine charts",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a session file and print its step reports.
    Run {
        /// Path to the session script.
        file: PathBuf,
        /// Also write the report list as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print the text report even when --json is given.
        #[arg(long)]
        text: bool,
    },
    /// Parse and validate a session file without executing it.
    Check {
        /// Path to the session script.
        file: PathBuf,
    },
    /// Re-run the bundled sessions and compare their JSON reports
    /// byte-for-byte against the committed copies.
    Golden,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, json, text } => {
            let source = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let script = match parse_session(&source) {
                Ok(script) => script,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return Ok(ExitCode::from(2));
                }
            };
            let outcome = run_session(&script);
            if let Some(path) = &json {
                std::fs::write(path, to_json(&outcome.reports))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if json.is_none() || text {
                print!("{}", to_text(&outcome.reports));
            }
            if let Some(e) = &outcome.error {
                eprintln!("session stopped: {e}");
            }
            let ok = outcome.error.is_none() && outcome.asserts_passed;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Check { file } => {
            let source = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            match parse_session(&source) {
                Ok(script) => {
                    println!("ok: {} statement(s)", script.statements.len());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Golden => {
            let mut all_match = true;
            for (name, session, committed) in GOLDEN_SESSIONS {
                let script = match parse_session(session) {
                    Ok(script) => script,
                    Err(e) => {
                        println!("golden {name}: PARSE ERROR {e}");
                        all_match = false;
                        continue;
                    }
                };
                let outcome = run_session(&script);
                let rendered = to_json(&outcome.reports);
                if outcome.error.is_some() {
                    println!("golden {name}: SESSION ERROR");
                    all_match = false;
                } else if !outcome.asserts_passed {
                    println!("golden {name}: ASSERT FAILED");
                    all_match = false;
                } else if rendered == *committed {
                    println!("golden {name}: match ({} steps)", outcome.reports.len());
                } else {
                    println!("golden {name}: MISMATCH");
                    all_match = false;
                }
            }
            Ok(if all_match {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
