use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypdyn_cli::scenario::{execute, Scenario};
use hypdyn_cli::{configure_threads, registry, RunFailure};

#[derive(Parser)]
#[command(
    name = "hypdyn",
    about = "Numerical laboratory for non-expanding maps of Gromov hyperbolic spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its JSON report (and CSV traces).
    Run {
        /// Path to the scenario JSON file.
        scenario: PathBuf,
        /// Output directory for report.json and traces.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the full report to stdout.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Run the examples registry and print an expected-vs-computed table.
    Reproduce {
        /// Only run entries whose id or tags contain this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Output directory for the summary JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the registry entries.
    ListExamples,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), RunFailure> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            seed,
            verbose,
        } => {
            let text = fs::read_to_string(&scenario)
                .map_err(|e| RunFailure::Config(format!("{}: {e}", scenario.display())))?;
            let mut scenario = Scenario::from_json(&text)?;
            if let Some(s) = seed {
                scenario.seed = Some(s);
            }
            let report = execute(&scenario, out.as_deref())?;
            if verbose {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report)
                        .map_err(|e| RunFailure::Config(e.to_string()))?
                );
            } else {
                println!(
                    "task completed, verification {}",
                    if report.verification_pass { "PASS" } else { "FAIL" }
                );
            }
            if report.verification_pass {
                Ok(())
            } else {
                Err(RunFailure::Verification(
                    "scenario verification failed (see report)".into(),
                ))
            }
        }
        Command::Reproduce { filter, out } => {
            let outcomes = registry::reproduce_all(filter.as_deref())?;
            if outcomes.is_empty() {
                return Err(RunFailure::Config(format!(
                    "no registry entry matches filter {filter:?}"
                )));
            }
            let mut all_pass = true;
            println!(
                "{:<28} {:<58} {:>14} {:>14} {:>9}  verdict",
                "id", "quantity", "expected", "computed", "tol"
            );
            for o in &outcomes {
                for row in &o.rows {
                    println!(
                        "{:<28} {:<58} {:>14.8} {:>14.8} {:>9.1e}  {}",
                        o.id,
                        truncate(&row.quantity, 58),
                        row.expected,
                        row.computed,
                        row.tol,
                        if row.pass { "pass" } else { "FAIL" }
                    );
                }
                all_pass &= o.pass;
            }
            let summary = serde_json::to_string_pretty(&outcomes)
                .map_err(|e| RunFailure::Config(e.to_string()))?;
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|e| RunFailure::Config(e.to_string()))?;
                fs::write(dir.join("reproduce.json"), &summary)
                    .map_err(|e| RunFailure::Config(e.to_string()))?;
            }
            println!(
                "\n{} entries, {}",
                outcomes.len(),
                if all_pass { "all pass" } else { "FAILURES present" }
            );
            if all_pass {
                Ok(())
            } else {
                Err(RunFailure::Verification("registry mismatches".into()))
            }
        }
        Command::ListExamples => {
            for e in registry::list() {
                println!("{:<26} [{}]  {}", e.id, e.tags, e.summary);
            }
            Ok(())
        }
    }
}

fn truncate(s: &str, n: usize) -> String {
    if s.chars().count() <= n {
        s.to_string()
    } else {
        let cut: String = s.chars().take(n - 1).collect();
        format!("{cut}…")
    }
}
