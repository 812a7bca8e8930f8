use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vickrey_check::cli::{parse_scenario, run_command, Command, RunOptions};

/// Run auction outcomes and exhaustive property checks on a scenario file.
#[derive(Parser, Debug)]
#[command(name = "vickrey-check", version)]
struct Args {
    /// outcome | check-dominance | check-efficiency | check-well-defined | lemmas | find-cex
    command: Command,
    /// Path to a `key = value` scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Seed for the seeded_pseudorandom tie-break policy.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for exhaustive searches; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {}: {e}", args.scenario.display());
            return ExitCode::from(2);
        }
    };
    let scenario = match parse_scenario(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", args.scenario.display());
            return ExitCode::from(2);
        }
    };
    let options = RunOptions {
        seed: args.seed,
        workers: args.workers,
    };
    match run_command(
        args.command,
        &scenario,
        options,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    ) {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
