//! Parses a scenario file and runs every command on it in-process, exactly
//! as the `vickrey-check` binary would.
//!
//! Run with `cargo run --example scenario_file`.

use std::io;

use vickrey_check::cli::{parse_scenario, run_command, Command, RunOptions};

const SCENARIO: &str = "\
# Two bidders; bidder 0 values the good at 2 and bidder 1 at 1.
auction = second_price
participants = 2
tie_break = seeded_pseudorandom(42)
grid = 0, 1/2, 1, 3/2, 2
valuations = 2, 1
";

fn main() -> io::Result<()> {
    let scenario = match parse_scenario(SCENARIO) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let options = RunOptions {
        seed: None,
        workers: 2,
    };
    for command in Command::ALL {
        println!("$ vickrey-check {command} --scenario scenario.txt --workers 2");
        let status = run_command(
            command,
            &scenario,
            options,
            &mut io::stdout(),
            &mut io::stderr(),
        )?;
        println!("(exit {})\n", status.code());
    }

    // Parse errors carry the line and field at fault.
    let err = parse_scenario("auction = second_price\nparticipants = 1\n").unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
