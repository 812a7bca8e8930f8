use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;
use vickrey_check::cli::{parse_scenario, run_command, Command as Cmd, ExitStatus, RunOptions};

fn scenario_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], scenario: &NamedTempFile) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vickrey-check"))
        .args(args)
        .arg("--scenario")
        .arg(scenario.path())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SECOND_TRUTHFUL: &str = "\
auction = second_price
participants = 2
tie_break = lowest_id
grid = 0, 1, 2
valuations = 2, 1
";

const FIRST_TRUTHFUL: &str = "\
auction = first_price
participants = 2
tie_break = lowest_id
grid = 0, 1, 2
valuations = 2, 1
";

#[test]
fn outcome_prints_allocation_and_payments() {
    let f = scenario_file(
        "auction = second_price\nparticipants = 3\ngrid = 0, 1, 2, 3\nbids = 3, 1, 2\n",
    );
    let out = run(&["outcome"], &f);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "allocation: 1,0,0\npayments: 2,0,0\n");
}

#[test]
fn dominance_exit_codes() {
    let out = run(&["check-dominance"], &scenario_file(SECOND_TRUTHFUL));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: holds"));

    let out = run(&["check-dominance"], &scenario_file(FIRST_TRUTHFUL));
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("verdict: violated"));
    assert!(text.contains("counterexample:\n  kind: dominance"));
    assert!(text.contains("  profile: 0,0\n"));
}

#[test]
fn dominance_without_valuations_sweeps_the_grid() {
    let f = scenario_file("auction = first_price\nparticipants = 2\ngrid = 0, 1, 2\n");
    let out = run(&["check-dominance"], &f);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("property: truthful_equilibrium"));
    assert!(stdout(&out).contains("profiles_examined: 32"));
}

#[test]
fn other_commands() {
    let sp = scenario_file(SECOND_TRUTHFUL);
    for cmd in ["check-efficiency", "check-well-defined", "lemmas"] {
        let out = run(&[cmd], &sp);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stdout(&out));
    }
    let out = run(&["find-cex"], &sp);
    assert_eq!(
        (out.status.code(), stdout(&out)),
        (Some(0), "counterexample: none\n".to_string())
    );

    let out = run(&["find-cex"], &scenario_file(FIRST_TRUTHFUL));
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("counterexample:\n  kind: dominance\n  case: 1a (win-win)"));
}

#[test]
fn input_errors_exit_2() {
    let out = run(&["check-dominance"], &scenario_file("participants = 1\n"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("line 1: participants: participants must be ≥ 2"),
        "{err}"
    );

    let out = run(&["lemmas"], &scenario_file(FIRST_TRUTHFUL));
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["bogus"], &scenario_file(SECOND_TRUTHFUL));
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_vickrey-check"))
        .args(["outcome", "--scenario", "/nonexistent/scenario.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let no_bids = scenario_file("auction = second_price\nparticipants = 2\ngrid = 0\n");
    assert_eq!(run(&["outcome"], &no_bids).status.code(), Some(2));
}

#[test]
fn seeded_policy_needs_an_explicit_seed() {
    let f = scenario_file("auction = second_price\nparticipants = 3\ntie_break = seeded_pseudorandom\ngrid = 0, 1\nbids = 1, 1, 1\n");
    assert_eq!(run(&["outcome"], &f).status.code(), Some(2));
    let a = run(&["outcome", "--seed", "42"], &f);
    let b = run(&["outcome", "--seed", "42"], &f);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_is_byte_identical_across_runs_and_workers() {
    let f = scenario_file("auction = first_price\nparticipants = 3\ntie_break = seeded_pseudorandom(5)\ngrid = 0, 1/2, 1\n");
    for cmd in [
        "check-dominance",
        "check-efficiency",
        "check-well-defined",
        "find-cex",
    ] {
        let a = run(&[cmd, "--workers", "1"], &f);
        let b = run(&[cmd, "--workers", "1"], &f);
        let c = run(&[cmd, "--workers", "4"], &f);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert_eq!(a.stdout, c.stdout, "{cmd}");
        assert_eq!(a.status.code(), c.status.code());
    }
}

#[test]
fn run_command_in_process() {
    let s = parse_scenario(SECOND_TRUTHFUL).unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let status = run_command(Cmd::Lemmas, &s, RunOptions::default(), &mut out, &mut err).unwrap();
    assert_eq!(status, ExitStatus::Success);
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("partition_violations: 0"));
    assert!(text.contains("first_failure: none"));
    assert!(err.is_empty());
}
