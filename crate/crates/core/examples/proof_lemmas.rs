//! Runs the win/lose case-analysis lemmas behind the dominance argument and
//! classifies a few deviations by case.
//!
//! Run with `cargo run --example proof_lemmas`.

use vickrey_check::lemmas::classify;
use vickrey_check::{run_lemma_suite, BidGrid, Profile, TieBreakPolicy};

fn main() -> vickrey_check::Result<()> {
    let policy = TieBreakPolicy::LowestId;
    let v = Profile::from_integers(&[2, 1])?;
    for deviation in [[2, 0], [0, 1], [1, 2], [0, 2]] {
        let deviant = Profile::from_integers(&deviation)?;
        let case = classify(&v, &deviant, 0, &policy)?;
        println!(
            "v={v} deviation={deviant} participant 0: case {}",
            case.case
        );
    }
    println!();

    let grid = BidGrid::from_integers(&[0, 1, 2])?;
    let suite = run_lemma_suite(&grid, 3, &policy)?;
    println!("{suite}");
    assert!(suite.passed() && suite.vacuous().is_empty());
    Ok(())
}
