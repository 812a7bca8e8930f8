//! Computes a second-price outcome and each bidder's payoff.
//!
//! Run with `cargo run --example second_price_outcome`.

use vickrey_check::{payoff_at, second_price_outcome, Profile, SecondPrice, TieBreakPolicy};

fn main() -> vickrey_check::Result<()> {
    let valuations = Profile::from_integers(&[5, 3, 4])?;
    let bids = Profile::parse(valuations.participants().clone(), "9/2, 3, 4")?;
    let policy = TieBreakPolicy::LowestId;

    let outcome = second_price_outcome(&bids, &policy);
    println!("bids: {bids}");
    println!("{outcome}");

    // The winner pays the highest competing bid, not its own.
    let winner = outcome
        .winner()
        .expect("second price awards exactly one winner");
    println!("winner: {winner}, pays {}", outcome.payments().get(winner)?);

    for &id in bids.participants().ids() {
        let u = payoff_at(&SecondPrice, &valuations, &bids, &policy, id)?;
        println!("payoff of {id}: {u}");
    }
    Ok(())
}
