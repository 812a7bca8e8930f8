//! Shows how the three tie-break policies resolve a tied top bid.
//!
//! Run with `cargo run --example tie_breaking`.

use vickrey_check::{argmax_set, second_price_outcome, Profile, TieBreakPolicy};

fn main() -> vickrey_check::Result<()> {
    let bids = Profile::from_integers(&[3, 1, 3, 3])?;
    println!("bids: {bids}");
    println!("tied top bidders: {:?}", argmax_set(&bids));

    let policies = [
        TieBreakPolicy::LowestId,
        TieBreakPolicy::HighestId,
        TieBreakPolicy::SeededPseudorandom(42),
        TieBreakPolicy::SeededPseudorandom(7),
    ];
    for policy in policies {
        let outcome = second_price_outcome(&bids, &policy);
        // Whoever wins a tie pays the tied amount, so only the identity changes.
        println!(
            "{:<24} winner {} pays {}",
            policy.to_string(),
            outcome.winner().unwrap(),
            outcome.payments().entries().iter().max().unwrap()
        );
    }

    // Seeded choices are a pure function of (seed, profile).
    let again = second_price_outcome(&bids, &TieBreakPolicy::SeededPseudorandom(42));
    assert_eq!(
        again,
        second_price_outcome(&bids, &TieBreakPolicy::SeededPseudorandom(42))
    );
    Ok(())
}
