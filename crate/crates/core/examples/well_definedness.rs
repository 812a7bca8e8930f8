//! Checks that the second-price rule yields a well-defined outcome for
//! every bid profile, and lists the conforming outcomes of a tied profile.
//!
//! Run with `cargo run --example well_definedness`.

use vickrey_check::{
    conforming_outcomes, is_second_price_outcome, BidGrid, CustomRule, Outcome, Profile, Rational,
    SecondPrice, TieBreakPolicy, Verifier,
};

fn main() -> vickrey_check::Result<()> {
    let grid = BidGrid::from_integers(&[0, 1, 2])?;
    let policies = [
        TieBreakPolicy::LowestId,
        TieBreakPolicy::HighestId,
        TieBreakPolicy::SeededPseudorandom(42),
    ];
    let verifier = Verifier::new();
    println!(
        "{}\n",
        verifier.check_well_defined(&SecondPrice, &grid, 3, &policies)
    );

    // With a three-way tie exactly three outcomes satisfy the second-price conditions.
    let tied = Profile::from_integers(&[2, 2, 2])?;
    for outcome in conforming_outcomes(&SecondPrice, &tied)? {
        println!("{outcome}\n");
    }

    // A rule that ignores bids and always awards participant 0 for free,
    // judged by the second-price conditions, fails on the first profile where
    // 0 is not a top bidder.
    let broken = CustomRule::new(
        "always_zero",
        |bids: &Profile, _: &TieBreakPolicy| {
            Outcome::award(bids.participants().clone(), 0, Rational::zero())
                .expect("participant 0 exists")
        },
        is_second_price_outcome,
    );
    let report = verifier.check_well_defined(&broken, &grid, 2, &policies);
    println!("{report}");
    Ok(())
}
