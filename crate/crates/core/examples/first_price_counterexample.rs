//! Finds the minimal counterexample showing that truthful bidding is not
//! dominant in a first-price auction, then replays it.
//!
//! Run with `cargo run --example first_price_counterexample`.

use std::sync::Arc;

use vickrey_check::{
    find_counterexample, payoff_at, BidGrid, DominanceScenario, FirstPrice, Profile,
    TieBreakPolicy, Verifier,
};

fn main() -> vickrey_check::Result<()> {
    let grid = BidGrid::from_integers(&[0, 1, 2])?;
    let policy = TieBreakPolicy::LowestId;

    // Sweep every truthful profile on the grid.
    let report = Verifier::new().check_truthful_equilibrium(&FirstPrice, &grid, 2, &policy);
    println!("{report}\n");

    // A single scenario: bidder 0 values the good at 2 and bids truthfully.
    let valuations = Profile::from_integers(&[2, 1])?;
    let scenario =
        DominanceScenario::truthful(Arc::new(FirstPrice), valuations.clone(), grid, policy);
    let cex = find_counterexample(&scenario)?.expect("first price rewards shading");
    println!("counterexample:\n{cex}\n");

    // Replaying through the payoff function gives the same strict inequality.
    let i = cex.participant;
    let focal = payoff_at(&FirstPrice, &valuations, &cex.focal_profile, &policy, i)?;
    let deviant = payoff_at(&FirstPrice, &valuations, &cex.profile, &policy, i)?;
    println!(
        "bidding {} earns {focal}; bidding {} earns {deviant}",
        cex.focal_profile, cex.profile
    );
    assert!(deviant > focal);
    Ok(())
}
