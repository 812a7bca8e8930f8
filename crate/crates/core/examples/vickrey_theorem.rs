//! Checks exhaustively, on a bounded grid, that truthful bidding is weakly
//! dominant in the second-price auction and that the outcome is efficient.
//!
//! Run with `cargo run --release --example vickrey_theorem`.

use vickrey_check::{BidGrid, SecondPrice, TieBreakPolicy, Verifier};

fn main() -> vickrey_check::Result<()> {
    let grid = BidGrid::parse("0, 1/2, 1, 3/2, 2")?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let verifier = Verifier::with_workers(workers);
    let policies = [
        TieBreakPolicy::LowestId,
        TieBreakPolicy::HighestId,
        TieBreakPolicy::SeededPseudorandom(42),
    ];

    for n in 2..=3 {
        for policy in &policies {
            let dominance = verifier.check_truthful_equilibrium(&SecondPrice, &grid, n, policy);
            let efficiency = verifier.check_efficiency_truthful(&SecondPrice, &grid, n, policy);
            println!(
                "n={n} {:<24} dominance: {} ({} comparisons, {:.2?})  efficiency: {}",
                policy.to_string(),
                dominance.verdict,
                dominance.profiles_examined,
                dominance.elapsed,
                efficiency.verdict
            );
        }
    }

    // The full report for one configuration.
    println!();
    println!(
        "{}",
        verifier.check_truthful_equilibrium(&SecondPrice, &grid, 2, &policies[0])
    );
    Ok(())
}
