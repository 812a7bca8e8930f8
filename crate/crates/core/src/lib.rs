//! Sealed-bid single-good auctions with exhaustive, exact-arithmetic
//! verification of truthful bidding, efficiency and well-definedness.
//!
//! - [`vectors`]: participant sets, rationals, profiles and the max / argmax
//!   operators.
//! - [`auction`]: outcomes, payoffs, tie-break policies and the second-price
//!   and first-price rules.
//! - [`verifier`]: grid-bounded checks with minimal counterexamples.
//! - [`lemmas`]: the win/lose case analysis as a checkable lemma suite.
//! - [`cli`]: scenario files and the command runner behind the binary.

pub mod auction;
pub mod cli;
pub mod error;
pub mod lemmas;
mod search;
pub mod vectors;
pub mod verifier;

pub use auction::{
    first_price_outcome, is_efficient, is_first_price_outcome, is_second_price_outcome, payoff,
    payoff_at, rule_by_name, second_price_outcome, Allocation, AuctionRule, CustomRule, FirstPrice,
    Outcome, Payments, SecondPrice, TieBreakPolicy,
};
pub use error::{DomainError, Result};
pub use lemmas::{run_lemma_suite, run_lemma_suite_with, Claim, ProofCase, SuiteReport};
pub use search::{Odometer, MAX_PROFILES};
pub use vectors::{
    argmax_set, deviation, maximum, maximum_except, ParticipantSet, Profile, Rational,
};
pub use verifier::{
    check_efficiency_truthful, check_truthful_equilibrium, check_weak_dominance,
    check_well_defined, conforming_outcomes, find_counterexample, BidGrid, Counterexample,
    DominanceScenario, PayoffPair, PropertyReport, Verdict, Verifier, WitnessKind,
};
