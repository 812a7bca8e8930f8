//! Bounded exhaustive checks over finite bid grids.
//!
//! Every property is checked by enumerating `gridⁿ` in lexicographic order
//! (participant 0 is the most significant position). The first violation in
//! that order is reported, which makes every counterexample the minimal one
//! and keeps reports identical for any worker count. A verdict of
//! [`Verdict::Holds`] only ever means "holds on this grid".

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::auction::{
    is_efficient, payoff, welfare, Allocation, AuctionRule, Outcome, Payments, TieBreakPolicy,
};
use crate::error::{DomainError, Result};
use crate::lemmas::ProofCase;
use crate::search::{find_first, with_workers, Odometer, ProfileSpace};
use crate::vectors::{parse_rational_list, write_list, ParticipantSet, Profile, Rational};

/// Finite, strictly ascending set of nonnegative bid values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BidGrid {
    values: Vec<Rational>,
}

impl BidGrid {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(DomainError::InvalidGrid("grid is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(DomainError::InvalidGrid(format!("negative value {v}")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DomainError::InvalidGrid(
                "grid values must be distinct ascending".into(),
            ));
        }
        Ok(BidGrid { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Rational::from_integer(v)).collect())
    }

    /// Comma-separated rationals, e.g. `"0, 1/2, 1"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rational_list(text)?)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, value: &Rational) -> Option<usize> {
        self.values.binary_search(value).ok()
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.index_of(value).is_some()
    }

    /// Every value multiplied by a positive `factor`.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if factor.is_negative() || factor.is_zero() {
            return Err(DomainError::InvalidGrid(format!(
                "scale factor {factor} is not positive"
            )));
        }
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

impl fmt::Display for BidGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, self.values.iter())
    }
}

impl fmt::Debug for BidGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BidGrid({self})")
    }
}

/// Everything needed to ask "is `bids` weakly dominant for these valuations?".
#[derive(Clone)]
pub struct DominanceScenario {
    pub rule: Arc<dyn AuctionRule>,
    pub valuations: Profile,
    /// The focal strategy profile `b`.
    pub bids: Profile,
    pub grid: BidGrid,
    pub policy: TieBreakPolicy,
}

impl DominanceScenario {
    pub fn new(
        rule: Arc<dyn AuctionRule>,
        valuations: Profile,
        bids: Profile,
        grid: BidGrid,
        policy: TieBreakPolicy,
    ) -> Self {
        DominanceScenario {
            rule,
            valuations,
            bids,
            grid,
            policy,
        }
    }

    /// Scenario with `b = v`.
    pub fn truthful(
        rule: Arc<dyn AuctionRule>,
        valuations: Profile,
        grid: BidGrid,
        policy: TieBreakPolicy,
    ) -> Self {
        let bids = valuations.clone();
        Self::new(rule, valuations, bids, grid, policy)
    }
}

impl fmt::Debug for DominanceScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DominanceScenario")
            .field("rule", &self.rule.name())
            .field("valuations", &self.valuations)
            .field("bids", &self.bids)
            .field("grid", &self.grid)
            .field("policy", &self.policy)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    DomainError(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Violated => f.write_str("violated"),
            Verdict::DomainError(msg) => write!(f, "domain-error: {msg}"),
        }
    }
}

/// Which property a counterexample breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessKind {
    /// Deviating strictly improves the participant's payoff; tagged with
    /// the win/lose case of the focal and deviant profiles.
    Dominance(ProofCase),
    /// The winner (if any) lacks a highest valuation.
    Efficiency {
        welfare: Rational,
        optimum: Rational,
    },
    /// The rule's outcome fails its own conformance predicate.
    Nonconforming { policy: TieBreakPolicy },
    /// The winner is not among the top bidders.
    WinnerOutsideArgmax { policy: TieBreakPolicy },
    /// Two policies picked the same winner but produced different outcomes.
    PolicyDivergence {
        first: TieBreakPolicy,
        second: TieBreakPolicy,
    },
    /// Evaluating the rule twice gave different outcomes.
    Nondeterministic { policy: TieBreakPolicy },
    /// The number of conforming candidate outcomes differs from `|M|`.
    ConformingCount { found: usize, expected: usize },
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessKind::Dominance(case) => write!(f, "dominance\n  case: {case}"),
            WitnessKind::Efficiency { welfare, optimum } => {
                write!(f, "efficiency\n  welfare: {welfare}\n  optimum: {optimum}")
            }
            WitnessKind::Nonconforming { policy } => write!(f, "nonconforming\n  policy: {policy}"),
            WitnessKind::WinnerOutsideArgmax { policy } => {
                write!(f, "winner_outside_argmax\n  policy: {policy}")
            }
            WitnessKind::PolicyDivergence { first, second } => {
                write!(f, "policy_divergence\n  policies: {first},{second}")
            }
            WitnessKind::Nondeterministic { policy } => {
                write!(f, "nondeterministic\n  policy: {policy}")
            }
            WitnessKind::ConformingCount { found, expected } => {
                write!(
                    f,
                    "conforming_count\n  found: {found}\n  expected: {expected}"
                )
            }
        }
    }
}

/// Payoffs of the focal and deviant profiles for the counterexample's participant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayoffPair {
    /// `u_i` at `b̂` with `i`'s entry restored to the focal bid.
    pub focal: Rational,
    /// `u_i` at `b̂`.
    pub deviant: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub participant: usize,
    pub valuations: Profile,
    /// For dominance witnesses `b̂[i←b_i]`; otherwise the profile evaluated.
    pub focal_profile: Profile,
    /// For dominance witnesses the deviation `b̂`; otherwise the profile evaluated.
    pub profile: Profile,
    /// Present for dominance witnesses, where `deviant > focal` strictly.
    pub payoffs: Option<PayoffPair>,
    pub kind: WitnessKind,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  kind: {}", self.kind)?;
        writeln!(f, "  participant: {}", self.participant)?;
        writeln!(f, "  valuations: {}", self.valuations)?;
        writeln!(f, "  focal_profile: {}", self.focal_profile)?;
        write!(f, "  profile: {}", self.profile)?;
        if let Some(p) = &self.payoffs {
            write!(
                f,
                "\n  payoff_focal: {}\n  payoff_deviant: {}",
                p.focal, p.deviant
            )?;
        }
        Ok(())
    }
}

/// Verdict of one exhaustive check plus the bounds it was checked under.
///
/// The text form omits `elapsed`, so it is identical across runs.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub property: &'static str,
    pub rule: String,
    pub grid: BidGrid,
    pub n: usize,
    pub policy: String,
    /// Valuations and focal bids for single-scenario checks.
    pub scenario: Option<(Profile, Profile)>,
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub profiles_examined: u64,
    pub elapsed: Duration,
}

impl PropertyReport {
    fn start(property: &'static str, rule: &str, grid: &BidGrid, n: usize, policy: String) -> Self {
        PropertyReport {
            property,
            rule: rule.to_string(),
            grid: grid.clone(),
            n,
            policy,
            scenario: None,
            verdict: Verdict::Holds,
            counterexample: None,
            profiles_examined: 0,
            elapsed: Duration::ZERO,
        }
    }

    fn finish(mut self, result: Result<(Option<Counterexample>, u64)>, started: Instant) -> Self {
        match result {
            Ok((cex, examined)) => {
                self.verdict = if cex.is_some() {
                    Verdict::Violated
                } else {
                    Verdict::Holds
                };
                self.counterexample = cex;
                self.profiles_examined = examined;
            }
            Err(e) => self.verdict = Verdict::DomainError(e.to_string()),
        }
        self.elapsed = started.elapsed();
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }

    pub fn is_domain_error(&self) -> bool {
        matches!(self.verdict, Verdict::DomainError(_))
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property: {}", self.property)?;
        writeln!(f, "rule: {}", self.rule)?;
        writeln!(f, "verdict: {}", self.verdict)?;
        writeln!(f, "grid: {}", self.grid)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "policy: {}", self.policy)?;
        if let Some((v, b)) = &self.scenario {
            writeln!(f, "valuations: {v}")?;
            writeln!(f, "bids: {b}")?;
        }
        writeln!(f, "profiles_examined: {}", self.profiles_examined)?;
        match &self.counterexample {
            None => write!(f, "counterexample: none"),
            Some(cex) => write!(f, "counterexample:\n{cex}"),
        }
    }
}

/// Runs the exhaustive checks on a fixed number of worker threads.
///
/// Reports do not depend on the worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verifier {
    workers: usize,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier { workers: 1 }
    }
}

/// Where the focal bid and valuation of each search block come from.
enum Blocks<'a> {
    /// One fixed `(v, b)`; digits and valuations by position.
    Single {
        focal: &'a [usize],
        valuations: &'a [Rational],
    },
    /// Every `v` in the space, with `b = v`.
    Truthful,
}

impl Verifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_workers(workers: usize) -> Self {
        Verifier {
            workers: workers.max(1),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn outcome_table(
        &self,
        rule: &dyn AuctionRule,
        profiles: &[Profile],
        policy: &TieBreakPolicy,
    ) -> Vec<Outcome> {
        profiles
            .par_iter()
            .map(|b| rule.outcome(b, policy))
            .collect()
    }

    /// Shared dominance search. Returns the first violation and the number
    /// of `(i, b̂)` comparisons up to and including it (or in total).
    fn dominance_search(
        &self,
        rule: &dyn AuctionRule,
        space: &ProfileSpace,
        policy: &TieBreakPolicy,
        blocks: Blocks<'_>,
        valuation_of_block: impl Fn(usize) -> Profile + Sync,
    ) -> Result<(Option<Counterexample>, u64)> {
        let profiles = space.profiles();
        let table = self.outcome_table(rule, &profiles, policy);
        for outcome in &table {
            if outcome.participants() != profiles[0].participants() {
                return Err(DomainError::ParticipantMismatch);
            }
        }
        let n = space.n();
        let size = space.size();
        let block_len = n * size;
        let block_count = match blocks {
            Blocks::Single { .. } => 1,
            Blocks::Truthful => size,
        };
        let compared_per_participant = size - size / space.base();
        let ids = profiles[0].participants().ids().to_vec();

        let focal_of = |block: usize, pos: usize| -> (usize, Rational) {
            match &blocks {
                Blocks::Single { focal, valuations } => (focal[pos], valuations[pos].clone()),
                Blocks::Truthful => {
                    let d = space.digit(block, pos);
                    (d, profiles[block].entries()[pos].clone())
                }
            }
        };

        let hit = find_first(block_count * block_len, |t| {
            let block = t / block_len;
            let pos = (t / size) % n;
            let k = t % size;
            let (focal_digit, value) = focal_of(block, pos);
            if space.digit(k, pos) == focal_digit {
                return None;
            }
            let focal_rank = space.with_digit(k, pos, focal_digit);
            let at = |rank: usize| {
                let o = &table[rank];
                payoff(
                    &value,
                    o.allocation().flags()[pos],
                    &o.payments().entries()[pos],
                )
            };
            let u_focal = at(focal_rank);
            let u_deviant = at(k);
            (u_deviant > u_focal).then_some((focal_rank, u_focal, u_deviant))
        });

        Ok(match hit {
            None => (None, (block_count * n * compared_per_participant) as u64),
            Some((t, (focal_rank, focal, deviant))) => {
                let block = t / block_len;
                let pos = (t / size) % n;
                let k = t % size;
                let (focal_digit, _) = focal_of(block, pos);
                let examined = block * n * compared_per_participant
                    + pos * compared_per_participant
                    + space.count_differing_upto(k, pos, focal_digit);
                let id = ids[pos];
                let case = ProofCase::from_wins(
                    table[focal_rank].winner() == Some(id),
                    table[k].winner() == Some(id),
                );
                let cex = Counterexample {
                    participant: id,
                    valuations: valuation_of_block(block),
                    focal_profile: profiles[focal_rank].clone(),
                    profile: profiles[k].clone(),
                    payoffs: Some(PayoffPair { focal, deviant }),
                    kind: WitnessKind::Dominance(case),
                };
                (Some(cex), examined as u64)
            }
        })
    }

    fn single_dominance(&self, s: &DominanceScenario) -> Result<(Option<Counterexample>, u64)> {
        if s.valuations.participants() != s.bids.participants() {
            return Err(DomainError::ParticipantMismatch);
        }
        let space = ProfileSpace::new(s.bids.participants().clone(), s.grid.clone())?;
        space.digits_of(&s.valuations)?;
        let focal = space.digits_of(&s.bids)?;
        with_workers(self.workers, || {
            self.dominance_search(
                s.rule.as_ref(),
                &space,
                &s.policy,
                Blocks::Single {
                    focal: &focal,
                    valuations: s.valuations.entries(),
                },
                |_| s.valuations.clone(),
            )
        })
    }

    /// Checks that no participant gains by deviating from the focal bids,
    /// for every deviation profile on the grid.
    pub fn check_weak_dominance(&self, s: &DominanceScenario) -> PropertyReport {
        let started = Instant::now();
        let mut report = PropertyReport::start(
            "weak_dominance",
            s.rule.name(),
            &s.grid,
            s.bids.len(),
            s.policy.to_string(),
        );
        report.scenario = Some((s.valuations.clone(), s.bids.clone()));
        report.finish(self.single_dominance(s), started)
    }

    /// The minimal counterexample [`Self::check_weak_dominance`] would report.
    pub fn find_counterexample(&self, s: &DominanceScenario) -> Result<Option<Counterexample>> {
        Ok(self.single_dominance(s)?.0)
    }

    /// Truthful bidding is weakly dominant for every valuation profile on the grid.
    pub fn check_truthful_equilibrium(
        &self,
        rule: &dyn AuctionRule,
        grid: &BidGrid,
        n: usize,
        policy: &TieBreakPolicy,
    ) -> PropertyReport {
        let started = Instant::now();
        let report = PropertyReport::start(
            "truthful_equilibrium",
            rule.name(),
            grid,
            n,
            policy.to_string(),
        );
        let result = (|| {
            let space = ProfileSpace::new(ParticipantSet::range(n)?, grid.clone())?;
            let profiles = space.profiles();
            with_workers(self.workers, || {
                self.dominance_search(rule, &space, policy, Blocks::Truthful, |block| {
                    profiles[block].clone()
                })
            })
        })();
        report.finish(result, started)
    }

    /// Truthful bids lead to an efficient allocation for every valuation
    /// profile on the grid.
    pub fn check_efficiency_truthful(
        &self,
        rule: &dyn AuctionRule,
        grid: &BidGrid,
        n: usize,
        policy: &TieBreakPolicy,
    ) -> PropertyReport {
        let started = Instant::now();
        let report = PropertyReport::start(
            "efficiency_truthful",
            rule.name(),
            grid,
            n,
            policy.to_string(),
        );
        let result = (|| {
            let space = ProfileSpace::new(ParticipantSet::range(n)?, grid.clone())?;
            let profiles = space.profiles();
            with_workers(self.workers, || {
                let table = self.outcome_table(rule, &profiles, policy);
                let hit = find_first(profiles.len(), |k| {
                    let v = &profiles[k];
                    let alloc = table[k].allocation();
                    match is_efficient(v, alloc) {
                        Ok(true) => None,
                        Ok(false) => Some(efficiency_witness(v, alloc)),
                        Err(e) => Some(Err(e)),
                    }
                });
                match hit {
                    None => Ok((None, profiles.len() as u64)),
                    Some((k, cex)) => Ok((Some(cex?), k as u64 + 1)),
                }
            })
        })();
        report.finish(result, started)
    }

    /// For every bid profile on the grid: each policy yields an outcome the
    /// rule itself accepts, with a winner among the top bidders; policies
    /// that pick the same winner agree on the whole outcome; repeated
    /// evaluation is identical; and exactly `|M|` candidate outcomes conform.
    pub fn check_well_defined(
        &self,
        rule: &dyn AuctionRule,
        grid: &BidGrid,
        n: usize,
        policies: &[TieBreakPolicy],
    ) -> PropertyReport {
        let started = Instant::now();
        let names = policies
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let report = PropertyReport::start("well_defined", rule.name(), grid, n, names);
        let result = (|| {
            if policies.is_empty() {
                return Err(DomainError::NoPolicies);
            }
            let space = ProfileSpace::new(ParticipantSet::range(n)?, grid.clone())?;
            let profiles = space.profiles();
            with_workers(self.workers, || {
                let hit = find_first(profiles.len(), |k| {
                    well_defined_at(rule, &profiles[k], policies).transpose()
                });
                match hit {
                    None => Ok((None, profiles.len() as u64)),
                    Some((k, cex)) => Ok((Some(cex?), k as u64 + 1)),
                }
            })
        })();
        report.finish(result, started)
    }
}

fn efficiency_witness(v: &Profile, alloc: &Allocation) -> Result<Counterexample> {
    let participant = alloc
        .winner()
        .or_else(|| {
            alloc
                .flags()
                .iter()
                .position(|&f| f == 1)
                .map(|pos| alloc.participants().ids()[pos])
        })
        .unwrap_or(v.participants().ids()[0]);
    Ok(Counterexample {
        participant,
        valuations: v.clone(),
        focal_profile: v.clone(),
        profile: v.clone(),
        payoffs: None,
        kind: WitnessKind::Efficiency {
            welfare: welfare(v, alloc)?,
            optimum: v.maximum().clone(),
        },
    })
}

fn well_defined_at(
    rule: &dyn AuctionRule,
    bids: &Profile,
    policies: &[TieBreakPolicy],
) -> Result<Option<Counterexample>> {
    let top = bids.argmax_set();
    let witness = |participant: usize, kind: WitnessKind| Counterexample {
        participant,
        valuations: bids.clone(),
        focal_profile: bids.clone(),
        profile: bids.clone(),
        payoffs: None,
        kind,
    };
    let first_id = bids.participants().ids()[0];

    let mut outcomes: Vec<(TieBreakPolicy, Outcome)> = Vec::with_capacity(policies.len());
    for policy in policies {
        let outcome = rule.outcome(bids, policy);
        let again = rule.outcome(bids, policy);
        let blame = outcome.winner().unwrap_or(first_id);
        if outcome != again {
            return Ok(Some(witness(
                blame,
                WitnessKind::Nondeterministic { policy: *policy },
            )));
        }
        if !rule.conforms(bids, &outcome).unwrap_or(false) {
            return Ok(Some(witness(
                blame,
                WitnessKind::Nonconforming { policy: *policy },
            )));
        }
        match outcome.winner() {
            Some(w) if top.contains(&w) => {}
            _ => {
                return Ok(Some(witness(
                    blame,
                    WitnessKind::WinnerOutsideArgmax { policy: *policy },
                )))
            }
        }
        if let Some((other, _)) = outcomes
            .iter()
            .find(|(_, o)| o.winner() == outcome.winner() && *o != outcome)
        {
            return Ok(Some(witness(
                blame,
                WitnessKind::PolicyDivergence {
                    first: *other,
                    second: *policy,
                },
            )));
        }
        outcomes.push((*policy, outcome));
    }

    let found = conforming_outcomes(rule, bids)?.len();
    if found != top.len() {
        return Ok(Some(witness(
            first_id,
            WitnessKind::ConformingCount {
                found,
                expected: top.len(),
            },
        )));
    }
    Ok(None)
}

/// Every candidate outcome the rule's predicate accepts for `bids`.
///
/// Candidates range over all `{0,1}ⁿ` allocations and all payment vectors
/// with entries from `{0}` plus the distinct bid values.
pub fn conforming_outcomes(rule: &dyn AuctionRule, bids: &Profile) -> Result<Vec<Outcome>> {
    let participants = bids.participants();
    let n = participants.len();
    let mut amounts: Vec<Rational> = bids.entries().to_vec();
    amounts.push(Rational::zero());
    amounts.sort();
    amounts.dedup();

    let mut found = Vec::new();
    for flags in Odometer::new(n, 2) {
        let flags: Vec<u8> = flags.into_iter().map(|f| f as u8).collect();
        let allocation = Allocation::from_flags(participants.clone(), flags)?;
        for digits in Odometer::new(n, amounts.len()) {
            let entries = digits.iter().map(|&d| amounts[d].clone()).collect();
            let payments = Payments::new(participants.clone(), entries)?;
            let candidate = Outcome::new(allocation.clone(), payments)?;
            if rule.conforms(bids, &candidate)? {
                found.push(candidate);
            }
        }
    }
    Ok(found)
}

pub fn check_weak_dominance(s: &DominanceScenario) -> PropertyReport {
    Verifier::new().check_weak_dominance(s)
}

pub fn find_counterexample(s: &DominanceScenario) -> Result<Option<Counterexample>> {
    Verifier::new().find_counterexample(s)
}

pub fn check_truthful_equilibrium(
    rule: &dyn AuctionRule,
    grid: &BidGrid,
    n: usize,
    policy: &TieBreakPolicy,
) -> PropertyReport {
    Verifier::new().check_truthful_equilibrium(rule, grid, n, policy)
}

pub fn check_efficiency_truthful(
    rule: &dyn AuctionRule,
    grid: &BidGrid,
    n: usize,
    policy: &TieBreakPolicy,
) -> PropertyReport {
    Verifier::new().check_efficiency_truthful(rule, grid, n, policy)
}

pub fn check_well_defined(
    rule: &dyn AuctionRule,
    grid: &BidGrid,
    n: usize,
    policies: &[TieBreakPolicy],
) -> PropertyReport {
    Verifier::new().check_well_defined(rule, grid, n, policies)
}
