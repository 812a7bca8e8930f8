//! The win/lose case analysis behind truthful bidding in second-price
//! auctions, as individually checkable lemmas.
//!
//! Participant `i` bids its valuation (the *truthful* profile `b̂[i←v_i]`) or
//! some other bid (the *deviant* profile `b̂`). Whether `i` wins in each is
//! decided by running the second-price rule with the tie-break policy, so
//! ties are resolved the same way the verifier resolves them. The four leaf
//! cases are:
//!
//! | label | truthful | deviant |
//! |-------|----------|---------|
//! | 1a    | win      | win     |
//! | 1b    | win      | lose    |
//! | 2a    | lose     | win     |
//! | 2b    | lose     | lose    |
//!
//! A lemma whose precondition does not hold reports [`Claim::Inapplicable`];
//! the suite counts those as skips so vacuous lemmas are visible.

use std::fmt;

use rayon::prelude::*;

use crate::auction::{payoff, second_price_outcome, TieBreakPolicy};
use crate::error::{DomainError, Result};
use crate::search::{with_workers, ProfileSpace};
use crate::vectors::{ParticipantSet, Profile, Rational};
use crate::verifier::BidGrid;

/// Leaf of the win/lose case tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProofCase {
    WinWin,
    WinLose,
    LoseWin,
    LoseLose,
}

impl ProofCase {
    pub const ALL: [ProofCase; 4] = [
        ProofCase::WinWin,
        ProofCase::WinLose,
        ProofCase::LoseWin,
        ProofCase::LoseLose,
    ];

    pub fn from_wins(truthful_wins: bool, deviant_wins: bool) -> Self {
        match (truthful_wins, deviant_wins) {
            (true, true) => ProofCase::WinWin,
            (true, false) => ProofCase::WinLose,
            (false, true) => ProofCase::LoseWin,
            (false, false) => ProofCase::LoseLose,
        }
    }

    /// `1a`, `1b`, `2a` or `2b`.
    pub fn label(self) -> &'static str {
        match self {
            ProofCase::WinWin => "1a",
            ProofCase::WinLose => "1b",
            ProofCase::LoseWin => "2a",
            ProofCase::LoseLose => "2b",
        }
    }

    /// `win-win`, `win-lose`, `lose-win` or `lose-lose`.
    pub fn name(self) -> &'static str {
        match self {
            ProofCase::WinWin => "win-win",
            ProofCase::WinLose => "win-lose",
            ProofCase::LoseWin => "lose-win",
            ProofCase::LoseLose => "lose-lose",
        }
    }

    /// `win` or `lose`: the outcome of the truthful bid alone.
    pub fn truthful_label(self) -> &'static str {
        match self {
            ProofCase::WinWin | ProofCase::WinLose => "win",
            ProofCase::LoseWin | ProofCase::LoseLose => "lose",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ProofCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label(), self.name())
    }
}

/// A `(v, b̂, i)` triple placed in the case tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCase {
    pub case: ProofCase,
    pub participant: usize,
    pub truthful_profile: Profile,
    pub deviant_profile: Profile,
}

/// Result of checking one lemma instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    /// The lemma's identity holds; `payoff` is the payoff it is about.
    Holds {
        payoff: Rational,
    },
    Fails {
        reason: String,
    },
    Inapplicable,
}

impl Claim {
    pub fn is_inapplicable(&self) -> bool {
        matches!(self, Claim::Inapplicable)
    }

    fn check(ok: bool, payoff: Rational, reason: impl FnOnce() -> String) -> Claim {
        if ok {
            Claim::Holds { payoff }
        } else {
            Claim::Fails { reason: reason() }
        }
    }
}

struct Side {
    wins: bool,
    flag: u8,
    paid: Rational,
}

fn evaluate(bids: &Profile, id: usize, policy: &TieBreakPolicy) -> Result<Side> {
    let outcome = second_price_outcome(bids, policy);
    let flag = outcome.allocation().flag(id)?;
    Ok(Side {
        wins: outcome.winner() == Some(id),
        flag,
        paid: outcome.payments().get(id)?.clone(),
    })
}

fn truthful_profile(v: &Profile, deviant: &Profile, id: usize) -> Result<Profile> {
    if v.participants() != deviant.participants() {
        return Err(DomainError::ParticipantMismatch);
    }
    deviant.deviation(id, v.get(id)?.clone())
}

pub fn classify(
    v: &Profile,
    deviant: &Profile,
    id: usize,
    policy: &TieBreakPolicy,
) -> Result<LemmaCase> {
    let truthful = truthful_profile(v, deviant, id)?;
    let case = ProofCase::from_wins(
        evaluate(&truthful, id, policy)?.wins,
        evaluate(deviant, id, policy)?.wins,
    );
    Ok(LemmaCase {
        case,
        participant: id,
        truthful_profile: truthful,
        deviant_profile: deviant.clone(),
    })
}

/// A truthful winner pays the highest other bid and ends up with a
/// nonnegative payoff.
pub fn lemma_truthful_winner_payoff(
    v: &Profile,
    deviant: &Profile,
    id: usize,
    policy: &TieBreakPolicy,
) -> Result<Claim> {
    let truthful = truthful_profile(v, deviant, id)?;
    let side = evaluate(&truthful, id, policy)?;
    if !side.wins {
        return Ok(Claim::Inapplicable);
    }
    let value = v.get(id)?;
    let u = payoff(value, side.flag, &side.paid);
    let expected = value - truthful.maximum_except(id)?;
    Ok(Claim::check(
        u == expected && !u.is_negative(),
        u.clone(),
        || format!("payoff {u}, expected {expected} >= 0"),
    ))
}

/// Winning with either bid yields the same payoff: the highest other bid,
/// and so the price, does not depend on `i`'s own bid.
pub fn lemma_deviation_winner_payoff_unchanged(
    v: &Profile,
    deviant: &Profile,
    id: usize,
    policy: &TieBreakPolicy,
) -> Result<Claim> {
    let truthful = truthful_profile(v, deviant, id)?;
    let t = evaluate(&truthful, id, policy)?;
    let d = evaluate(deviant, id, policy)?;
    if !(t.wins && d.wins) {
        return Ok(Claim::Inapplicable);
    }
    let value = v.get(id)?;
    let u_t = payoff(value, t.flag, &t.paid);
    let u_d = payoff(value, d.flag, &d.paid);
    Ok(Claim::check(u_t == u_d, u_d.clone(), || {
        format!("truthful payoff {u_t} differs from deviant payoff {u_d}")
    }))
}

/// A loser under `bids` is not awarded the good, pays nothing and gets zero.
pub fn lemma_loser_payoff_zero(
    v: &Profile,
    bids: &Profile,
    id: usize,
    policy: &TieBreakPolicy,
) -> Result<Claim> {
    if v.participants() != bids.participants() {
        return Err(DomainError::ParticipantMismatch);
    }
    let side = evaluate(bids, id, policy)?;
    if side.wins {
        return Ok(Claim::Inapplicable);
    }
    let u = payoff(v.get(id)?, side.flag, &side.paid);
    Ok(Claim::check(
        side.flag == 0 && side.paid.is_zero() && u.is_zero(),
        u.clone(),
        || {
            format!(
                "loser has flag {}, pays {}, payoff {u}",
                side.flag, side.paid
            )
        },
    ))
}

/// Losing truthfully means `v_i` is at most the highest other bid, so
/// winning with another bid costs at least `v_i`: the deviant payoff is
/// `v_i - max_{-i}(b̂) <= 0`.
pub fn lemma_loser_bound(
    v: &Profile,
    deviant: &Profile,
    id: usize,
    policy: &TieBreakPolicy,
) -> Result<Claim> {
    let truthful = truthful_profile(v, deviant, id)?;
    let t = evaluate(&truthful, id, policy)?;
    let d = evaluate(deviant, id, policy)?;
    if t.wins || !d.wins {
        return Ok(Claim::Inapplicable);
    }
    let value = v.get(id)?;
    let others = truthful.maximum_except(id)?;
    let u_d = payoff(value, d.flag, &d.paid);
    let expected = value - deviant.maximum_except(id)?;
    Ok(Claim::check(
        value <= others && u_d == expected && expected <= Rational::zero(),
        u_d.clone(),
        || format!("valuation {value}, highest other bid {others}, deviant payoff {u_d}"),
    ))
}

/// Replacing `i`'s own bid never changes the highest bid among the others.
pub fn lemma_other_bids_unchanged(
    v: &Profile,
    deviant: &Profile,
    id: usize,
    _policy: &TieBreakPolicy,
) -> Result<Claim> {
    let truthful = truthful_profile(v, deviant, id)?;
    let a = truthful.maximum_except(id)?;
    let b = deviant.maximum_except(id)?;
    Ok(Claim::check(a == b, b.clone(), || {
        format!("highest other bid {a} became {b}")
    }))
}

/// The leaf inequality `u_i(b̂[i←v_i]) >= u_i(b̂)` for whichever case applies.
pub fn lemma_case_inequality(
    v: &Profile,
    deviant: &Profile,
    id: usize,
    policy: &TieBreakPolicy,
) -> Result<Claim> {
    let truthful = truthful_profile(v, deviant, id)?;
    let t = evaluate(&truthful, id, policy)?;
    let d = evaluate(deviant, id, policy)?;
    let value = v.get(id)?;
    let u_t = payoff(value, t.flag, &t.paid);
    let u_d = payoff(value, d.flag, &d.paid);
    let case = ProofCase::from_wins(t.wins, d.wins);
    Ok(Claim::check(u_t >= u_d, u_t.clone(), || {
        format!("case {case}: truthful payoff {u_t} < deviant payoff {u_d}")
    }))
}

type Lemma = fn(&Profile, &Profile, usize, &TieBreakPolicy) -> Result<Claim>;

/// The suite, in report order.
pub const LEMMAS: [(&str, Lemma); 6] = [
    ("truthful_winner_payoff", lemma_truthful_winner_payoff),
    (
        "deviation_winner_payoff_unchanged",
        lemma_deviation_winner_payoff_unchanged,
    ),
    ("loser_payoff_zero", lemma_loser_payoff_zero),
    ("loser_bound", lemma_loser_bound),
    ("other_bids_unchanged", lemma_other_bids_unchanged),
    ("case_inequality", lemma_case_inequality),
];

/// Counts for one lemma across the suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaStats {
    pub name: &'static str,
    pub applicable: u64,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
}

impl LemmaStats {
    fn new(name: &'static str) -> Self {
        LemmaStats {
            name,
            applicable: 0,
            passed: 0,
            failed: 0,
            skipped: 0,
        }
    }

    fn merge(&mut self, other: &LemmaStats) {
        self.applicable += other.applicable;
        self.passed += other.passed;
        self.failed += other.failed;
        self.skipped += other.skipped;
    }
}

/// A failed lemma instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaFailure {
    pub lemma: &'static str,
    pub participant: usize,
    pub valuations: Profile,
    pub deviant_profile: Profile,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub grid: BidGrid,
    pub n: usize,
    pub policy: TieBreakPolicy,
    pub triples: u64,
    pub lemmas: Vec<LemmaStats>,
    /// Triples per leaf case, indexed like [`ProofCase::ALL`].
    pub case_counts: [u64; 4],
    /// Triples matched by zero or several leaf cases.
    pub partition_violations: u64,
    /// Earliest failure in enumeration order.
    pub first_failure: Option<LemmaFailure>,
}

impl SuiteReport {
    pub fn failures(&self) -> u64 {
        self.lemmas.iter().map(|l| l.failed).sum()
    }

    /// Lemmas that never applied.
    pub fn vacuous(&self) -> Vec<&'static str> {
        self.lemmas
            .iter()
            .filter(|l| l.applicable == 0)
            .map(|l| l.name)
            .collect()
    }

    pub fn case_count(&self, case: ProofCase) -> u64 {
        self.case_counts[case.index()]
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0 && self.partition_violations == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemma suite: second_price")?;
        writeln!(f, "grid: {}", self.grid)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "policy: {}", self.policy)?;
        writeln!(f, "triples: {}", self.triples)?;
        writeln!(
            f,
            "{:<36} {:>10} {:>10} {:>10} {:>10}",
            "lemma", "applicable", "passed", "failed", "skipped"
        )?;
        for l in &self.lemmas {
            writeln!(
                f,
                "{:<36} {:>10} {:>10} {:>10} {:>10}",
                l.name, l.applicable, l.passed, l.failed, l.skipped
            )?;
        }
        for case in ProofCase::ALL {
            writeln!(f, "case {}: {}", case, self.case_count(case))?;
        }
        writeln!(f, "partition_violations: {}", self.partition_violations)?;
        match &self.first_failure {
            None => write!(f, "first_failure: none"),
            Some(fail) => write!(
                f,
                "first_failure: {} participant {} valuations {} deviation {}: {}",
                fail.lemma, fail.participant, fail.valuations, fail.deviant_profile, fail.reason
            ),
        }
    }
}

/// Evaluates every lemma over all `(v, b̂, i)` in `gridⁿ × gridⁿ × N`.
pub fn run_lemma_suite(grid: &BidGrid, n: usize, policy: &TieBreakPolicy) -> Result<SuiteReport> {
    run_lemma_suite_with(grid, n, policy, 1)
}

/// [`run_lemma_suite`] split across `workers` threads. The report does not
/// depend on the worker count.
pub fn run_lemma_suite_with(
    grid: &BidGrid,
    n: usize,
    policy: &TieBreakPolicy,
    workers: usize,
) -> Result<SuiteReport> {
    let participants = ParticipantSet::range(n)?;
    let space = ProfileSpace::new(participants.clone(), grid.clone())?;
    let profiles = space.profiles();

    let partials: Vec<Partial> = with_workers(workers, || {
        profiles
            .par_iter()
            .map(|v| suite_for_valuation(v, &profiles, &participants, policy))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut lemmas: Vec<LemmaStats> = LEMMAS
        .iter()
        .map(|(name, _)| LemmaStats::new(name))
        .collect();
    let mut case_counts = [0u64; 4];
    let mut partition_violations = 0;
    let mut triples = 0;
    let mut first_failure = None;
    for part in partials {
        for (total, p) in lemmas.iter_mut().zip(&part.lemmas) {
            total.merge(p);
        }
        for (total, c) in case_counts.iter_mut().zip(part.case_counts) {
            *total += c;
        }
        partition_violations += part.partition_violations;
        triples += part.triples;
        if first_failure.is_none() {
            first_failure = part.first_failure;
        }
    }
    Ok(SuiteReport {
        grid: grid.clone(),
        n,
        policy: *policy,
        triples,
        lemmas,
        case_counts,
        partition_violations,
        first_failure,
    })
}

struct Partial {
    lemmas: Vec<LemmaStats>,
    case_counts: [u64; 4],
    partition_violations: u64,
    triples: u64,
    first_failure: Option<LemmaFailure>,
}

fn suite_for_valuation(
    v: &Profile,
    deviants: &[Profile],
    participants: &ParticipantSet,
    policy: &TieBreakPolicy,
) -> Result<Partial> {
    let mut part = Partial {
        lemmas: LEMMAS
            .iter()
            .map(|(name, _)| LemmaStats::new(name))
            .collect(),
        case_counts: [0; 4],
        partition_violations: 0,
        triples: 0,
        first_failure: None,
    };
    for deviant in deviants {
        for &id in participants.ids() {
            part.triples += 1;

            let truthful = truthful_profile(v, deviant, id)?;
            let t_wins = evaluate(&truthful, id, policy)?.wins;
            let d_wins = evaluate(deviant, id, policy)?.wins;
            let leaves = [
                t_wins && d_wins,
                t_wins && !d_wins,
                !t_wins && d_wins,
                !t_wins && !d_wins,
            ];
            if leaves.iter().filter(|&&hit| hit).count() != 1 {
                part.partition_violations += 1;
            }
            part.case_counts[ProofCase::from_wins(t_wins, d_wins).index()] += 1;

            for (stats, (name, lemma)) in part.lemmas.iter_mut().zip(LEMMAS.iter()) {
                match lemma(v, deviant, id, policy)? {
                    Claim::Inapplicable => stats.skipped += 1,
                    Claim::Holds { .. } => {
                        stats.applicable += 1;
                        stats.passed += 1;
                    }
                    Claim::Fails { reason } => {
                        stats.applicable += 1;
                        stats.failed += 1;
                        part.first_failure.get_or_insert_with(|| LemmaFailure {
                            lemma: name,
                            participant: id,
                            valuations: v.clone(),
                            deviant_profile: deviant.clone(),
                            reason,
                        });
                    }
                }
            }
        }
    }
    Ok(part)
}
