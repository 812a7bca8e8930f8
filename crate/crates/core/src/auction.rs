//! Outcomes, payoffs and single-good sealed-bid auction rules.
//!
//! The second-price rule is provided both as an outcome function
//! ([`second_price_outcome`]) and as a conformance predicate
//! ([`is_second_price_outcome`]) so that one can be checked against the
//! other. [`FirstPrice`] exists as a negative control: truthful bidding is
//! not dominant under it.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{DomainError, Result};
use crate::vectors::{write_list, ParticipantSet, Profile, Rational};

/// 0/1 award flag per participant.
///
/// Outcomes produced by the built-in rules always have exactly one winner.
/// [`Allocation::from_flags`] accepts any 0/1 vector so that malformed
/// outcomes from user-supplied rules can be represented and rejected by the
/// conformance predicates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    participants: ParticipantSet,
    flags: Vec<u8>,
}

impl Allocation {
    pub fn single_winner(participants: ParticipantSet, winner: usize) -> Result<Self> {
        let pos = participants.require_position(winner)?;
        let mut flags = vec![0; participants.len()];
        flags[pos] = 1;
        Ok(Allocation {
            participants,
            flags,
        })
    }

    /// Raw flags in ascending id order; only the 0/1 range and length are checked.
    pub fn from_flags(participants: ParticipantSet, flags: Vec<u8>) -> Result<Self> {
        if flags.len() != participants.len() {
            return Err(DomainError::LengthMismatch {
                expected: participants.len(),
                actual: flags.len(),
            });
        }
        if let Some((pos, &flag)) = flags.iter().enumerate().find(|(_, &f)| f > 1) {
            return Err(DomainError::InvalidFlag {
                id: participants.ids()[pos],
                flag,
            });
        }
        Ok(Allocation {
            participants,
            flags,
        })
    }

    pub fn participants(&self) -> &ParticipantSet {
        &self.participants
    }

    pub fn flags(&self) -> &[u8] {
        &self.flags
    }

    pub fn flag(&self, id: usize) -> Result<u8> {
        Ok(self.flags[self.participants.require_position(id)?])
    }

    pub fn winner_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f == 1).count()
    }

    /// The winning id, if exactly one participant is awarded the good.
    pub fn winner(&self) -> Option<usize> {
        if self.winner_count() != 1 {
            return None;
        }
        let pos = self.flags.iter().position(|&f| f == 1)?;
        Some(self.participants.ids()[pos])
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, self.flags.iter())
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Allocation({self})")
    }
}

/// Nonnegative payment per participant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Payments(Profile);

impl Payments {
    pub fn new(participants: ParticipantSet, entries: Vec<Rational>) -> Result<Self> {
        Profile::new(participants, entries).map(Payments)
    }

    /// Zero for everybody except `payer`, who pays `amount`.
    pub fn single(participants: ParticipantSet, payer: usize, amount: Rational) -> Result<Self> {
        let zeros = vec![Rational::zero(); participants.len()];
        Ok(Payments(
            Profile::new(participants, zeros)?.deviation(payer, amount)?,
        ))
    }

    pub fn participants(&self) -> &ParticipantSet {
        self.0.participants()
    }

    pub fn entries(&self) -> &[Rational] {
        self.0.entries()
    }

    pub fn get(&self, id: usize) -> Result<&Rational> {
        self.0.get(id)
    }
}

impl fmt::Display for Payments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Payments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Payments({self})")
    }
}

/// Allocation plus payments over one participant set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Outcome {
    allocation: Allocation,
    payments: Payments,
}

impl Outcome {
    pub fn new(allocation: Allocation, payments: Payments) -> Result<Self> {
        if allocation.participants() != payments.participants() {
            return Err(DomainError::ParticipantMismatch);
        }
        Ok(Outcome {
            allocation,
            payments,
        })
    }

    /// `winner` gets the good and pays `price`; everyone else gets and pays nothing.
    pub fn award(participants: ParticipantSet, winner: usize, price: Rational) -> Result<Self> {
        Ok(Outcome {
            allocation: Allocation::single_winner(participants.clone(), winner)?,
            payments: Payments::single(participants, winner, price)?,
        })
    }

    pub fn allocation(&self) -> &Allocation {
        &self.allocation
    }

    pub fn payments(&self) -> &Payments {
        &self.payments
    }

    pub fn participants(&self) -> &ParticipantSet {
        self.allocation.participants()
    }

    pub fn winner(&self) -> Option<usize> {
        self.allocation.winner()
    }
}

/// Two lines: `allocation: ...` and `payments: ...`.
impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "allocation: {}", self.allocation)?;
        write!(f, "payments: {}", self.payments)
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Outcome[{}; {}]", self.allocation, self.payments)
    }
}

/// Chooses the single winner among the tied top bidders.
///
/// Every policy is deterministic. `SeededPseudorandom` hashes the seed
/// together with the bid profile, so equal inputs always give the same pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieBreakPolicy {
    #[default]
    LowestId,
    HighestId,
    SeededPseudorandom(u64),
}

impl TieBreakPolicy {
    /// Picks one member of `tied`. Panics if `tied` is empty.
    pub fn select(&self, tied: &[usize], bids: &Profile) -> usize {
        assert!(!tied.is_empty(), "argmax set is never empty");
        match *self {
            TieBreakPolicy::LowestId => *tied.iter().min().unwrap(),
            TieBreakPolicy::HighestId => *tied.iter().max().unwrap(),
            TieBreakPolicy::SeededPseudorandom(_) if tied.len() == 1 => tied[0],
            TieBreakPolicy::SeededPseudorandom(seed) => {
                let mut hasher = Sha256::new();
                hasher.update(seed.to_le_bytes());
                hasher.update(bids.to_string().as_bytes());
                let digest = hasher.finalize();
                let word = u64::from_le_bytes(digest[..8].try_into().unwrap());
                let mut sorted = tied.to_vec();
                sorted.sort_unstable();
                sorted[(word % sorted.len() as u64) as usize]
            }
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            TieBreakPolicy::SeededPseudorandom(seed) => Some(seed),
            _ => None,
        }
    }
}

impl fmt::Display for TieBreakPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieBreakPolicy::LowestId => f.write_str("lowest_id"),
            TieBreakPolicy::HighestId => f.write_str("highest_id"),
            TieBreakPolicy::SeededPseudorandom(seed) => write!(f, "seeded_pseudorandom({seed})"),
        }
    }
}

/// Error for unrecognised tie-break policy names.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown tie-break policy {0:?}")]
pub struct UnknownPolicy(pub String);

impl FromStr for TieBreakPolicy {
    type Err = UnknownPolicy;

    /// Accepts `lowest_id`, `highest_id` and `seeded_pseudorandom(<u64>)`.
    fn from_str(s: &str) -> std::result::Result<Self, UnknownPolicy> {
        let text = s.trim();
        match text {
            "lowest_id" => return Ok(TieBreakPolicy::LowestId),
            "highest_id" => return Ok(TieBreakPolicy::HighestId),
            _ => {}
        }
        text.strip_prefix("seeded_pseudorandom(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|seed| seed.trim().parse().ok())
            .map(TieBreakPolicy::SeededPseudorandom)
            .ok_or_else(|| UnknownPolicy(text.to_string()))
    }
}

/// A named single-good auction: an outcome function plus the predicate
/// that characterises its conforming outcomes.
pub trait AuctionRule: Send + Sync {
    fn name(&self) -> &str;

    /// Must be total on valid bid profiles.
    fn outcome(&self, bids: &Profile, policy: &TieBreakPolicy) -> Outcome;

    /// Whether `outcome` is one the rule admits for `bids`.
    fn conforms(&self, bids: &Profile, outcome: &Outcome) -> Result<bool>;
}

/// Highest bidder wins and pays the highest other bid.
#[derive(Debug, Clone, Copy, Default)]
pub struct SecondPrice;

/// Highest bidder wins and pays their own bid.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstPrice;

impl AuctionRule for SecondPrice {
    fn name(&self) -> &str {
        "second_price"
    }

    fn outcome(&self, bids: &Profile, policy: &TieBreakPolicy) -> Outcome {
        second_price_outcome(bids, policy)
    }

    fn conforms(&self, bids: &Profile, outcome: &Outcome) -> Result<bool> {
        is_second_price_outcome(bids, outcome)
    }
}

impl AuctionRule for FirstPrice {
    fn name(&self) -> &str {
        "first_price"
    }

    fn outcome(&self, bids: &Profile, policy: &TieBreakPolicy) -> Outcome {
        first_price_outcome(bids, policy)
    }

    fn conforms(&self, bids: &Profile, outcome: &Outcome) -> Result<bool> {
        is_first_price_outcome(bids, outcome)
    }
}

type OutcomeFn = dyn Fn(&Profile, &TieBreakPolicy) -> Outcome + Send + Sync;
type ConformsFn = dyn Fn(&Profile, &Outcome) -> Result<bool> + Send + Sync;

/// Rule assembled from closures; useful for stubs and experiments.
pub struct CustomRule {
    name: String,
    outcome: Box<OutcomeFn>,
    conforms: Box<ConformsFn>,
}

impl CustomRule {
    pub fn new(
        name: impl Into<String>,
        outcome: impl Fn(&Profile, &TieBreakPolicy) -> Outcome + Send + Sync + 'static,
        conforms: impl Fn(&Profile, &Outcome) -> Result<bool> + Send + Sync + 'static,
    ) -> Self {
        CustomRule {
            name: name.into(),
            outcome: Box::new(outcome),
            conforms: Box::new(conforms),
        }
    }
}

impl AuctionRule for CustomRule {
    fn name(&self) -> &str {
        &self.name
    }

    fn outcome(&self, bids: &Profile, policy: &TieBreakPolicy) -> Outcome {
        (self.outcome)(bids, policy)
    }

    fn conforms(&self, bids: &Profile, outcome: &Outcome) -> Result<bool> {
        (self.conforms)(bids, outcome)
    }
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule")
            .field("name", &self.name)
            .finish()
    }
}

/// Looks up a built-in rule by its name (`second_price`, `first_price`).
pub fn rule_by_name(name: &str) -> Option<Arc<dyn AuctionRule>> {
    match name {
        "second_price" => Some(Arc::new(SecondPrice)),
        "first_price" => Some(Arc::new(FirstPrice)),
        _ => None,
    }
}

fn winner_of(bids: &Profile, policy: &TieBreakPolicy) -> usize {
    policy.select(&bids.argmax_set(), bids)
}

pub fn second_price_outcome(bids: &Profile, policy: &TieBreakPolicy) -> Outcome {
    let winner = winner_of(bids, policy);
    let price = bids
        .maximum_except(winner)
        .expect("winner is a participant")
        .clone();
    Outcome::award(bids.participants().clone(), winner, price).expect("winner is a participant")
}

pub fn first_price_outcome(bids: &Profile, policy: &TieBreakPolicy) -> Outcome {
    let winner = winner_of(bids, policy);
    let price = bids.get(winner).expect("winner is a participant").clone();
    Outcome::award(bids.participants().clone(), winner, price).expect("winner is a participant")
}

/// Shared shape of both built-in predicates: exactly one winner, drawn
/// from the argmax set, paying `price(winner)`; everyone else gets and
/// pays nothing.
fn is_top_bidder_outcome(
    bids: &Profile,
    outcome: &Outcome,
    price: impl Fn(usize) -> Rational,
) -> Result<bool> {
    if bids.participants() != outcome.participants() {
        return Err(DomainError::ParticipantMismatch);
    }
    let Some(winner) = outcome.winner() else {
        return Ok(false);
    };
    if !bids.argmax_set().contains(&winner) {
        return Ok(false);
    }
    let payments = outcome.payments();
    for (id, paid) in outcome.participants().ids().iter().zip(payments.entries()) {
        let expected = if *id == winner {
            price(winner)
        } else {
            Rational::zero()
        };
        if *paid != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff some top bidder `i` alone is awarded the good and pays the
/// highest bid among the others, while nobody else pays.
pub fn is_second_price_outcome(bids: &Profile, outcome: &Outcome) -> Result<bool> {
    is_top_bidder_outcome(bids, outcome, |w| {
        bids.maximum_except(w)
            .expect("winner is a participant")
            .clone()
    })
}

pub fn is_first_price_outcome(bids: &Profile, outcome: &Outcome) -> Result<bool> {
    is_top_bidder_outcome(bids, outcome, |w| {
        bids.get(w).expect("winner is a participant").clone()
    })
}

/// `v·x - p`.
pub fn payoff(valuation: &Rational, awarded: u8, paid: &Rational) -> Rational {
    if awarded == 1 {
        valuation - paid
    } else {
        -paid
    }
}

/// Payoff of participant `id` when `rule` runs on `bids`.
pub fn payoff_at(
    rule: &dyn AuctionRule,
    valuations: &Profile,
    bids: &Profile,
    policy: &TieBreakPolicy,
    id: usize,
) -> Result<Rational> {
    if valuations.participants() != bids.participants() {
        return Err(DomainError::ParticipantMismatch);
    }
    let outcome = rule.outcome(bids, policy);
    Ok(payoff(
        valuations.get(id)?,
        outcome.allocation().flag(id)?,
        outcome.payments().get(id)?,
    ))
}

/// Total value `Σ v_i x_i` realised by an allocation.
pub fn welfare(valuations: &Profile, allocation: &Allocation) -> Result<Rational> {
    if valuations.participants() != allocation.participants() {
        return Err(DomainError::ParticipantMismatch);
    }
    Ok(valuations
        .entries()
        .iter()
        .zip(allocation.flags())
        .filter(|(_, &x)| x == 1)
        .fold(Rational::zero(), |acc, (v, _)| &acc + v))
}

/// True iff the allocation has a single winner and that winner has a
/// highest valuation. A tied top valuation counts as efficient.
pub fn is_efficient(valuations: &Profile, allocation: &Allocation) -> Result<bool> {
    if valuations.participants() != allocation.participants() {
        return Err(DomainError::ParticipantMismatch);
    }
    Ok(match allocation.winner() {
        Some(winner) => valuations.get(winner)? == valuations.maximum(),
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Profile {
        Profile::from_integers(v).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn award(n: usize, winner: usize, price: i64) -> Outcome {
        Outcome::award(ParticipantSet::range(n).unwrap(), winner, r(price)).unwrap()
    }

    #[test]
    fn second_price_examples() {
        let lo = TieBreakPolicy::LowestId;
        let o = second_price_outcome(&p(&[3, 1, 2]), &lo);
        assert_eq!(o.winner(), Some(0));
        assert_eq!(o.to_string(), "allocation: 1,0,0\npayments: 2,0,0");

        let o = second_price_outcome(&p(&[10, 20, 20]), &lo);
        assert_eq!(o.winner(), Some(1));
        assert_eq!(o.payments().to_string(), "0,20,0");

        let o = second_price_outcome(&p(&[0, 0]), &lo);
        assert_eq!(o.winner(), Some(0));
        assert_eq!(o.payments().to_string(), "0,0");
    }

    #[test]
    fn conformance_examples() {
        assert!(is_second_price_outcome(&p(&[3, 1, 2]), &award(3, 0, 2)).unwrap());
        assert!(!is_second_price_outcome(&p(&[3, 1, 2]), &award(3, 1, 3)).unwrap());
        assert!(is_second_price_outcome(&p(&[2, 2]), &award(2, 1, 2)).unwrap());
        assert!(is_second_price_outcome(&p(&[2, 2]), &award(2, 0, 2)).unwrap());
        // right winner, wrong price
        assert!(!is_second_price_outcome(&p(&[3, 1, 2]), &award(3, 0, 3)).unwrap());
        assert_eq!(
            is_second_price_outcome(&p(&[3, 1]), &award(3, 0, 1)).unwrap_err(),
            DomainError::ParticipantMismatch
        );
    }

    #[test]
    fn conformance_rejects_multiple_or_no_winners_and_loser_payments() {
        let set = ParticipantSet::range(2).unwrap();
        let pay = Payments::new(set.clone(), vec![r(1), r(0)]).unwrap();
        let two = Allocation::from_flags(set.clone(), vec![1, 1]).unwrap();
        let none = Allocation::from_flags(set.clone(), vec![0, 0]).unwrap();
        let bids = p(&[1, 1]);
        assert!(!is_second_price_outcome(&bids, &Outcome::new(two, pay.clone()).unwrap()).unwrap());
        assert!(!is_second_price_outcome(&bids, &Outcome::new(none, pay).unwrap()).unwrap());

        let alloc = Allocation::single_winner(set.clone(), 0).unwrap();
        let loser_pays = Payments::new(set, vec![r(1), r(1)]).unwrap();
        assert!(
            !is_second_price_outcome(&bids, &Outcome::new(alloc, loser_pays).unwrap()).unwrap()
        );
    }

    #[test]
    fn allocation_flags_are_validated() {
        let set = ParticipantSet::range(2).unwrap();
        assert!(matches!(
            Allocation::from_flags(set.clone(), vec![2, 0]),
            Err(DomainError::InvalidFlag { id: 0, flag: 2 })
        ));
        assert!(Allocation::from_flags(set, vec![1]).is_err());
    }

    #[test]
    fn payoff_examples() {
        assert_eq!(payoff(&r(5), 1, &r(3)), r(2));
        assert_eq!(payoff(&r(5), 0, &r(0)), r(0));
        assert_eq!(payoff(&r(1), 1, &r(2)), r(-1));
    }

    #[test]
    fn payoff_at_examples() {
        let lo = TieBreakPolicy::LowestId;
        let v = p(&[2, 1]);
        assert_eq!(
            payoff_at(&SecondPrice, &v, &p(&[2, 1]), &lo, 0).unwrap(),
            r(1)
        );
        assert_eq!(
            payoff_at(&SecondPrice, &v, &p(&[2, 1]), &lo, 1).unwrap(),
            r(0)
        );
        assert_eq!(
            payoff_at(&SecondPrice, &v, &p(&[0, 1]), &lo, 0).unwrap(),
            r(0)
        );
        assert_eq!(
            payoff_at(&SecondPrice, &v, &p(&[0, 1, 2]), &lo, 0).unwrap_err(),
            DomainError::ParticipantMismatch
        );
    }

    #[test]
    fn efficiency_examples() {
        let set3 = ParticipantSet::range(3).unwrap();
        let set2 = ParticipantSet::range(2).unwrap();
        let win = |s: &ParticipantSet, w| Allocation::single_winner(s.clone(), w).unwrap();
        assert!(is_efficient(&p(&[3, 1, 2]), &win(&set3, 0)).unwrap());
        assert!(!is_efficient(&p(&[3, 1, 2]), &win(&set3, 1)).unwrap());
        assert!(is_efficient(&p(&[2, 2]), &win(&set2, 1)).unwrap());
        let nobody = Allocation::from_flags(set2, vec![0, 0]).unwrap();
        assert!(!is_efficient(&p(&[2, 2]), &nobody).unwrap());
    }

    #[test]
    fn first_price_examples() {
        let lo = TieBreakPolicy::LowestId;
        let o = first_price_outcome(&p(&[3, 1]), &lo);
        assert_eq!(
            (o.winner(), o.payments().to_string()),
            (Some(0), "3,0".into())
        );
        let o = first_price_outcome(&p(&[2, 2]), &lo);
        assert_eq!(
            (o.winner(), o.payments().to_string()),
            (Some(0), "2,0".into())
        );
        let o = first_price_outcome(&p(&[0, 1]), &lo);
        assert_eq!(
            (o.winner(), o.payments().to_string()),
            (Some(1), "0,1".into())
        );
        assert!(is_first_price_outcome(&p(&[0, 1]), &o).unwrap());
        assert!(!is_second_price_outcome(&p(&[0, 1]), &o).unwrap());
    }

    #[test]
    fn policies_pick_inside_the_tie() {
        let bids = p(&[4, 1, 4, 4]);
        let tied = bids.argmax_set();
        assert_eq!(TieBreakPolicy::LowestId.select(&tied, &bids), 0);
        assert_eq!(TieBreakPolicy::HighestId.select(&tied, &bids), 3);
        for seed in 0..64 {
            let policy = TieBreakPolicy::SeededPseudorandom(seed);
            let pick = policy.select(&tied, &bids);
            assert!(tied.contains(&pick));
            assert_eq!(pick, policy.select(&tied, &bids));
        }
    }

    #[test]
    fn seeded_policy_actually_varies() {
        let bids = p(&[1, 1, 1]);
        let tied = bids.argmax_set();
        let picks: std::collections::BTreeSet<_> = (0..64)
            .map(|s| TieBreakPolicy::SeededPseudorandom(s).select(&tied, &bids))
            .collect();
        assert_eq!(picks.len(), 3);
    }

    #[test]
    fn policy_names_round_trip() {
        for policy in [
            TieBreakPolicy::LowestId,
            TieBreakPolicy::HighestId,
            TieBreakPolicy::SeededPseudorandom(42),
        ] {
            assert_eq!(
                policy.to_string().parse::<TieBreakPolicy>().unwrap(),
                policy
            );
        }
        assert!("random".parse::<TieBreakPolicy>().is_err());
        assert!("seeded_pseudorandom(x)".parse::<TieBreakPolicy>().is_err());
    }

    #[test]
    fn rules_by_name() {
        assert_eq!(rule_by_name("second_price").unwrap().name(), "second_price");
        assert_eq!(rule_by_name("first_price").unwrap().name(), "first_price");
        assert!(rule_by_name("dutch").is_none());
    }
}
