//! Participant sets, exact rational quantities and profile vectors.
//!
//! A [`Profile`] is a total map from a [`ParticipantSet`] to nonnegative
//! [`Rational`]s. Bids and valuations are profiles; the maximum,
//! maximum-except and argmax operators used by the auction rules live here.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{DomainError, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
///
/// Always kept in canonical form (reduced, positive denominator), so
/// structural equality is value equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `numer / denom`. Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Option<Self> {
        if denom.is_zero() {
            None
        } else {
            Some(Rational(BigRational::new(numer, denom)))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = DomainError;

    /// Accepts `"p/q"` or a bare integer, surrounding whitespace ignored.
    fn from_str(s: &str) -> Result<Self> {
        let malformed = || DomainError::MalformedRational(s.to_string());
        let text = s.trim();
        let parse_int = |t: &str| -> Result<BigInt> {
            let t = t.trim();
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            t.parse::<BigInt>().map_err(|_| malformed())
        };
        match text.split_once('/') {
            Some((n, d)) => {
                let numer = parse_int(n)?;
                let denom = parse_int(d)?;
                Rational::from_big(numer, denom).ok_or_else(malformed)
            }
            None => Ok(Rational(BigRational::from_integer(parse_int(text)?))),
        }
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

/// Finite ordered set of participant ids with at least two members.
///
/// Cloning is cheap; the ids are shared.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParticipantSet {
    ids: Arc<[usize]>,
}

impl ParticipantSet {
    /// The contiguous set `{0, .., n-1}`.
    pub fn range(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    /// Builds a set from arbitrary distinct ids; they are sorted ascending.
    pub fn new(mut ids: Vec<usize>) -> Result<Self> {
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(DomainError::DuplicateParticipant(w[0]));
        }
        if ids.len() < 2 {
            return Err(DomainError::TooFewParticipants(ids.len()));
        }
        Ok(ParticipantSet { ids: ids.into() })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Always false: the set holds at least two ids.
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn contains(&self, id: usize) -> bool {
        self.position(id).is_some()
    }

    /// Position of `id` in ascending order.
    pub fn position(&self, id: usize) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub(crate) fn require_position(&self, id: usize) -> Result<usize> {
        self.position(id).ok_or(DomainError::UnknownParticipant(id))
    }
}

impl fmt::Debug for ParticipantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ids.iter()).finish()
    }
}

/// Nonnegative rational entry per participant (a bid or valuation vector).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Profile {
    participants: ParticipantSet,
    entries: Vec<Rational>,
}

impl Profile {
    /// Entries are given in ascending id order.
    pub fn new(participants: ParticipantSet, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != participants.len() {
            return Err(DomainError::LengthMismatch {
                expected: participants.len(),
                actual: entries.len(),
            });
        }
        if let Some((pos, value)) = entries.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(DomainError::NegativeEntry {
                id: participants.ids()[pos],
                value: value.to_string(),
            });
        }
        Ok(Profile {
            participants,
            entries,
        })
    }

    /// Profile over `{0, .., n-1}` where `n = entries.len()`.
    pub fn from_entries(entries: Vec<Rational>) -> Result<Self> {
        Self::new(ParticipantSet::range(entries.len())?, entries)
    }

    /// Integer-valued profile over `{0, .., n-1}`.
    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::from_entries(values.iter().map(|&v| Rational::from_integer(v)).collect())
    }

    pub fn participants(&self) -> &ParticipantSet {
        &self.participants
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending id order.
    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, id: usize) -> Result<&Rational> {
        Ok(&self.entries[self.participants.require_position(id)?])
    }

    /// `(id, value)` pairs in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.participants
            .ids()
            .iter()
            .copied()
            .zip(self.entries.iter())
    }

    /// Largest entry.
    pub fn maximum(&self) -> &Rational {
        self.entries
            .iter()
            .max()
            .expect("participant sets hold at least two ids")
    }

    /// Largest entry among all participants other than `id`.
    pub fn maximum_except(&self, id: usize) -> Result<&Rational> {
        let skip = self.participants.require_position(id)?;
        Ok(self.maximum_except_position(skip))
    }

    pub(crate) fn maximum_except_position(&self, skip: usize) -> &Rational {
        self.entries
            .iter()
            .enumerate()
            .filter(|&(pos, _)| pos != skip)
            .map(|(_, v)| v)
            .max()
            .expect("participant sets hold at least two ids")
    }

    /// Ids whose entry equals the maximum, ascending.
    pub fn argmax_set(&self) -> Vec<usize> {
        let top = self.maximum();
        self.iter()
            .filter(|(_, v)| *v == top)
            .map(|(id, _)| id)
            .collect()
    }

    /// Copy of the profile with participant `id`'s entry replaced by `value`.
    pub fn deviation(&self, id: usize, value: Rational) -> Result<Profile> {
        let pos = self.participants.require_position(id)?;
        if value.is_negative() {
            return Err(DomainError::NegativeEntry {
                id,
                value: value.to_string(),
            });
        }
        let mut entries = self.entries.clone();
        entries[pos] = value;
        Ok(Profile {
            participants: self.participants.clone(),
            entries,
        })
    }

    /// Parses a comma-separated list over `participants`, ascending id order.
    pub fn parse(participants: ParticipantSet, text: &str) -> Result<Self> {
        Self::new(participants, parse_rational_list(text)?)
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Result<Profile> {
        Profile::new(
            self.participants.clone(),
            self.entries.iter().map(|v| v * factor).collect(),
        )
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, self.entries.iter())
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({self})")
    }
}

/// Largest entry of `y`.
pub fn maximum(y: &Profile) -> &Rational {
    y.maximum()
}

/// Largest entry of `y` over every participant except `id`.
pub fn maximum_except(y: &Profile, id: usize) -> Result<&Rational> {
    y.maximum_except(id)
}

/// Participants whose bid equals the maximum bid.
pub fn argmax_set(b: &Profile) -> Vec<usize> {
    b.argmax_set()
}

/// `y` with participant `id`'s entry replaced by `z`.
pub fn deviation(y: &Profile, id: usize, z: Rational) -> Result<Profile> {
    y.deviation(id, z)
}

/// Parses `"a, b, c"` into rationals. Empty input is an empty list.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(str::parse).collect()
}

pub(crate) fn write_list<'a, T: fmt::Display + 'a>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = &'a T>,
) -> fmt::Result {
    for (k, item) in items.enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}
