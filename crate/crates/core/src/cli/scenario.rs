//! Line-oriented `key = value` scenario files.
//!
//! ```text
//! # comments start with '#'
//! auction = second_price
//! participants = 2
//! tie_break = lowest_id
//! grid = 0, 1/2, 1
//! valuations = 1, 1/2
//! ```
//!
//! `tie_break` accepts `lowest_id`, `highest_id`, `seeded_pseudorandom` or
//! `seeded_pseudorandom(<seed>)`; the seed may also be given as `seed = <u64>`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::auction::TieBreakPolicy;
use crate::error::DomainError;
use crate::vectors::{parse_rational_list, ParticipantSet, Profile, Rational};
use crate::verifier::BidGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleName {
    SecondPrice,
    FirstPrice,
}

impl RuleName {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::SecondPrice => "second_price",
            RuleName::FirstPrice => "first_price",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tie-break policy as named in a file; the seed is resolved separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PolicyName {
    #[default]
    LowestId,
    HighestId,
    SeededPseudorandom,
}

impl PolicyName {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyName::LowestId => "lowest_id",
            PolicyName::HighestId => "highest_id",
            PolicyName::SeededPseudorandom => "seeded_pseudorandom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioFile {
    pub auction: RuleName,
    pub participants: usize,
    pub tie_break: PolicyName,
    pub seed: Option<u64>,
    pub grid: BidGrid,
    pub valuations: Option<Profile>,
    pub bids: Option<Profile>,
}

impl ScenarioFile {
    pub fn participant_set(&self) -> ParticipantSet {
        ParticipantSet::range(self.participants).expect("validated at parse time")
    }

    /// Resolves the tie-break policy. A seed passed here overrides the file's.
    /// `None` when a seeded policy has no seed from either source.
    pub fn policy(&self, seed_override: Option<u64>) -> Option<TieBreakPolicy> {
        match self.tie_break {
            PolicyName::LowestId => Some(TieBreakPolicy::LowestId),
            PolicyName::HighestId => Some(TieBreakPolicy::HighestId),
            PolicyName::SeededPseudorandom => seed_override
                .or(self.seed)
                .map(TieBreakPolicy::SeededPseudorandom),
        }
    }
}

/// Serialises back to the file format; parsing the result gives `self`.
impl fmt::Display for ScenarioFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "auction = {}", self.auction)?;
        writeln!(f, "participants = {}", self.participants)?;
        writeln!(f, "tie_break = {}", self.tie_break.as_str())?;
        if let Some(seed) = self.seed {
            writeln!(f, "seed = {seed}")?;
        }
        writeln!(f, "grid = {}", self.grid)?;
        if let Some(v) = &self.valuations {
            writeln!(f, "valuations = {v}")?;
        }
        if let Some(b) = &self.bids {
            writeln!(f, "bids = {b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioErrorKind {
    #[error("expected `key = value`")]
    MalformedLine,
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("duplicate key")]
    DuplicateKey,
    #[error("missing required field")]
    MissingField,
    #[error("unknown auction rule {0:?} (expected second_price or first_price)")]
    UnknownRule(String),
    #[error("unknown tie-break policy {0:?}")]
    UnknownPolicy(String),
    #[error("malformed participant count {0:?}")]
    MalformedCount(String),
    #[error("participants must be ≥ 2")]
    TooFewParticipants,
    #[error("malformed seed {0:?}")]
    MalformedSeed(String),
    #[error("seed {0} conflicts with seed {1} given in tie_break")]
    ConflictingSeed(u64, u64),
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("grid must not be empty")]
    EmptyGrid,
    #[error("grid values must be nonnegative")]
    NegativeGridValue,
    #[error("grid values must be distinct ascending")]
    NonAscendingGrid,
    #[error("expected {expected} entries, got {actual}")]
    ProfileLength { expected: usize, actual: usize },
    #[error("value {0} is not on the grid")]
    ValueOffGrid(String),
}

/// First problem found in a scenario file. Line 0 means end of input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {field}: {kind}")]
pub struct ScenarioError {
    pub line: usize,
    pub field: String,
    pub kind: ScenarioErrorKind,
}

impl ScenarioError {
    fn new(line: usize, field: &str, kind: ScenarioErrorKind) -> Self {
        ScenarioError {
            line,
            field: field.to_string(),
            kind,
        }
    }
}

const KEYS: [&str; 7] = [
    "auction",
    "participants",
    "tie_break",
    "seed",
    "grid",
    "valuations",
    "bids",
];

fn parse_rationals(line: usize, field: &str, text: &str) -> Result<Vec<Rational>, ScenarioError> {
    parse_rational_list(text).map_err(|e| {
        let bad = match e {
            DomainError::MalformedRational(s) => s,
            other => other.to_string(),
        };
        ScenarioError::new(
            line,
            field,
            ScenarioErrorKind::MalformedRational(bad.trim().to_string()),
        )
    })
}

fn parse_policy(line: usize, text: &str) -> Result<(PolicyName, Option<u64>), ScenarioError> {
    let policy = match text {
        "lowest_id" => (PolicyName::LowestId, None),
        "highest_id" => (PolicyName::HighestId, None),
        "seeded_pseudorandom" => (PolicyName::SeededPseudorandom, None),
        other => match other.parse::<TieBreakPolicy>() {
            Ok(TieBreakPolicy::SeededPseudorandom(seed)) => {
                (PolicyName::SeededPseudorandom, Some(seed))
            }
            _ => {
                return Err(ScenarioError::new(
                    line,
                    "tie_break",
                    ScenarioErrorKind::UnknownPolicy(other.to_string()),
                ))
            }
        },
    };
    Ok(policy)
}

/// Parses and validates a scenario, reporting the first error by line and field.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut auction = None;
    let mut participants = None;
    let mut tie_break = None;
    let mut seed_key: Option<u64> = None;
    let mut grid = None;
    let mut valuations: Option<Vec<Rational>> = None;
    let mut bids: Option<Vec<Rational>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ScenarioError::new(
                line,
                content,
                ScenarioErrorKind::MalformedLine,
            ));
        };
        let key = key.trim();
        let value = value.trim();
        let Some(&key) = KEYS.iter().find(|&&k| k == key) else {
            return Err(ScenarioError::new(
                line,
                key,
                ScenarioErrorKind::UnknownKey(key.to_string()),
            ));
        };
        if seen.insert(key, line).is_some() {
            return Err(ScenarioError::new(
                line,
                key,
                ScenarioErrorKind::DuplicateKey,
            ));
        }
        match key {
            "auction" => {
                auction = Some(match value {
                    "second_price" => RuleName::SecondPrice,
                    "first_price" => RuleName::FirstPrice,
                    other => {
                        return Err(ScenarioError::new(
                            line,
                            key,
                            ScenarioErrorKind::UnknownRule(other.to_string()),
                        ))
                    }
                })
            }
            "participants" => {
                let n: usize = value.parse().map_err(|_| {
                    ScenarioError::new(
                        line,
                        key,
                        ScenarioErrorKind::MalformedCount(value.to_string()),
                    )
                })?;
                if n < 2 {
                    return Err(ScenarioError::new(
                        line,
                        key,
                        ScenarioErrorKind::TooFewParticipants,
                    ));
                }
                participants = Some(n);
            }
            "tie_break" => tie_break = Some(parse_policy(line, value)?),
            "seed" => {
                seed_key = Some(value.parse().map_err(|_| {
                    ScenarioError::new(
                        line,
                        key,
                        ScenarioErrorKind::MalformedSeed(value.to_string()),
                    )
                })?)
            }
            "grid" => {
                let values = parse_rationals(line, key, value)?;
                let kind = if values.is_empty() {
                    Some(ScenarioErrorKind::EmptyGrid)
                } else if values.iter().any(Rational::is_negative) {
                    Some(ScenarioErrorKind::NegativeGridValue)
                } else if values.windows(2).any(|w| w[0] >= w[1]) {
                    Some(ScenarioErrorKind::NonAscendingGrid)
                } else {
                    None
                };
                if let Some(kind) = kind {
                    return Err(ScenarioError::new(line, key, kind));
                }
                grid = Some(BidGrid::new(values).expect("checked above"));
            }
            "valuations" => valuations = Some(parse_rationals(line, key, value)?),
            "bids" => bids = Some(parse_rationals(line, key, value)?),
            _ => unreachable!("key list is closed"),
        }
    }

    let missing = |field: &str| ScenarioError::new(0, field, ScenarioErrorKind::MissingField);
    let auction = auction.ok_or_else(|| missing("auction"))?;
    let participants = participants.ok_or_else(|| missing("participants"))?;
    let grid = grid.ok_or_else(|| missing("grid"))?;
    let (tie_break, policy_seed) = tie_break.unwrap_or_default();
    let seed = match (policy_seed, seed_key) {
        (Some(a), Some(b)) if a != b => {
            return Err(ScenarioError::new(
                seen["seed"],
                "seed",
                ScenarioErrorKind::ConflictingSeed(b, a),
            ))
        }
        (a, b) => a.or(b),
    };

    let set = ParticipantSet::range(participants).expect("n >= 2 checked");
    let profile =
        |field: &str, entries: Option<Vec<Rational>>| -> Result<Option<Profile>, ScenarioError> {
            let Some(entries) = entries else {
                return Ok(None);
            };
            let line = seen[field];
            if entries.len() != participants {
                return Err(ScenarioError::new(
                    line,
                    field,
                    ScenarioErrorKind::ProfileLength {
                        expected: participants,
                        actual: entries.len(),
                    },
                ));
            }
            if let Some(off) = entries.iter().find(|v| !grid.contains(v)) {
                return Err(ScenarioError::new(
                    line,
                    field,
                    ScenarioErrorKind::ValueOffGrid(off.to_string()),
                ));
            }
            Ok(Some(
                Profile::new(set.clone(), entries).expect("grid values are nonnegative"),
            ))
        };
    let valuations = profile("valuations", valuations)?;
    let bids = profile("bids", bids)?;

    Ok(ScenarioFile {
        auction,
        participants,
        tie_break,
        seed,
        grid,
        valuations,
        bids,
    })
}
