//! Enumeration of `gridⁿ` and the worker pool used by the exhaustive checks.

use rayon::prelude::*;

use crate::error::{DomainError, Result};
use crate::vectors::{ParticipantSet, Profile};
use crate::verifier::BidGrid;

/// Upper bound on `|grid|ⁿ` for materialised profile spaces.
pub const MAX_PROFILES: usize = 1 << 24;

/// Lexicographic counter over `{0, .., base-1}ⁿ`; position 0 is the most
/// significant digit, so profiles come out in ascending id-major order.
#[derive(Debug, Clone)]
pub struct Odometer {
    digits: Vec<usize>,
    base: usize,
    done: bool,
}

impl Odometer {
    pub fn new(len: usize, base: usize) -> Self {
        Odometer {
            digits: vec![0; len],
            base,
            done: base == 0,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.digits.clone();
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.base {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(current)
    }
}

/// All profiles over a participant set with entries drawn from a grid,
/// addressed by their rank in odometer order.
#[derive(Debug, Clone)]
pub(crate) struct ProfileSpace {
    participants: ParticipantSet,
    grid: BidGrid,
    size: usize,
}

impl ProfileSpace {
    pub fn new(participants: ParticipantSet, grid: BidGrid) -> Result<Self> {
        let size = u32::try_from(participants.len())
            .ok()
            .and_then(|n| grid.len().checked_pow(n))
            .filter(|&s| s <= MAX_PROFILES)
            .ok_or_else(|| {
                DomainError::InvalidGrid(format!(
                    "{} values over {} participants exceeds {MAX_PROFILES} profiles",
                    grid.len(),
                    participants.len()
                ))
            })?;
        Ok(ProfileSpace {
            participants,
            grid,
            size,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of grid values.
    pub fn base(&self) -> usize {
        self.grid.len()
    }

    pub fn n(&self) -> usize {
        self.participants.len()
    }

    /// Weight of the digit at `pos` in a profile rank.
    pub fn stride(&self, pos: usize) -> usize {
        self.grid.len().pow((self.n() - 1 - pos) as u32)
    }

    pub fn digit(&self, rank: usize, pos: usize) -> usize {
        (rank / self.stride(pos)) % self.grid.len()
    }

    /// Rank of the profile equal to `rank` except at `pos`, where the digit is `digit`.
    pub fn with_digit(&self, rank: usize, pos: usize, digit: usize) -> usize {
        let stride = self.stride(pos);
        rank - self.digit(rank, pos) * stride + digit * stride
    }

    /// Grid digits of a profile, or an error naming the first off-grid entry.
    pub fn digits_of(&self, profile: &Profile) -> Result<Vec<usize>> {
        if profile.participants() != &self.participants {
            return Err(DomainError::ParticipantMismatch);
        }
        profile
            .iter()
            .map(|(id, value)| {
                self.grid
                    .index_of(value)
                    .ok_or_else(|| DomainError::OffGrid {
                        id,
                        value: value.to_string(),
                    })
            })
            .collect()
    }

    #[cfg(test)]
    pub fn rank_of(&self, profile: &Profile) -> Result<usize> {
        let digits = self.digits_of(profile)?;
        Ok(digits.iter().fold(0, |acc, d| acc * self.grid.len() + d))
    }

    /// Every profile, in rank order.
    pub fn profiles(&self) -> Vec<Profile> {
        Odometer::new(self.n(), self.grid.len())
            .map(|digits| {
                let entries = digits
                    .iter()
                    .map(|&d| self.grid.values()[d].clone())
                    .collect();
                Profile::new(self.participants.clone(), entries)
                    .expect("grid values are nonnegative")
            })
            .collect()
    }

    /// Number of ranks `r <= rank` whose digit at `pos` differs from `digit`.
    pub fn count_differing_upto(&self, rank: usize, pos: usize, digit: usize) -> usize {
        let stride = self.stride(pos);
        let period = stride * self.grid.len();
        let upto = rank + 1;
        let rem = upto % period;
        let same = (upto / period) * stride + rem.saturating_sub(digit * stride).min(stride);
        upto - same
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (at least one).
pub(crate) fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

/// First index in `0..len` (in index order) for which `probe` yields a value.
/// Deterministic for any worker count.
pub(crate) fn find_first<T: Send>(
    len: usize,
    probe: impl Fn(usize) -> Option<T> + Sync + Send,
) -> Option<(usize, T)> {
    (0..len)
        .into_par_iter()
        .with_min_len(64)
        .find_map_first(|k| probe(k).map(|t| (k, t)))
}
