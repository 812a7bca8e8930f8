//! Brute-force reference implementations on plain integers.
//!
//! Written directly from the auction definitions and kept free of the
//! crate's types so they can check it independently.

#![allow(dead_code)]

use vickrey_check::{Profile, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    SecondPrice,
    FirstPrice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tie {
    Lowest,
    Highest,
}

/// Winner and payment vector.
pub fn outcome(rule: Rule, bids: &[i64], tie: Tie) -> (usize, Vec<i64>) {
    let top = *bids.iter().max().unwrap();
    let tied: Vec<usize> = (0..bids.len()).filter(|&j| bids[j] == top).collect();
    let winner = match tie {
        Tie::Lowest => tied[0],
        Tie::Highest => *tied.last().unwrap(),
    };
    let mut pay = vec![0; bids.len()];
    pay[winner] = match rule {
        Rule::SecondPrice => (0..bids.len())
            .filter(|&j| j != winner)
            .map(|j| bids[j])
            .max()
            .unwrap(),
        Rule::FirstPrice => bids[winner],
    };
    (winner, pay)
}

pub fn payoff(rule: Rule, v: &[i64], bids: &[i64], tie: Tie, i: usize) -> i64 {
    let (winner, pay) = outcome(rule, bids, tie);
    let award = if winner == i { v[i] } else { 0 };
    award - pay[i]
}

/// Every vector in `gridⁿ`, lexicographic with index 0 most significant.
pub fn all_profiles(grid: &[i64], n: usize) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for &first in grid {
        for rest in all_profiles(grid, n - 1) {
            let mut p = vec![first];
            p.extend(rest);
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cex {
    pub i: usize,
    pub deviation: Vec<i64>,
    pub focal: Vec<i64>,
    pub u_focal: i64,
    pub u_deviant: i64,
}

/// First violation of "bidding b_i is weakly dominant" in (i, b̂) order,
/// and the number of comparisons made up to it (or in total).
pub fn dominance(rule: Rule, v: &[i64], b: &[i64], grid: &[i64], tie: Tie) -> (Option<Cex>, u64) {
    let n = v.len();
    let mut compared = 0;
    for i in 0..n {
        for dev in all_profiles(grid, n) {
            if dev[i] == b[i] {
                continue;
            }
            compared += 1;
            let mut focal = dev.clone();
            focal[i] = b[i];
            let u_focal = payoff(rule, v, &focal, tie, i);
            let u_deviant = payoff(rule, v, &dev, tie, i);
            if u_deviant > u_focal {
                return (
                    Some(Cex {
                        i,
                        deviation: dev,
                        focal,
                        u_focal,
                        u_deviant,
                    }),
                    compared,
                );
            }
        }
    }
    (None, compared)
}

/// Truthful sweep: first valuation profile whose truthful bid is not dominant.
pub fn truthful(rule: Rule, grid: &[i64], n: usize, tie: Tie) -> (Option<(Vec<i64>, Cex)>, u64) {
    let mut total = 0;
    for v in all_profiles(grid, n) {
        let (cex, compared) = dominance(rule, &v, &v, grid, tie);
        total += compared;
        if let Some(cex) = cex {
            return (Some((v, cex)), total);
        }
    }
    (None, total)
}

/// The second-price conditions on an explicit (allocation, payments) pair.
pub fn is_second_price(bids: &[i64], alloc: &[u8], pay: &[i64]) -> bool {
    let top = *bids.iter().max().unwrap();
    let n = bids.len();
    (0..n).any(|i| {
        bids[i] == top
            && alloc[i] == 1
            && pay[i] == (0..n).filter(|&j| j != i).map(|j| bids[j]).max().unwrap()
            && (0..n)
                .filter(|&j| j != i)
                .all(|j| alloc[j] == 0 && pay[j] == 0)
    })
}

pub fn ints(p: &Profile) -> Vec<i64> {
    p.entries()
        .iter()
        .map(|r| r.to_string().parse().unwrap())
        .collect()
}

pub fn int(r: &Rational) -> i64 {
    r.to_string().parse().unwrap()
}
