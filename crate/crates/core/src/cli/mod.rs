//! Scenario files and the command runner behind the `vickrey-check` binary.
//!
//! Exit codes: 0 when the property holds (or an outcome was computed),
//! 1 for a counterexample or lemma failure, 2 for input errors.

mod scenario;

pub use scenario::{
    parse_scenario, PolicyName, RuleName, ScenarioError, ScenarioErrorKind, ScenarioFile,
};

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::auction::{rule_by_name, AuctionRule, TieBreakPolicy};
use crate::lemmas::run_lemma_suite_with;
use crate::verifier::{DominanceScenario, PropertyReport, Verdict, Verifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Outcome,
    CheckDominance,
    CheckEfficiency,
    CheckWellDefined,
    Lemmas,
    FindCex,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Outcome,
        Command::CheckDominance,
        Command::CheckEfficiency,
        Command::CheckWellDefined,
        Command::Lemmas,
        Command::FindCex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Outcome => "outcome",
            Command::CheckDominance => "check-dominance",
            Command::CheckEfficiency => "check-efficiency",
            Command::CheckWellDefined => "check-well-defined",
            Command::Lemmas => "lemmas",
            Command::FindCex => "find-cex",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown command {0:?}")]
pub struct UnknownCommand(pub String);

impl FromStr for Command {
    type Err = UnknownCommand;

    fn from_str(s: &str) -> Result<Self, UnknownCommand> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| UnknownCommand(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Violation = 1,
    InputError = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn of(report: &PropertyReport) -> Self {
        match report.verdict {
            Verdict::Holds => ExitStatus::Success,
            Verdict::Violated => ExitStatus::Violation,
            Verdict::DomainError(_) => ExitStatus::InputError,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Overrides the scenario file's seed.
    pub seed: Option<u64>,
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: None,
            workers: 1,
        }
    }
}

/// Runs `command` on `scenario`, writing the report to `out` and any
/// diagnostic to `err`.
pub fn run_command(
    command: Command,
    scenario: &ScenarioFile,
    options: RunOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<ExitStatus> {
    let input_error = |err: &mut dyn Write, msg: &str| -> io::Result<ExitStatus> {
        writeln!(err, "error: {msg}")?;
        Ok(ExitStatus::InputError)
    };

    let Some(policy) = scenario.policy(options.seed) else {
        return input_error(
            err,
            "seeded_pseudorandom needs a seed (seed = <u64> or --seed)",
        );
    };
    let rule = rule_by_name(scenario.auction.as_str()).expect("parsed rule names are built in");
    let verifier = Verifier::with_workers(options.workers);
    let n = scenario.participants;

    let status = match command {
        Command::Outcome => {
            let Some(bids) = scenario.bids.as_ref().or(scenario.valuations.as_ref()) else {
                return input_error(err, "outcome needs `bids` (or `valuations`)");
            };
            writeln!(out, "{}", rule.outcome(bids, &policy))?;
            ExitStatus::Success
        }
        Command::CheckDominance => {
            let report = match dominance_scenario(scenario, &rule, policy) {
                Some(s) => verifier.check_weak_dominance(&s),
                None => {
                    verifier.check_truthful_equilibrium(rule.as_ref(), &scenario.grid, n, &policy)
                }
            };
            writeln!(out, "{report}")?;
            ExitStatus::of(&report)
        }
        Command::CheckEfficiency => {
            let report =
                verifier.check_efficiency_truthful(rule.as_ref(), &scenario.grid, n, &policy);
            writeln!(out, "{report}")?;
            ExitStatus::of(&report)
        }
        Command::CheckWellDefined => {
            let mut policies = vec![TieBreakPolicy::LowestId, TieBreakPolicy::HighestId];
            if !policies.contains(&policy) {
                policies.push(policy);
            }
            let report = verifier.check_well_defined(rule.as_ref(), &scenario.grid, n, &policies);
            writeln!(out, "{report}")?;
            ExitStatus::of(&report)
        }
        Command::Lemmas => {
            if scenario.auction != RuleName::SecondPrice {
                return input_error(err, "the lemma suite applies to second_price only");
            }
            match run_lemma_suite_with(&scenario.grid, n, &policy, options.workers) {
                Ok(suite) => {
                    writeln!(out, "{suite}")?;
                    if suite.passed() {
                        ExitStatus::Success
                    } else {
                        ExitStatus::Violation
                    }
                }
                Err(e) => return input_error(err, &e.to_string()),
            }
        }
        Command::FindCex => {
            let report = match dominance_scenario(scenario, &rule, policy) {
                Some(s) => verifier.check_weak_dominance(&s),
                None => {
                    verifier.check_truthful_equilibrium(rule.as_ref(), &scenario.grid, n, &policy)
                }
            };
            if let Verdict::DomainError(msg) = &report.verdict {
                return input_error(err, msg);
            }
            match &report.counterexample {
                None => writeln!(out, "counterexample: none")?,
                Some(cex) => writeln!(out, "counterexample:\n{cex}")?,
            }
            ExitStatus::of(&report)
        }
    };
    if status == ExitStatus::InputError {
        writeln!(err, "error: input rejected by {command}")?;
    }
    Ok(status)
}

fn dominance_scenario(
    scenario: &ScenarioFile,
    rule: &std::sync::Arc<dyn AuctionRule>,
    policy: TieBreakPolicy,
) -> Option<DominanceScenario> {
    let valuations = scenario.valuations.clone()?;
    let bids = scenario.bids.clone().unwrap_or_else(|| valuations.clone());
    Some(DominanceScenario::new(
        rule.clone(),
        valuations,
        bids,
        scenario.grid.clone(),
        policy,
    ))
}
