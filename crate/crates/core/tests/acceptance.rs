//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the summary prints in
//! order; exits non-zero if any criterion fails.

mod common;

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use vickrey_check::{
    argmax_set, conforming_outcomes, is_second_price_outcome, payoff_at, run_lemma_suite_with,
    second_price_outcome, BidGrid, FirstPrice, Profile, SecondPrice, TieBreakPolicy, Verifier,
    WitnessKind,
};

const SEED: u64 = 42;
const DOMINANCE_BUDGET: Duration = Duration::from_secs(60);
const EFFICIENCY_BUDGET: Duration = Duration::from_secs(5);

fn policies() -> [TieBreakPolicy; 3] {
    [
        TieBreakPolicy::LowestId,
        TieBreakPolicy::HighestId,
        TieBreakPolicy::SeededPseudorandom(SEED),
    ]
}

fn half_grid() -> BidGrid {
    BidGrid::parse("0, 1/2, 1, 3/2, 2").unwrap()
}

fn small_grid() -> BidGrid {
    BidGrid::from_integers(&[0, 1, 2]).unwrap()
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything one full pass over criteria 1–6 produces.
struct Run {
    results: Vec<Outcome>,
    /// Concatenated report texts, compared byte-for-byte across runs.
    transcript: String,
    /// Verdict of every individual check, compared across worker counts.
    verdicts: Vec<bool>,
}

fn dominance(verifier: &Verifier, run: &mut Run) -> Outcome {
    let grid = half_grid();
    let mut failures = Vec::new();
    let mut slowest_n4 = Duration::ZERO;
    for n in 2..=4 {
        for policy in policies() {
            let started = Instant::now();
            let report = verifier.check_truthful_equilibrium(&SecondPrice, &grid, n, &policy);
            let elapsed = started.elapsed();
            if n == 4 {
                slowest_n4 = slowest_n4.max(elapsed);
            }
            writeln!(run.transcript, "{report}\n").unwrap();
            run.verdicts.push(report.holds());
            if !report.holds() {
                failures.push(format!("n={n} policy={policy}: {}", report.verdict));
            }
        }
    }
    // The time bound is stated for a single-threaded run.
    let in_budget = verifier.workers() > 1 || slowest_n4 < DOMINANCE_BUDGET;
    let detail = if failures.is_empty() {
        format!("9 sweeps hold; slowest n=4 sweep {:.2?}", slowest_n4)
    } else {
        failures.join("; ")
    };
    if !in_budget {
        return Outcome::new(
            false,
            format!("{detail}; n=4 exceeded {DOMINANCE_BUDGET:?}"),
        );
    }
    Outcome::new(failures.is_empty(), detail)
}

fn efficiency(verifier: &Verifier, run: &mut Run) -> Outcome {
    let grid = half_grid();
    let started = Instant::now();
    let mut failures = Vec::new();
    for n in 2..=4 {
        for policy in policies() {
            let report = verifier.check_efficiency_truthful(&SecondPrice, &grid, n, &policy);
            writeln!(run.transcript, "{report}\n").unwrap();
            run.verdicts.push(report.holds());
            if !report.holds() {
                failures.push(format!("n={n} policy={policy}: {}", report.verdict));
            }
        }
    }
    let elapsed = started.elapsed();
    if verifier.workers() == 1 && elapsed >= EFFICIENCY_BUDGET {
        return Outcome::new(false, format!("sweep took {elapsed:.2?}"));
    }
    if failures.is_empty() {
        Outcome::new(true, format!("9 sweeps hold in {elapsed:.2?}"))
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn negative_control(verifier: &Verifier, run: &mut Run) -> Outcome {
    let grid = small_grid();
    let mut problems = Vec::new();
    for policy in policies() {
        let report = verifier.check_truthful_equilibrium(&FirstPrice, &grid, 2, &policy);
        writeln!(run.transcript, "{report}\n").unwrap();
        run.verdicts.push(report.is_violated());
        let Some(cex) = report
            .counterexample
            .as_ref()
            .filter(|_| report.is_violated())
        else {
            problems.push(format!(
                "policy={policy}: expected a violation, got {}",
                report.verdict
            ));
            continue;
        };
        let i = cex.participant;
        let replay = |profile: &Profile| {
            payoff_at(&FirstPrice, &cex.valuations, profile, &policy, i).unwrap()
        };
        let (focal, deviant) = (replay(&cex.focal_profile), replay(&cex.profile));
        if !(deviant > focal) {
            problems.push(format!(
                "policy={policy}: replay gives {deviant} vs {focal}, not strict"
            ));
        }
        let recorded = cex
            .payoffs
            .as_ref()
            .map(|p| (p.focal.clone(), p.deviant.clone()));
        if recorded != Some((focal, deviant)) {
            problems.push(format!(
                "policy={policy}: recorded payoffs differ from replay"
            ));
        }
        // Minimality against the integer oracle (which knows lowest/highest only).
        let tie = match policy {
            TieBreakPolicy::LowestId => Some(common::Tie::Lowest),
            TieBreakPolicy::HighestId => Some(common::Tie::Highest),
            TieBreakPolicy::SeededPseudorandom(_) => None,
        };
        if let Some(tie) = tie {
            let (oracle, examined) = common::truthful(common::Rule::FirstPrice, &[0, 1, 2], 2, tie);
            let (v, o) = oracle.expect("oracle finds a first-price violation");
            let ours = (
                common::ints(&cex.valuations),
                cex.participant,
                common::ints(&cex.profile),
            );
            if ours != (v, o.i, o.deviation) || examined != report.profiles_examined {
                problems.push(format!(
                    "policy={policy}: counterexample is not the oracle's minimal one"
                ));
            }
        }
    }
    if problems.is_empty() {
        Outcome::new(
            true,
            "violated under all 3 policies; minimal witnesses replay strictly",
        )
    } else {
        Outcome::new(false, problems.join("; "))
    }
}

fn well_defined(verifier: &Verifier, run: &mut Run) -> Outcome {
    let grid = small_grid();
    let mut problems = Vec::new();
    for n in 2..=3 {
        let report = verifier.check_well_defined(&SecondPrice, &grid, n, &policies());
        writeln!(run.transcript, "{report}\n").unwrap();
        run.verdicts.push(report.holds());
        if !report.holds() {
            problems.push(format!("n={n}: {}", report.verdict));
        }
        if let Some(WitnessKind::ConformingCount { found, expected }) =
            report.counterexample.as_ref().map(|c| &c.kind)
        {
            problems.push(format!(
                "n={n}: {found} conforming outcomes, expected {expected}"
            ));
        }
    }
    if problems.is_empty() {
        Outcome::new(true, "n=2,3 hold under 3 policies with |conforming| = |M|")
    } else {
        Outcome::new(false, problems.join("; "))
    }
}

fn lemma_suite(workers: usize, run: &mut Run) -> Outcome {
    let grid = small_grid();
    let mut problems = Vec::new();
    for n in 2..=3 {
        for policy in policies() {
            let suite = match run_lemma_suite_with(&grid, n, &policy, workers) {
                Ok(s) => s,
                Err(e) => {
                    problems.push(format!("n={n} policy={policy}: {e}"));
                    continue;
                }
            };
            writeln!(run.transcript, "{suite}\n").unwrap();
            let covered: u64 = suite.case_counts.iter().sum();
            let vacuous = suite.vacuous();
            let ok = suite.failures() == 0
                && vacuous.is_empty()
                && suite.partition_violations == 0
                && covered == suite.triples;
            run.verdicts.push(ok);
            if suite.failures() > 0 {
                problems.push(format!(
                    "n={n} policy={policy}: {} failures",
                    suite.failures()
                ));
            }
            if !vacuous.is_empty() {
                problems.push(format!("n={n} policy={policy}: vacuous {vacuous:?}"));
            }
            if suite.partition_violations > 0 || covered != suite.triples {
                problems.push(format!(
                    "n={n} policy={policy}: cases do not partition the triples"
                ));
            }
        }
    }
    if problems.is_empty() {
        Outcome::new(
            true,
            "0 failures, 0 vacuous lemmas, cases 1a/1b/2a/2b partition all triples",
        )
    } else {
        Outcome::new(false, problems.join("; "))
    }
}

fn oracle_equivalence(run: &mut Run) -> Outcome {
    let grid = [0i64, 1, 2];
    let mut problems = Vec::new();
    let mut profiles = 0;
    for bids in common::all_profiles(&grid, 3) {
        profiles += 1;
        let b = Profile::from_integers(&bids).unwrap();
        let m = argmax_set(&b);
        for policy in policies() {
            let o = second_price_outcome(&b, &policy);
            if !is_second_price_outcome(&b, &o).unwrap() {
                problems.push(format!("{b} under {policy}: outcome fails the predicate"));
            }
        }
        // Independent enumeration over plain integers: every 0/1 allocation and
        // every payment vector drawn from {0} ∪ grid.
        let mut oracle_count = 0;
        for alloc in common::all_profiles(&[0, 1], 3) {
            let alloc: Vec<u8> = alloc.iter().map(|&x| x as u8).collect();
            for pay in common::all_profiles(&grid, 3) {
                if common::is_second_price(&bids, &alloc, &pay) {
                    oracle_count += 1;
                }
            }
        }
        let ours = conforming_outcomes(&SecondPrice, &b).unwrap();
        writeln!(
            run.transcript,
            "{b}: |M|={} oracle={oracle_count} enumerated={}",
            m.len(),
            ours.len()
        )
        .unwrap();
        if oracle_count != m.len() || ours.len() != m.len() {
            problems.push(format!(
                "{b}: |M|={} but oracle found {oracle_count}, enumeration {}",
                m.len(),
                ours.len()
            ));
        }
        for o in &ours {
            let flags = o.allocation().flags().to_vec();
            let pay: Vec<i64> = o.payments().entries().iter().map(common::int).collect();
            if !common::is_second_price(&bids, &flags, &pay) {
                problems.push(format!("{b}: enumerated outcome rejected by the oracle"));
            }
        }
    }
    run.verdicts.push(problems.is_empty());
    if problems.is_empty() {
        Outcome::new(
            true,
            format!("{profiles} profiles agree with the integer oracle"),
        )
    } else {
        Outcome::new(false, problems.join("; "))
    }
}

fn full_run(workers: usize) -> Run {
    let verifier = Verifier::with_workers(workers);
    let mut run = Run {
        results: Vec::new(),
        transcript: String::new(),
        verdicts: Vec::new(),
    };
    let r1 = dominance(&verifier, &mut run);
    let r2 = efficiency(&verifier, &mut run);
    let r3 = negative_control(&verifier, &mut run);
    let r4 = well_defined(&verifier, &mut run);
    let r5 = lemma_suite(workers, &mut run);
    let r6 = oracle_equivalence(&mut run);
    run.results = vec![r1, r2, r3, r4, r5, r6];
    run
}

fn determinism(first: &Run, second: &Run, parallel: &Run) -> Outcome {
    let mut problems = Vec::new();
    if first.transcript != second.transcript {
        problems.push("two single-worker runs differ".to_string());
    }
    if first.transcript != parallel.transcript {
        problems.push("1-worker and 4-worker reports differ".to_string());
    }
    if first.verdicts != parallel.verdicts {
        problems.push("verdicts depend on worker count".to_string());
    }
    if problems.is_empty() {
        Outcome::new(
            true,
            format!(
                "{} bytes of reports identical across 2 runs and workers {{1, 4}}",
                first.transcript.len()
            ),
        )
    } else {
        Outcome::new(false, problems.join("; "))
    }
}

const TITLES: [&str; 7] = [
    "second-price truthful bidding is weakly dominant (n=2..4, grid 0..2 step 1/2)",
    "second-price truthful outcome is efficient (same sweep)",
    "first-price truthful bidding has a replayable counterexample",
    "second-price outcome is well-defined with |M| conforming outcomes",
    "case-analysis lemmas all pass, none vacuous, cases partition",
    "outcome and predicate agree with an independent oracle (n=3)",
    "reports are byte-identical across runs and worker counts",
];

fn main() -> ExitCode {
    let first = full_run(1);
    let second = full_run(1);
    let parallel = full_run(4);

    let mut outcomes: Vec<&Outcome> = first.results.iter().collect();
    let det = determinism(&first, &second, &parallel);
    outcomes.push(&det);

    let mut all_passed = true;
    for (k, (outcome, title)) in outcomes.iter().zip(TITLES).enumerate() {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        all_passed &= outcome.passed;
        println!("[{tag}] criterion {}: {title} — {}", k + 1, outcome.detail);
    }
    // Sanity: the other runs must agree on pass/fail too.
    for run in [&second, &parallel] {
        for (k, (a, b)) in first.results.iter().zip(&run.results).enumerate() {
            if a.passed != b.passed {
                println!("[FAIL] criterion {}: result differs between runs", k + 1);
                all_passed = false;
            }
        }
    }
    if all_passed {
        println!("acceptance: all 7 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
