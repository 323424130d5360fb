//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pltl_teach::formula::Formula;
use pltl_teach::semantics::Demonstration;
use teach_harness::check::{
    check_near_optimality, check_semantics, check_solver_equivalence, check_worked_example,
    check_zeta, length_bound_violations, record_demos, run_worked_example, CheckOutcome,
};
use teach_harness::config::{MethodChoice, PreferenceChoice};
use teach_harness::experiment::{compare, Comparison, World};
use teach_harness::suites::{timing_method_name, TIMEOUT};
use teach_harness::{run_suite, ExperimentConfig, ExperimentReport, Suite, SuiteOptions};

const SEED: u64 = 2024;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    ExperimentConfig::load(&path).expect("shipped config loads")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let started = Instant::now();
    let out = f();
    (out, started.elapsed())
}

/// Appends the runtime to the detail and fails the outcome past `limit`.
fn within(mut outcome: CheckOutcome, took: Duration, limit: Duration) -> CheckOutcome {
    outcome.detail = format!(
        "{} [{:.1} s, limit {} s]",
        outcome.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    outcome.passed &= took <= limit;
    outcome
}

fn suite_preference(suite: &str) -> PreferenceChoice {
    match suite {
        "positive_only" => PreferenceChoice::Implication,
        "adaptive_vs_nonadaptive" => PreferenceChoice::NoisyLocal,
        "oracle_vs_plain" => PreferenceChoice::Local,
        _ => PreferenceChoice::Uniform,
    }
}

/// Recorded demonstrations of a report, grouped with the hypothesis list and
/// target they were taught against.
fn report_demos(
    cfg: &ExperimentConfig,
    report: &ExperimentReport,
) -> Vec<(Vec<Formula>, Formula, Vec<Demonstration>)> {
    let mut worlds: Vec<(u32, World)> = Vec::new();
    let mut out = Vec::new();
    for rec in &report.rows {
        if !worlds.iter().any(|(a, _)| *a == rec.a) {
            let world =
                World::build(cfg, rec.a, suite_preference(&rec.suite)).expect("world builds");
            worlds.push((rec.a, world));
        }
        let world = &worlds
            .iter()
            .find(|(a, _)| *a == rec.a)
            .expect("just built")
            .1;
        let target: Formula = rec.target.parse().expect("recorded target parses");
        out.push((world.grid.formulas.clone(), target, record_demos(rec)));
    }
    out
}

fn an(c: &Comparison) -> (f64, f64) {
    (
        c.base_an.unwrap_or(f64::NAN),
        c.other_an.unwrap_or(f64::NAN),
    )
}

fn al(c: &Comparison) -> (f64, f64) {
    (
        c.base_al.unwrap_or(f64::NAN),
        c.other_al.unwrap_or(f64::NAN),
    )
}

/// `lhs <= rhs` on paired means; an empty pairing fails.
fn at_most((lhs, rhs): (f64, f64)) -> bool {
    lhs <= rhs
}

fn flip((a, b): (f64, f64)) -> (f64, f64) {
    (b, a)
}

/// The global-uniform direction checks for one report.
fn global_trend(report: &ExperimentReport, grid: &[u32]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for &a in grid {
        let c = |base: &str, other: &str| compare(&report.rows, "global_uniform", a, base, other);
        let an_al = c("AN-TLIP", "AL-TLIP");
        let an_rg = c("AN-TLIP", "AN-RG");
        let al_rg = c("AL-TLIP", "AL-RG");
        let checks = [
            at_most(an(&an_al)),
            at_most(an(&an_rg)),
            at_most(flip(al(&an_al))),
            at_most(al(&al_rg)),
        ];
        let paired = an_al.pairs > 0 && an_rg.pairs > 0 && al_rg.pairs > 0;
        ok &= paired && checks.iter().all(|&x| x);
        parts.push(format!(
            "a={a}: AN {:.2} vs AL-TLIP {:.2} / AN-RG {:.2}; AL {:.2} vs AN-TLIP {:.2} / AL-RG {:.2} (pairs {}, {}, {})",
            an(&an_al).0,
            an(&an_al).1,
            an(&an_rg).1,
            al(&an_al).1,
            al(&an_al).0,
            al(&al_rg).1,
            an_al.pairs,
            an_rg.pairs,
            al_rg.pairs
        ));
    }
    (ok, parts.join("; "))
}

fn pct(base: f64, other: f64) -> f64 {
    (other - base) / base * 100.0
}

/// `other <= base` on both costs for every pairing of a two-way suite.
fn pairwise_trend(
    report: &ExperimentReport,
    suite: &str,
    grid: &[u32],
    pairs: &[(&str, &str)],
) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for &a in grid {
        for (base, other) in pairs {
            let c = compare(&report.rows, suite, a, base, other);
            let good = at_most(flip(an(&c))) && at_most(flip(al(&c))) && c.pairs > 0;
            ok &= good;
            parts.push(format!(
                "a={a} {other} vs {base}: AN {:+.1}%, AL {:+.1}% over {} pairs",
                pct(an(&c).0, an(&c).1),
                pct(al(&c).0, al(&c).1),
                c.pairs
            ));
        }
    }
    (ok, parts.join("; "))
}

fn main() -> ExitCode {
    let mut outcomes: Vec<(u8, CheckOutcome)> = Vec::new();
    let mut demo_sets: Vec<(Vec<Formula>, Formula, Vec<Demonstration>)> = Vec::new();

    // 1. Worked example.
    let (worked, took) = timed(run_worked_example);
    match worked {
        Ok(res) => {
            outcomes.push((
                1,
                within(check_worked_example(&res), took, Duration::from_secs(5)),
            ));
            for (hyps, t) in &res.transcripts {
                demo_sets.push((
                    hyps.formulas().to_vec(),
                    hyps.target_formula().clone(),
                    t.demos.clone(),
                ));
            }
        }
        Err(e) => outcomes.push((1, CheckOutcome::new("worked example", false, e))),
    }

    // 2. Minimal lengths.
    let (zeta, took) = timed(|| check_zeta(SEED, 1000));
    outcomes.push((2, within(zeta, took, Duration::from_secs(60))));

    // 3. Solver against exhaustive enumeration.
    let (solver, took) = timed(|| check_solver_equivalence(SEED, 200));
    outcomes.push((3, within(solver, took, Duration::from_secs(5 * 60))));

    // 5 and 6 are independent of the suites; 4 needs every run's demos.
    let ((bound, _), bound_took) = timed(|| check_near_optimality(SEED, 50));
    let (semantics, semantics_took) = timed(|| check_semantics(SEED, 10_000));

    // 7. Numeric suites.
    let numeric = config("numeric.toml");
    let opts = SuiteOptions::default();
    let (suites, took) = timed(|| {
        [
            Suite::GlobalUniform,
            Suite::PositiveOnly,
            Suite::AdaptiveVsNonadaptive,
            Suite::OracleVsPlain,
        ]
        .map(|s| run_suite(s, &numeric, &opts).expect("suite runs"))
    });
    let [global, positive, adaptive, oracle] = &suites;
    let grid = &numeric.a;
    let limit = Duration::from_secs(30 * 60);
    let (ok, detail) = global_trend(global, grid);
    outcomes.push((
        7,
        within(
            CheckOutcome::new("(a) global-uniform trend", ok, detail),
            took,
            limit,
        ),
    ));
    let positive_runs: Vec<_> = positive
        .rows
        .iter()
        .filter(|r| r.method.ends_with("-positive"))
        .collect();
    let done = positive_runs.iter().filter(|r| r.completed).count();
    let (mut ok, mut detail) = (
        done == positive_runs.len(),
        format!(
            "{done}/{} positive-only sessions completed",
            positive_runs.len()
        ),
    );
    for &a in grid {
        for (base, other) in [
            ("AN-TLIP", "AN-TLIP-positive"),
            ("AL-TLIP", "AL-TLIP-positive"),
        ] {
            let c = compare(&positive.rows, "positive_only", a, base, other);
            let (dn, dl) = (pct(an(&c).0, an(&c).1), pct(al(&c).0, al(&c).1));
            ok &= c.pairs > 0 && dn <= 50.0 && dl <= 50.0;
            detail.push_str(&format!("; a={a} {other}: AN {dn:+.1}%, AL {dl:+.1}%"));
        }
    }
    outcomes.push((
        7,
        within(
            CheckOutcome::new("(b) positive-only completion and inflation", ok, detail),
            took,
            limit,
        ),
    ));
    let (ok, detail) = pairwise_trend(
        adaptive,
        "adaptive_vs_nonadaptive",
        grid,
        &[
            ("AN-TLIP-nonadaptive", "AN-TLIP"),
            ("AL-TLIP-nonadaptive", "AL-TLIP"),
        ],
    );
    outcomes.push((
        7,
        within(
            CheckOutcome::new("(c) noisy-local adaptive <= non-adaptive", ok, detail),
            took,
            limit,
        ),
    ));
    let (ok, detail) = pairwise_trend(
        oracle,
        "oracle_vs_plain",
        grid,
        &[("AN-TLIP", "AN-TLIP-oracle"), ("AL-TLIP", "AL-TLIP-oracle")],
    );
    outcomes.push((
        7,
        within(
            CheckOutcome::new("(d) oracle <= plain adaptive", ok, detail),
            took,
            limit,
        ),
    ));
    for report in &suites {
        demo_sets.extend(report_demos(&numeric, report));
    }

    // 8. Timing in short mode.
    let timing = run_suite(
        Suite::Timing,
        &numeric,
        &SuiteOptions {
            short: true,
            export_lp: None,
        },
    )
    .expect("timing runs");
    let rows = |name: String| timing.rows.iter().filter(move |r| r.method == name);
    let tlip15: Vec<_> = rows(timing_method_name(MethodChoice::Tlip, 15)).collect();
    let esmt5: Vec<_> = rows(timing_method_name(MethodChoice::Esmt, 5)).collect();
    let esmt10: Vec<_> = rows(timing_method_name(MethodChoice::Esmt, 10)).collect();
    let slowest = tlip15.iter().map(|r| r.solver_ms).fold(0.0, f64::max);
    let tlip_ok =
        !tlip15.is_empty() && tlip15.iter().all(|r| r.completed && r.solver_ms < 60_000.0);
    let esmt5_ok = !esmt5.is_empty() && esmt5.iter().all(|r| r.completed);
    let timeouts = esmt10
        .iter()
        .filter(|r| r.error.as_deref() == Some(TIMEOUT))
        .count();
    outcomes.push((8, CheckOutcome::new(
        "timing",
        tlip_ok && esmt5_ok && !esmt10.is_empty() && timeouts == esmt10.len(),
        format!(
            "TLIP@L15 {}/{} completed, slowest step {:.0} ms; ESMT@L5 {}/{} completed; ESMT@L10 {timeouts}/{} timed out",
            tlip15.iter().filter(|r| r.completed).count(),
            tlip15.len(),
            slowest,
            esmt5.iter().filter(|r| r.completed).count(),
            esmt5.len(),
            esmt10.len()
        ),
    )));
    demo_sets.extend(report_demos(&numeric, &timing));

    // 9. Gridworld case study.
    let gridworld = config("gridworld.toml");
    let grid_report =
        run_suite(Suite::GlobalUniform, &gridworld, &opts).expect("gridworld suite runs");
    let world = World::build(&gridworld, gridworld.a[0], PreferenceChoice::Uniform)
        .expect("gridworld builds");
    let grid_sets = report_demos(&gridworld, &grid_report);
    let total: usize = grid_sets.iter().map(|(_, _, d)| d.len()).sum();
    let invalid: usize = grid_sets
        .iter()
        .flat_map(|(_, _, d)| d)
        .filter(|d| !world.domain.valid_trajectory(&d.trajectory))
        .count();
    let (trend, detail) = global_trend(&grid_report, &gridworld.a);
    outcomes.push((
        9,
        CheckOutcome::new(
            "gridworld transitions and trend",
            invalid == 0 && total > 0 && trend,
            format!("{invalid} of {total} demonstrations break the transitions; {detail}"),
        ),
    ));
    demo_sets.extend(grid_sets);

    // 4. Length bound over every demonstration above.
    let total: usize = demo_sets.iter().map(|(_, _, d)| d.len()).sum();
    let violations: Vec<String> = demo_sets
        .iter()
        .flat_map(|(formulas, target, demos)| length_bound_violations(formulas, target, demos))
        .collect();
    let detail = format!(
        "{} violations over {total} demonstrations{}",
        violations.len(),
        match violations.first() {
            Some(v) => format!("; first: {v}"),
            None => String::new(),
        }
    );
    outcomes.push((
        4,
        CheckOutcome::new("length bound", violations.is_empty() && total > 0, detail),
    ));
    outcomes.push((5, within(bound, bound_took, Duration::from_secs(10 * 60))));
    outcomes.push((
        6,
        within(semantics, semantics_took, Duration::from_secs(60)),
    ));

    outcomes.sort_by_key(|(n, _)| *n);
    let mut failed = false;
    for (n, o) in &outcomes {
        println!("[{n}] {o}");
        failed |= !o.passed;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
