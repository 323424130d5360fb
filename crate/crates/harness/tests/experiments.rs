use std::process::Command;

use teach_harness::experiment::{compare, SessionRecord};
use teach_harness::{
    run_experiment, run_suite, ExperimentConfig, ExperimentReport, Suite, SuiteOptions,
};

fn cfg(text: &str) -> ExperimentConfig {
    let cfg: ExperimentConfig = toml::from_str(text).unwrap();
    cfg.validate().unwrap();
    cfg
}

/// Everything but wall-clock fields.
fn outcome(r: &SessionRecord) -> String {
    let mut r = r.clone();
    r.solver_ms = 0.0;
    if let Some(t) = &mut r.transcript {
        t.steps.iter_mut().for_each(|s| s.solver_ms = 0.0);
    }
    serde_json::to_string(&r).unwrap()
}

fn mean_an(report: &ExperimentReport) -> f64 {
    let done: Vec<_> = report.rows.iter().filter(|r| r.completed).collect();
    done.iter().map(|r| r.an_cost as f64).sum::<f64>() / done.len() as f64
}

#[test]
fn reports_are_reproducible() {
    let c = cfg("a = [5]\nseed = 11");
    let (x, y) = (run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
    assert_eq!(x.rows.len(), 10);
    let xs: Vec<String> = x.rows.iter().map(outcome).collect();
    let ys: Vec<String> = y.rows.iter().map(outcome).collect();
    assert_eq!(xs, ys);
}

#[test]
fn tlip_needs_no_more_demonstrations_than_randomized_greedy() {
    let tlip = run_experiment(&cfg("a = [5]\nseed = 2024")).unwrap();
    let rg = run_experiment(&cfg(
        "a = [5]\nseed = 2024\n[teacher]\nmethod = \"rg\"\nsample_size = 64",
    ))
    .unwrap();
    let pairs: Vec<_> = tlip
        .rows
        .iter()
        .zip(&rg.rows)
        .filter(|(t, r)| t.completed && r.completed)
        .collect();
    assert!(!pairs.is_empty());
    let t: usize = pairs.iter().map(|(t, _)| t.an_cost).sum();
    let r: usize = pairs.iter().map(|(_, r)| r.an_cost).sum();
    assert!(t <= r, "TLIP {t} vs RG {r}");
}

#[test]
fn largest_numeric_grid_completes() {
    let report = run_experiment(&cfg("a = [15]\nseed = 2024")).unwrap();
    assert_eq!(report.rows.len(), 10);
    assert!(
        report.rows.iter().all(|r| r.completed),
        "{:?}",
        report.rows.iter().map(|r| &r.error).collect::<Vec<_>>()
    );
    assert!(mean_an(&report) >= 1.0);
}

#[test]
fn adaptive_teaching_beats_nonadaptive_under_noise() {
    let c = cfg("a = [5]\nseed = 2024");
    let report = run_suite(Suite::AdaptiveVsNonadaptive, &c, &SuiteOptions::default()).unwrap();
    let cmp = compare(
        &report.rows,
        "adaptive_vs_nonadaptive",
        5,
        "AN-TLIP-nonadaptive",
        "AN-TLIP",
    );
    assert_eq!(cmp.pairs, 10);
    let (base, adaptive) = (cmp.base_an.unwrap(), cmp.other_an.unwrap());
    assert!(
        adaptive < base,
        "adaptive {adaptive} vs non-adaptive {base}"
    );
}

#[test]
fn timing_suite_marks_exhaustive_search_timeouts() {
    let c = cfg("a = [15]\nsessions = 2\nseed = 1");
    let report = run_suite(
        Suite::Timing,
        &c,
        &SuiteOptions {
            short: true,
            export_lp: None,
        },
    )
    .unwrap();
    assert_eq!(report.rows.len(), 2 * 3 * 2);
    for r in &report.rows {
        let expect_done = r.method.contains("TLIP") || r.method.ends_with("@L5");
        assert_eq!(r.completed, expect_done, "{} {:?}", r.method, r.error);
    }
}

#[test]
fn cli_runs_a_suite_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, "name = \"cli\"\na = [3]\nsessions = 3\nseed = 9\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_teach"))
        .args(["run", "--config"])
        .arg(&config)
        .args(["--suite", "global_uniform", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("global_uniform.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 3);
}

#[test]
fn cli_rejects_unknown_suites_and_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(&config, "sessions = 0\n").unwrap();
    let bad_config = Command::new(env!("CARGO_BIN_EXE_teach"))
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!bad_config.status.success());
    let bad_suite = Command::new(env!("CARGO_BIN_EXE_teach"))
        .args(["run", "--config"])
        .arg(&config)
        .args(["--suite", "fig9"])
        .output()
        .unwrap();
    assert!(!bad_suite.status.success());
    assert!(String::from_utf8_lossy(&bad_suite.stderr).contains("fig9"));
}

#[test]
fn cli_prints_the_worked_example() {
    let out = Command::new(env!("CARGO_BIN_EXE_teach"))
        .args(["demo", "--objective", "al"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("target F[<=2]"), "{text}");
    assert!(text.lines().last().unwrap().starts_with("AN "));
}
