//! Named method matrices run on paired session draws.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pltl_teach::domains::DomainKind;
use pltl_teach::formula::TemporalOp;
use pltl_teach::learner::{preferred_version_space, HypothesisSet, IdSet, VersionSpace};
use pltl_teach::teacher::lp::LpModel;
use pltl_teach::teacher::{
    build_ip, compute_demonstration, esmt_step, inject_constraints, teachability_checks, Budget,
    DemoRequest, Objective, TeachError, TeacherConfig, TeachingTranscript,
};

use crate::config::{ExperimentConfig, MethodChoice, PreferenceChoice};
use crate::experiment::{
    compare, plan_seed, plan_sessions, pool, record, run_matrix, ExperimentReport, MethodSpec,
    RunOptions, SessionPlan, SessionRecord, SessionRun, World,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    GlobalUniform,
    PositiveOnly,
    AdaptiveVsNonadaptive,
    OracleVsPlain,
    Timing,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::GlobalUniform,
        Suite::PositiveOnly,
        Suite::AdaptiveVsNonadaptive,
        Suite::OracleVsPlain,
        Suite::Timing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GlobalUniform => "global_uniform",
            Suite::PositiveOnly => "positive_only",
            Suite::AdaptiveVsNonadaptive => "adaptive_vs_nonadaptive",
            Suite::OracleVsPlain => "oracle_vs_plain",
            Suite::Timing => "timing",
        }
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match Suite::ALL.iter().find(|x| x.name() == s) {
            Some(x) => Ok(*x),
            None => {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                bail!("unknown suite `{s}`; expected one of {}", names.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// CI mode: short timing budget.
    pub short: bool,
    pub export_lp: Option<PathBuf>,
}

/// Timing-suite demonstration lengths.
pub const TIMING_LENGTHS: [usize; 3] = [5, 10, 15];
pub const FULL_TIMEOUT: Duration = Duration::from_secs(300 * 60);
pub const SHORT_TIMEOUT: Duration = Duration::from_secs(60);

pub fn run_suite(
    suite: Suite,
    cfg: &ExperimentConfig,
    opts: &SuiteOptions,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    if suite == Suite::Timing {
        return run_timing(cfg, opts);
    }
    let pool = pool()?;
    let (pref, specs, pairs) = matrix(suite);
    let mut rows = Vec::new();
    let mut comparisons = Vec::new();
    for &a in &cfg.a {
        let world = World::build(cfg, a, pref)?;
        if suite == Suite::OracleVsPlain
            && !matches!(world.domain.kind(), DomainKind::Numeric { .. })
        {
            bail!("suite {} needs the numeric domain", suite.name());
        }
        let max_len = cfg.max_len_for(a);
        let filter = session_filter(suite, &world, max_len);
        let plans = plan_sessions(
            world.grid.len(),
            cfg.sessions,
            plan_seed(cfg.seed, suite.name(), a),
            filter,
        );
        let run_opts =
            RunOptions::new(max_len).with_time_limit(cfg.timeout_secs.map(Duration::from_secs));
        let runs = run_matrix(&pool, &world, &specs, &plans, &run_opts);
        if let Some(dir) = &opts.export_lp {
            for (spec, per) in specs.iter().zip(&runs) {
                for run in per {
                    export_first_step(dir, suite.name(), &world, spec, run)?;
                }
            }
        }
        for (spec, per) in specs.iter().zip(&runs) {
            rows.extend(per.iter().map(|r| record(suite.name(), &world, spec, r)));
        }
        for (base, other) in &pairs {
            comparisons.push(compare(&rows, suite.name(), a, base, other));
        }
    }
    Ok(ExperimentReport::new(
        suite.name(),
        cfg.seed,
        rows,
        comparisons,
    ))
}

type Matrix = (PreferenceChoice, Vec<MethodSpec>, Vec<(String, String)>);

fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
    list.iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

/// Preference, methods and `(base, other)` comparisons of a suite.
fn matrix(suite: Suite) -> Matrix {
    use MethodChoice::{Rg, Tlip};
    use Objective::{AL, AN};
    let tlip = |o| MethodSpec::new(o, Tlip);
    match suite {
        Suite::GlobalUniform => (
            PreferenceChoice::Uniform,
            vec![
                tlip(AN),
                tlip(AL),
                MethodSpec::new(AN, Rg),
                MethodSpec::new(AL, Rg),
            ],
            pairs(&[
                ("AN-TLIP", "AL-TLIP"),
                ("AN-TLIP", "AN-RG"),
                ("AL-TLIP", "AN-TLIP"),
                ("AL-TLIP", "AL-RG"),
            ]),
        ),
        Suite::PositiveOnly => (
            PreferenceChoice::Implication,
            vec![
                tlip(AN),
                tlip(AN).positive_only(true).named("AN-TLIP-positive"),
                tlip(AL),
                tlip(AL).positive_only(true).named("AL-TLIP-positive"),
            ],
            pairs(&[
                ("AN-TLIP", "AN-TLIP-positive"),
                ("AL-TLIP", "AL-TLIP-positive"),
            ]),
        ),
        Suite::AdaptiveVsNonadaptive => (
            PreferenceChoice::NoisyLocal,
            vec![
                tlip(AN),
                tlip(AN).adaptive(false).named("AN-TLIP-nonadaptive"),
                tlip(AL),
                tlip(AL).adaptive(false).named("AL-TLIP-nonadaptive"),
            ],
            pairs(&[
                ("AN-TLIP-nonadaptive", "AN-TLIP"),
                ("AL-TLIP-nonadaptive", "AL-TLIP"),
            ]),
        ),
        Suite::OracleVsPlain => (
            PreferenceChoice::Local,
            vec![
                tlip(AN),
                tlip(AN).oracle(true).named("AN-TLIP-oracle"),
                tlip(AL),
                tlip(AL).oracle(true).named("AL-TLIP-oracle"),
            ],
            pairs(&[("AN-TLIP", "AN-TLIP-oracle"), ("AL-TLIP", "AL-TLIP-oracle")]),
        ),
        Suite::Timing => unreachable!("timing has its own runner"),
    }
}

/// Which `(initial, target)` pairs a suite draws from.
fn session_filter(
    suite: Suite,
    world: &World,
    max_len: usize,
) -> Box<dyn Fn(usize, usize) -> bool + Sync + '_> {
    let coords = &world.grid.coords;
    match suite {
        // Targets the positive-only teacher can reach at all: nothing
        // preferred is implied by the target, and every preferred
        // hypothesis can be violated within the length limit.
        Suite::PositiveOnly => {
            let teachable: Vec<bool> = (0..world.grid.len())
                .map(|t| {
                    let hyps = HypothesisSet::new(world.grid.formulas.clone(), t)
                        .expect("grid is duplicate free");
                    let r = teachability_checks(&hyps, &world.pref, &[]);
                    r.implication.holds && r.positive_length.required <= max_len as u64
                })
                .collect();
            Box::new(move |_, t| teachable[t])
        }
        // Interior eventually-hypotheses that must become always-hypotheses:
        // the sessions where the learner's operator switch matters.
        Suite::OracleVsPlain => Box::new(move |i, t| {
            coords[i].op == TemporalOp::Eventually
                && !world.grid.is_boundary(i)
                && coords[t].op == TemporalOp::Always
        }),
        // Boundary forms are switch points for the learner, never endpoints;
        // as targets they are tautologies on the numeric domain.
        _ => Box::new(|i, t| !world.grid.is_boundary(i) && !world.grid.is_boundary(t)),
    }
}

/// Writes the first step's integer program of a completed session.
fn export_first_step(
    dir: &Path,
    suite: &str,
    world: &World,
    spec: &MethodSpec,
    run: &SessionRun,
) -> Result<()> {
    let Ok(t) = &run.result else { return Ok(()) };
    let (Some(demo), Some(step)) = (t.demos.first(), t.steps.first()) else {
        return Ok(());
    };
    let hyps = HypothesisSet::new(world.grid.formulas.clone(), run.plan.target)?;
    let phase = step.phase_target;
    let mut preferred = preferred_version_space(
        run.plan.initial,
        &VersionSpace::full(&hyps),
        &world.pref,
        phase,
    );
    preferred.remove(&phase);
    preferred.remove(&run.plan.target);
    let candidates: Vec<_> = preferred
        .iter()
        .map(|&id| (id, hyps.formula(id).clone()))
        .collect();
    let inst = build_ip(
        demo.label,
        &candidates,
        hyps.formula(phase),
        demo.len(),
        &world.domain,
        spec.objective,
    )?;
    let mut inst = inject_constraints(inst, &world.domain);
    if phase != run.plan.target {
        inst = inst.with_protected(vec![hyps.target_formula().clone()]);
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!(
        "{suite}_{}_a{}_s{}.lp",
        spec.name, world.a, run.plan.session
    ));
    LpModel::from_instance(&inst)
        .write(&path)
        .with_context(|| format!("writing {}", path.display()))
}

/// One myopic step per session at each timing length, for the exact solver
/// and for exhaustive enumeration. Runs sequentially so that wall-clock
/// times are not distorted by sibling threads.
fn run_timing(cfg: &ExperimentConfig, opts: &SuiteOptions) -> Result<ExperimentReport> {
    let limit = cfg
        .timeout_secs
        .map(Duration::from_secs)
        .unwrap_or(if opts.short {
            SHORT_TIMEOUT
        } else {
            FULL_TIMEOUT
        });
    let a = *cfg.a.iter().max().expect("validated non-empty");
    let world = World::build(cfg, a, PreferenceChoice::Uniform)?;
    let plans = plan_sessions(
        world.grid.len(),
        cfg.sessions,
        plan_seed(cfg.seed, Suite::Timing.name(), a),
        |_, _| true,
    );
    let mut rows = Vec::new();
    for len in TIMING_LENGTHS {
        for method in [MethodChoice::Tlip, MethodChoice::Esmt] {
            for plan in &plans {
                rows.push(timing_row(&world, method, len, plan, limit)?);
            }
        }
    }
    Ok(ExperimentReport::new(
        Suite::Timing.name(),
        cfg.seed,
        rows,
        Vec::new(),
    ))
}

pub fn timing_method_name(method: MethodChoice, len: usize) -> String {
    let tag = if method == MethodChoice::Esmt {
        "ESMT"
    } else {
        "TLIP"
    };
    format!("AN-{tag}@L{len}")
}

/// Marker stored in `error` when a timing step ran out of time.
pub const TIMEOUT: &str = "TIMEOUT";

fn timing_row(
    world: &World,
    method: MethodChoice,
    len: usize,
    plan: &SessionPlan,
    limit: Duration,
) -> Result<SessionRecord> {
    let hyps = HypothesisSet::new(world.grid.formulas.clone(), plan.target)?;
    let budget = Budget {
        node_limit: u64::MAX,
        time_limit: Some(limit),
    };
    let cfg = TeacherConfig::new(Objective::AN, len).with_budget(budget);
    let space = VersionSpace::full(&hyps);
    let preferred: IdSet = preferred_version_space(plan.initial, &space, &world.pref, plan.target);
    let req = DemoRequest {
        hyps: &hyps,
        domain: &world.domain,
        space: &space,
        preferred: &preferred,
        target: plan.target,
        protected: &[],
        cfg: &cfg,
    };
    let started = std::time::Instant::now();
    let result = match method {
        MethodChoice::Esmt => esmt_step(&req),
        _ => compute_demonstration(&req, None),
    };
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    let f = |id: usize| hyps.formula(id).render();
    let mut rec = SessionRecord {
        suite: Suite::Timing.name().into(),
        method: timing_method_name(method, len),
        a: world.a,
        session: plan.session,
        initial: f(plan.initial),
        target: f(plan.target),
        an_cost: 0,
        al_cost: 0,
        steps: 0,
        solver_ms: elapsed,
        completed: false,
        error: None,
        transcript: None,
    };
    match result {
        Ok(choice) if !choice.exhausted => {
            rec.an_cost = 1;
            rec.al_cost = choice.demo.len();
            rec.steps = 1;
            rec.completed = true;
            let t = TeachingTranscript {
                demos: vec![choice.demo],
                hypothesis_path: vec![plan.initial],
                steps: Vec::new(),
                an_cost: 1,
                al_cost: rec.al_cost,
                reached_target: false,
            };
            rec.transcript = Some(crate::experiment::TranscriptRecord::new(&t, &hyps));
        }
        Ok(_) | Err(TeachError::Budget(_)) => rec.error = Some(TIMEOUT.into()),
        Err(e) => rec.error = Some(e.to_string()),
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("fig9".parse::<Suite>().is_err());
    }

    #[test]
    fn small_global_suite_pairs_sessions() {
        let cfg: ExperimentConfig = toml::from_str("a = [2]\nsessions = 4\nseed = 3").unwrap();
        let r = run_suite(Suite::GlobalUniform, &cfg, &SuiteOptions::default()).unwrap();
        assert_eq!(r.rows.len(), 16);
        for m in ["AN-TLIP", "AL-TLIP", "AN-RG", "AL-RG"] {
            let targets: Vec<&str> = r
                .rows
                .iter()
                .filter(|x| x.method == m)
                .map(|x| x.target.as_str())
                .collect();
            let base: Vec<&str> = r
                .rows
                .iter()
                .filter(|x| x.method == "AN-TLIP")
                .map(|x| x.target.as_str())
                .collect();
            assert_eq!(targets, base);
        }
        assert_eq!(r.comparisons.len(), 4);
    }

    #[test]
    fn oracle_suite_draws_f_to_g_sessions() {
        let cfg: ExperimentConfig = toml::from_str("a = [2]\nsessions = 3").unwrap();
        let r = run_suite(Suite::OracleVsPlain, &cfg, &SuiteOptions::default()).unwrap();
        for row in &r.rows {
            assert!(
                row.initial.starts_with('F') && row.target.starts_with('G'),
                "{} -> {}",
                row.initial,
                row.target
            );
        }
    }

    #[test]
    fn lp_export_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg: ExperimentConfig = toml::from_str("a = [2]\nsessions = 2").unwrap();
        let opts = SuiteOptions {
            short: true,
            export_lp: Some(dir.path().to_path_buf()),
        };
        run_suite(Suite::GlobalUniform, &cfg, &opts).unwrap();
        let n = std::fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(n, 8);
    }
}
