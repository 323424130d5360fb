//! Seeded teaching sessions, paired across methods, and their aggregation.

use std::time::Duration;

use anyhow::{Context, Result};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use pltl_teach::domains::{
    generate_hypothesis_grid, ColorMap, Gridworld, HypothesisGrid, StateDomain,
};
use pltl_teach::learner::{HypothesisSet, PreferenceModel, UniformTies};
use pltl_teach::teacher::{
    teach, BoundaryOracle, Budget, Method, Objective, StepRecord, TeachError, TeachSetup,
    TeacherConfig, TeachingTranscript,
};
use pltl_teach::DemoLabel;

use crate::config::{DomainChoice, ExperimentConfig, MethodChoice, PreferenceChoice};

/// A domain with its hypothesis grid and learner preference for one `a`.
pub struct World {
    pub a: u32,
    pub domain: StateDomain,
    pub grid: HypothesisGrid,
    pub pref: PreferenceModel,
}

impl World {
    /// Local models append the numeric boundary forms to the grid so that
    /// the learner's operator switch has somewhere to go.
    pub fn build(cfg: &ExperimentConfig, a: u32, pref: PreferenceChoice) -> Result<World> {
        let domain = match cfg.domain {
            DomainChoice::Numeric => StateDomain::numeric(),
            DomainChoice::Gridworld => match &cfg.map {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let map: ColorMap = text
                        .parse()
                        .with_context(|| format!("parsing map {}", path.display()))?;
                    StateDomain::gridworld(Gridworld::with_map(map))
                }
                None => StateDomain::gridworld(Gridworld::default_world()),
            },
        };
        let mut grid = generate_hypothesis_grid(&domain, a);
        let penalty = cfg.preference.penalty;
        let pref = match pref {
            PreferenceChoice::Uniform => PreferenceModel::Uniform,
            PreferenceChoice::Implication => PreferenceModel::global_implication(&grid),
            PreferenceChoice::Local => {
                grid = grid.with_boundary(&domain);
                PreferenceModel::local_manhattan(&grid, &domain, penalty)
            }
            PreferenceChoice::NoisyLocal => {
                grid = grid.with_boundary(&domain);
                PreferenceModel::noisy_local(&grid, &domain, penalty, cfg.preference.radius)
            }
        };
        pref.validate(grid.len())?;
        Ok(World {
            a,
            domain,
            grid,
            pref,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub objective: Objective,
    pub method: MethodChoice,
    pub adaptive: bool,
    pub oracle: bool,
    pub positive_only: bool,
    pub sample_size: usize,
}

impl MethodSpec {
    pub fn new(objective: Objective, method: MethodChoice) -> Self {
        let tag = match method {
            MethodChoice::Tlip => "TLIP",
            MethodChoice::Esmt => "ESMT",
            MethodChoice::Rg => "RG",
        };
        MethodSpec {
            name: format!("{objective:?}-{tag}"),
            objective,
            method,
            adaptive: true,
            oracle: false,
            positive_only: false,
            sample_size: 64,
        }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        let t = &cfg.teacher;
        let mut spec = MethodSpec::new(t.objective, t.method);
        spec.adaptive = t.adaptive;
        spec.oracle = t.oracle;
        spec.positive_only = t.positive_only;
        spec.sample_size = t.sample_size;
        for (on, suffix) in [
            (!t.adaptive, "nonadaptive"),
            (t.oracle, "oracle"),
            (t.positive_only, "positive"),
        ] {
            if on {
                spec.name = format!("{}-{suffix}", spec.name);
            }
        }
        spec
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    pub fn adaptive(mut self, on: bool) -> Self {
        self.adaptive = on;
        self
    }

    pub fn oracle(mut self, on: bool) -> Self {
        self.oracle = on;
        self
    }

    pub fn positive_only(mut self, on: bool) -> Self {
        self.positive_only = on;
        self
    }
}

/// One `(initial, target)` draw with the seeds of its random streams; shared
/// by every method of a suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub session: usize,
    pub initial: usize,
    pub target: usize,
    pub learner_seed: u64,
    pub teacher_seed: u64,
}

/// Draws `sessions` distinct ordered pairs uniformly without replacement
/// among those accepted by `ok`, with `initial != target`.
pub fn plan_sessions(
    n: usize,
    sessions: usize,
    seed: u64,
    ok: impl Fn(usize, usize) -> bool,
) -> Vec<SessionPlan> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |t| (i, t)))
        .filter(|&(i, t)| i != t && ok(i, t))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, pairs.len(), sessions.min(pairs.len())).into_vec();
    picks
        .into_iter()
        .enumerate()
        .map(|(session, k)| SessionPlan {
            session,
            initial: pairs[k].0,
            target: pairs[k].1,
            learner_seed: rng.gen(),
            teacher_seed: rng.gen(),
        })
        .collect()
}

/// A demonstration in the trajectory text format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoText {
    pub trajectory: String,
    pub label: DemoLabel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub demos: Vec<DemoText>,
    /// The learner's hypotheses, rendered.
    pub hypothesis_path: Vec<String>,
    pub steps: Vec<StepRecord>,
}

impl TranscriptRecord {
    pub fn new(t: &TeachingTranscript, hyps: &HypothesisSet) -> Self {
        TranscriptRecord {
            demos: t
                .demos
                .iter()
                .map(|d| DemoText {
                    trajectory: d.trajectory.to_string(),
                    label: d.label,
                })
                .collect(),
            hypothesis_path: t
                .hypothesis_path
                .iter()
                .map(|&h| hyps.formula(h).render())
                .collect(),
            steps: t.steps.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub suite: String,
    pub method: String,
    pub a: u32,
    pub session: usize,
    pub initial: String,
    pub target: String,
    pub an_cost: usize,
    pub al_cost: usize,
    pub steps: usize,
    pub solver_ms: f64,
    pub completed: bool,
    pub error: Option<String>,
    pub transcript: Option<TranscriptRecord>,
}

/// Outcome of one session before it is flattened into a record; keeps the
/// transcript with hypothesis ids for invariant checks.
pub struct SessionRun {
    pub plan: SessionPlan,
    pub result: Result<TeachingTranscript, TeachError>,
}

pub struct RunOptions {
    pub max_len: usize,
    pub budget: Budget,
}

impl RunOptions {
    pub fn new(max_len: usize) -> Self {
        RunOptions {
            max_len,
            budget: Budget::default(),
        }
    }

    pub fn with_time_limit(mut self, limit: Option<Duration>) -> Self {
        self.budget.time_limit = limit;
        self
    }
}

pub fn teacher_config(spec: &MethodSpec, opts: &RunOptions) -> TeacherConfig {
    TeacherConfig::new(spec.objective, opts.max_len)
        .adaptive(spec.adaptive)
        .positive_only(spec.positive_only)
        .myopic(!spec.oracle)
        .with_budget(opts.budget.clone())
}

pub fn run_session(
    world: &World,
    spec: &MethodSpec,
    plan: &SessionPlan,
    opts: &RunOptions,
) -> SessionRun {
    let result = (|| {
        let hyps = HypothesisSet::new(world.grid.formulas.clone(), plan.target)
            .map_err(|e| TeachError::Invariant(e.to_string()))?;
        let cfg = teacher_config(spec, opts);
        let oracle = if spec.oracle {
            Some(BoundaryOracle::new(&world.grid, &world.domain)?)
        } else {
            None
        };
        let setup = TeachSetup {
            hyps: &hyps,
            domain: &world.domain,
            pref: &world.pref,
            cfg: &cfg,
            oracle: oracle
                .as_ref()
                .map(|o| o as &dyn pltl_teach::teacher::Oracle),
        };
        let method = match spec.method {
            MethodChoice::Tlip => Method::Tlip,
            MethodChoice::Esmt => Method::Esmt,
            MethodChoice::Rg => Method::RandomizedGreedy {
                sample_size: spec.sample_size,
                seed: plan.teacher_seed,
            },
        };
        let mut ties = UniformTies::new(plan.learner_seed);
        teach(&setup, plan.initial, method, &mut ties, None)
    })();
    SessionRun {
        plan: *plan,
        result,
    }
}

pub fn record(suite: &str, world: &World, spec: &MethodSpec, run: &SessionRun) -> SessionRecord {
    let f = |id: usize| world.grid.formulas[id].render();
    let mut rec = SessionRecord {
        suite: suite.into(),
        method: spec.name.clone(),
        a: world.a,
        session: run.plan.session,
        initial: f(run.plan.initial),
        target: f(run.plan.target),
        an_cost: 0,
        al_cost: 0,
        steps: 0,
        solver_ms: 0.0,
        completed: false,
        error: None,
        transcript: None,
    };
    match &run.result {
        Ok(t) => {
            let hyps = HypothesisSet::new(world.grid.formulas.clone(), run.plan.target)
                .expect("grid is duplicate free");
            rec.an_cost = t.an_cost;
            rec.al_cost = t.al_cost;
            rec.steps = t.steps.len();
            rec.solver_ms = t.total_solver_ms();
            rec.completed = t.reached_target;
            rec.transcript = Some(TranscriptRecord::new(t, &hyps));
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Thread pool capped by `TEACH_THREADS` when set.
pub fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("TEACH_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("TEACH_THREADS={v} is not a number"))?;
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}

/// Runs every plan under every method. Results come back in
/// `(method, session)` order whatever the thread count.
pub fn run_matrix(
    pool: &rayon::ThreadPool,
    world: &World,
    specs: &[MethodSpec],
    plans: &[SessionPlan],
    opts: &RunOptions,
) -> Vec<Vec<SessionRun>> {
    let jobs: Vec<(usize, &SessionPlan)> = (0..specs.len())
        .flat_map(|m| plans.iter().map(move |p| (m, p)))
        .collect();
    let mut runs: Vec<(usize, SessionRun)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(m, p)| (m, run_session(world, &specs[m], p, opts)))
            .collect()
    });
    let mut out: Vec<Vec<SessionRun>> = specs.iter().map(|_| Vec::new()).collect();
    for (m, run) in runs.drain(..) {
        out[m].push(run);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub suite: String,
    pub method: String,
    pub a: u32,
    pub sessions: usize,
    pub completed: usize,
    pub mean_an: Option<f64>,
    pub min_an: Option<usize>,
    pub max_an: Option<usize>,
    pub mean_al: Option<f64>,
    pub min_al: Option<usize>,
    pub max_al: Option<usize>,
    /// Mean solver time per demonstration.
    pub mean_step_ms: Option<f64>,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Costs over completed sessions only.
pub fn aggregate(rows: &[SessionRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(String, String, u32)> = Vec::new();
    for r in rows {
        let k = (r.suite.clone(), r.method.clone(), r.a);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(suite, method, a)| {
            let all: Vec<&SessionRecord> = rows
                .iter()
                .filter(|r| r.suite == suite && r.method == method && r.a == a)
                .collect();
            let done: Vec<&&SessionRecord> = all.iter().filter(|r| r.completed).collect();
            let steps: usize = done.iter().map(|r| r.steps).sum();
            Aggregate {
                sessions: all.len(),
                completed: done.len(),
                mean_an: mean(done.iter().map(|r| r.an_cost as f64)),
                min_an: done.iter().map(|r| r.an_cost).min(),
                max_an: done.iter().map(|r| r.an_cost).max(),
                mean_al: mean(done.iter().map(|r| r.al_cost as f64)),
                min_al: done.iter().map(|r| r.al_cost).min(),
                max_al: done.iter().map(|r| r.al_cost).max(),
                mean_step_ms: (steps > 0)
                    .then(|| done.iter().map(|r| r.solver_ms).sum::<f64>() / steps as f64),
                suite,
                method,
                a,
            }
        })
        .collect()
}

/// Paired difference between two methods over the sessions both completed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub suite: String,
    pub a: u32,
    pub base: String,
    pub other: String,
    pub pairs: usize,
    pub base_an: Option<f64>,
    pub other_an: Option<f64>,
    pub base_al: Option<f64>,
    pub other_al: Option<f64>,
    /// `100 (other - base) / base` on the paired means.
    pub an_change_pct: Option<f64>,
    pub al_change_pct: Option<f64>,
}

pub fn compare(rows: &[SessionRecord], suite: &str, a: u32, base: &str, other: &str) -> Comparison {
    let pick = |m: &str| -> Vec<&SessionRecord> {
        rows.iter()
            .filter(|r| r.suite == suite && r.a == a && r.method == m)
            .collect()
    };
    let (b, o) = (pick(base), pick(other));
    let paired: Vec<(&SessionRecord, &SessionRecord)> = b
        .iter()
        .filter(|r| r.completed)
        .filter_map(|r| {
            o.iter()
                .find(|q| q.session == r.session && q.completed)
                .map(|q| (*r, *q))
        })
        .collect();
    let m = |f: &dyn Fn(&(&SessionRecord, &SessionRecord)) -> usize| {
        mean(paired.iter().map(|p| f(p) as f64))
    };
    let (base_an, other_an) = (m(&|p| p.0.an_cost), m(&|p| p.1.an_cost));
    let (base_al, other_al) = (m(&|p| p.0.al_cost), m(&|p| p.1.al_cost));
    let pct = |b: Option<f64>, o: Option<f64>| match (b, o) {
        (Some(b), Some(o)) if b > 0.0 => Some(100.0 * (o - b) / b),
        _ => None,
    };
    Comparison {
        suite: suite.into(),
        a,
        base: base.into(),
        other: other.into(),
        pairs: paired.len(),
        an_change_pct: pct(base_an, other_an),
        al_change_pct: pct(base_al, other_al),
        base_an,
        other_an,
        base_al,
        other_al,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub rows: Vec<SessionRecord>,
    pub aggregates: Vec<Aggregate>,
    pub comparisons: Vec<Comparison>,
}

impl ExperimentReport {
    pub fn new(
        name: &str,
        seed: u64,
        rows: Vec<SessionRecord>,
        comparisons: Vec<Comparison>,
    ) -> Self {
        ExperimentReport {
            name: name.into(),
            seed,
            aggregates: aggregate(&rows),
            rows,
            comparisons,
        }
    }

    pub fn aggregate_for(&self, method: &str, a: u32) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|g| g.method == method && g.a == a)
    }
}

/// Seed of the session draws for one grid size of a suite.
pub fn plan_seed(master: u64, suite: &str, a: u32) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in suite
        .bytes()
        .chain(a.to_le_bytes())
        .chain(master.to_le_bytes())
    {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// The configured single method over the configured grid sizes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = pool()?;
    let spec = MethodSpec::from_config(cfg);
    let mut rows = Vec::new();
    for &a in &cfg.a {
        let world = World::build(cfg, a, cfg.preference.model)?;
        let plans = plan_sessions(
            world.grid.len(),
            cfg.sessions,
            plan_seed(cfg.seed, &cfg.name, a),
            |_, _| true,
        );
        let opts = RunOptions::new(cfg.max_len_for(a))
            .with_time_limit(cfg.timeout_secs.map(Duration::from_secs));
        let runs = run_matrix(&pool, &world, std::slice::from_ref(&spec), &plans, &opts);
        rows.extend(runs[0].iter().map(|r| record(&cfg.name, &world, &spec, r)));
    }
    Ok(ExperimentReport::new(&cfg.name, cfg.seed, rows, Vec::new()))
}
