//! One greedy teaching step: choose the demonstration that removes the most
//! preferred hypotheses, per demonstration (AN) or per time step (AL).

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::Rng;

use super::ip::{build_ip, inject_constraints, solve_ip, Compiled, SolveError};
use super::{Objective, TeachError, TeacherConfig};
use crate::analysis::minimal_length;
use crate::domains::StateDomain;
use crate::formula::{DemoLabel, Formula};
use crate::learner::{prune, HypothesisSet, IdSet, VersionSpace};
use crate::semantics::{verdict_on_states, Demonstration, Verdict};

/// Everything a teaching step looks at.
#[derive(Clone, Copy)]
pub struct DemoRequest<'a> {
    pub hyps: &'a HypothesisSet,
    pub domain: &'a StateDomain,
    pub space: &'a VersionSpace,
    pub preferred: &'a IdSet,
    /// The hypothesis being taught in this step (the target, or an oracle's
    /// intermediate target).
    pub target: usize,
    /// Hypotheses the demonstration must also be valid for.
    pub protected: &'a [usize],
    pub cfg: &'a TeacherConfig,
}

impl DemoRequest<'_> {
    fn labels(&self) -> &'static [DemoLabel] {
        if self.cfg.positive_only {
            &[DemoLabel::Positive]
        } else {
            &[DemoLabel::Positive, DemoLabel::Negative]
        }
    }

    fn candidates(&self) -> Vec<(usize, Formula)> {
        self.preferred
            .iter()
            .copied()
            .filter(|&id| id != self.target && !self.protected.contains(&id))
            .map(|id| (id, self.hyps.formula(id).clone()))
            .collect()
    }

    fn protected_formulas(&self) -> Vec<Formula> {
        self.protected
            .iter()
            .map(|&id| self.hyps.formula(id).clone())
            .collect()
    }

    fn target_formula(&self) -> &Formula {
        self.hyps.formula(self.target)
    }

    fn cache_key(&self) -> CacheKey {
        (
            self.space.alive.iter().copied().collect(),
            self.preferred.iter().copied().collect(),
            self.target,
            self.protected.to_vec(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoChoice {
    pub demo: Demonstration,
    /// Every surviving hypothesis the demonstration eliminates.
    pub eliminated: IdSet,
    /// How many of them are preferred.
    pub kappa: usize,
    pub solver_time: Duration,
    pub nodes: u64,
    /// Some search ran out of budget and returned its best incumbent.
    pub exhausted: bool,
}

type CacheKey = (Vec<usize>, Vec<usize>, usize, Vec<usize>);

/// Memo of deterministic teaching steps, keyed on the version space, the
/// preferred set and the step target. Used when enumerating tie-break
/// realizations, where the same step recurs many times.
#[derive(Default)]
pub struct DemoCache {
    map: HashMap<CacheKey, DemoChoice>,
}

impl DemoCache {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Best `(kappa, length, states)` per label.
#[derive(Clone, Debug)]
struct Best {
    kappa: usize,
    len: usize,
    states: Vec<usize>,
}

/// Whether `(ka, la)` is strictly better than `(kb, lb)`. AN ranks by count
/// then shorter length; AL by ratio (exact, cross-multiplied), then count,
/// then shorter length.
fn better(objective: Objective, ka: usize, la: usize, kb: usize, lb: usize) -> bool {
    match objective {
        Objective::AN => ka > kb || (ka == kb && la < lb),
        Objective::AL => {
            let (x, y) = (ka * lb, kb * la);
            x > y || (x == y && (ka > kb || (ka == kb && la < lb)))
        }
    }
}

/// Positive wins unless the negative score is strictly higher.
fn pick_label(
    objective: Objective,
    pos: Option<&Best>,
    neg: Option<&Best>,
) -> Option<(DemoLabel, Best)> {
    match (pos, neg) {
        (Some(p), Some(n)) => {
            let pos_wins = match objective {
                Objective::AN => p.kappa >= n.kappa,
                Objective::AL => p.kappa * n.len >= n.kappa * p.len,
            };
            Some(if pos_wins {
                (DemoLabel::Positive, p.clone())
            } else {
                (DemoLabel::Negative, n.clone())
            })
        }
        (Some(p), None) => Some((DemoLabel::Positive, p.clone())),
        (None, Some(n)) => Some((DemoLabel::Negative, n.clone())),
        (None, None) => None,
    }
}

fn finalize(
    req: &DemoRequest<'_>,
    chosen: Option<(DemoLabel, Best)>,
    n_candidates: usize,
    started: Instant,
    nodes: u64,
    exhausted: bool,
) -> Result<DemoChoice, TeachError> {
    let no_progress = || TeachError::NoProgress {
        remaining: n_candidates,
        max_len: req.cfg.max_len,
    };
    let (label, best) = chosen.ok_or_else(no_progress)?;
    if best.kappa == 0 {
        return Err(no_progress());
    }
    let demo = Demonstration::new(req.domain.trajectory(&best.states), label);
    let (_, eliminated) = prune(req.space, &demo, req.target_formula(), req.hyps)?;
    Ok(DemoChoice {
        demo,
        eliminated,
        kappa: best.kappa,
        solver_time: started.elapsed(),
        nodes,
        exhausted,
    })
}

/// Solves the per-label, per-length problems for every length up to the
/// configured maximum and keeps the best demonstration by the objective.
pub fn compute_demonstration(
    req: &DemoRequest<'_>,
    cache: Option<&mut DemoCache>,
) -> Result<DemoChoice, TeachError> {
    let key = cache.as_ref().map(|_| req.cache_key());
    if let (Some(c), Some(k)) = (cache.as_ref(), key.as_ref()) {
        if let Some(hit) = c.map.get(k) {
            return Ok(hit.clone());
        }
    }
    let candidates = req.candidates();
    if candidates.is_empty() {
        return Err(TeachError::NothingToTeach);
    }
    let started = Instant::now();
    let protected = req.protected_formulas();
    let target = req.target_formula();
    let objective = req.cfg.objective;
    let n = candidates.len();
    let mut nodes = 0;
    let mut exhausted = false;
    let mut per_label: Vec<Option<Best>> = Vec::new();
    for &label in req.labels() {
        let mut best: Option<Best> = None;
        let lower = minimal_length(target, label).max(1) as usize;
        for len in lower..=req.cfg.max_len {
            if let Some(b) = &best {
                // No longer trajectory can beat the incumbent any more.
                let done = match objective {
                    Objective::AN => b.kappa == n,
                    Objective::AL => n * b.len < b.kappa * len,
                };
                if done {
                    break;
                }
            }
            let inst = build_ip(label, &candidates, target, len, req.domain, objective)
                .expect("length starts at the target's minimal length");
            let inst = inject_constraints(inst, req.domain).with_protected(protected.clone());
            match solve_ip(&inst, &req.cfg.budget) {
                Ok(sol) => {
                    nodes += sol.nodes;
                    exhausted |= sol.exhausted;
                    if best
                        .as_ref()
                        .map_or(true, |b| better(objective, sol.kappa, len, b.kappa, b.len))
                    {
                        best = Some(Best {
                            kappa: sol.kappa,
                            len,
                            states: sol.states,
                        });
                    }
                }
                Err(SolveError::Infeasible { .. }) => {}
                Err(SolveError::BudgetExhausted { nodes: used }) => {
                    nodes += used;
                    exhausted = true;
                }
            }
        }
        per_label.push(best);
    }
    let chosen = pick_label(
        objective,
        per_label[0].as_ref(),
        per_label.get(1).and_then(|b| b.as_ref()),
    );
    let out = finalize(req, chosen, n, started, nodes, exhausted)?;
    if let (Some(c), Some(k)) = (cache, key) {
        c.map.insert(k, out.clone());
    }
    Ok(out)
}

/// The shortest valid demonstration of the step target, positive first and
/// then lexicographically first. Used when nothing preferred is left to
/// eliminate but the learner still has to be moved.
pub fn shortest_demonstration(req: &DemoRequest<'_>) -> Result<DemoChoice, TeachError> {
    let started = Instant::now();
    let protected = req.protected_formulas();
    let target = req.target_formula();
    let mut nodes = 0;
    for len in 1..=req.cfg.max_len {
        for &label in req.labels() {
            let Ok(inst) = build_ip(label, &[], target, len, req.domain, req.cfg.objective) else {
                continue;
            };
            let inst = inject_constraints(inst, req.domain).with_protected(protected.clone());
            match solve_ip(&inst, &req.cfg.budget) {
                Ok(sol) => {
                    nodes += sol.nodes;
                    let best = Best {
                        kappa: 0,
                        len,
                        states: sol.states,
                    };
                    let demo = Demonstration::new(req.domain.trajectory(&best.states), label);
                    let (_, eliminated) = prune(req.space, &demo, target, req.hyps)?;
                    return Ok(DemoChoice {
                        demo,
                        eliminated,
                        kappa: 0,
                        solver_time: started.elapsed(),
                        nodes,
                        exhausted: sol.exhausted,
                    });
                }
                Err(SolveError::Infeasible { .. }) => {}
                Err(SolveError::BudgetExhausted { nodes }) => {
                    return Err(TeachError::Budget(format!(
                        "no valid demonstration found within {nodes} nodes"
                    )))
                }
            }
        }
    }
    Err(TeachError::NoProgress {
        remaining: 0,
        max_len: req.cfg.max_len,
    })
}

/// Exhaustive-search step: enumerates every trajectory of every length up to
/// the maximum, scoring both labels with the same feasibility rules and tie
/// breaks as [`compute_demonstration`].
///
/// Fails fast with a budget error when the projected enumeration exceeds the
/// node limit or, extrapolating from the observed rate, the time limit.
pub fn esmt_step(req: &DemoRequest<'_>) -> Result<DemoChoice, TeachError> {
    let candidates = req.candidates();
    if candidates.is_empty() {
        return Err(TeachError::NothingToTeach);
    }
    let started = Instant::now();
    let max_len = req.cfg.max_len;
    let alphabet = req.domain.alphabet();
    let total: u64 = (1..=max_len as u32)
        .map(|l| (alphabet.len() as u64).saturating_pow(l))
        .fold(0u64, |a, b| a.saturating_add(b));
    let budget = &req.cfg.budget;
    if total > budget.node_limit {
        return Err(TeachError::Budget(format!(
            "exhaustive search needs {total} nodes, limit is {}",
            budget.node_limit
        )));
    }
    let formulas: Vec<&Formula> = candidates.iter().map(|(_, f)| f).collect();
    let mut compiled = Compiled::new(
        alphabet,
        req.target_formula(),
        &req.protected_formulas(),
        &formulas,
    );
    let labels = req.labels();
    let zetas: Vec<Vec<u64>> = labels
        .iter()
        .map(|&l| {
            candidates
                .iter()
                .map(|(_, f)| minimal_length(f, -l))
                .collect()
        })
        .collect();
    // best[label][len]
    let mut best: Vec<Vec<Option<(usize, Vec<usize>)>>> =
        vec![vec![None; max_len + 1]; labels.len()];
    let mut enumerator = Enumerator {
        compiled: &mut compiled,
        req,
        labels,
        zetas: &zetas,
        best: &mut best,
        prefix: Vec::with_capacity(max_len),
        nodes: 0,
        total,
        started,
    };
    let roots = enumerator.compiled.roots.clone();
    enumerator.walk(&roots)?;
    let nodes = enumerator.nodes;

    let objective = req.cfg.objective;
    let mut per_label: Vec<Option<Best>> = Vec::new();
    for row in &best {
        let mut b: Option<Best> = None;
        for (len, entry) in row.iter().enumerate() {
            if let Some((k, states)) = entry {
                if b.as_ref()
                    .map_or(true, |x| better(objective, *k, len, x.kappa, x.len))
                {
                    b = Some(Best {
                        kappa: *k,
                        len,
                        states: states.clone(),
                    });
                }
            }
        }
        per_label.push(b);
    }
    let chosen = pick_label(
        objective,
        per_label[0].as_ref(),
        per_label.get(1).and_then(|b| b.as_ref()),
    );
    finalize(req, chosen, candidates.len(), started, nodes, false)
}

struct Enumerator<'a, 'r> {
    compiled: &'a mut Compiled,
    req: &'a DemoRequest<'r>,
    labels: &'static [DemoLabel],
    zetas: &'a [Vec<u64>],
    best: &'a mut Vec<Vec<Option<(usize, Vec<usize>)>>>,
    prefix: Vec<usize>,
    nodes: u64,
    total: u64,
    started: Instant,
}

impl Enumerator<'_, '_> {
    fn walk(&mut self, res: &[u32]) -> Result<(), TeachError> {
        let prev = self.prefix.last().copied();
        for s in 0..self.req.domain.size() {
            if let Some(p) = prev {
                if !self.req.domain.allows(p, s) {
                    continue;
                }
            }
            self.nodes += 1;
            if self.nodes % 4096 == 0 {
                self.check_time()?;
            }
            let next = self.compiled.step_all(res, s as u16);
            self.prefix.push(s);
            let len = self.prefix.len();
            for (li, &label) in self.labels.iter().enumerate() {
                let eliminable: Vec<bool> =
                    self.zetas[li].iter().map(|&z| z <= len as u64).collect();
                if let Some((k, _)) = self.compiled.finish(&next, label, &eliminable) {
                    let slot = &mut self.best[li][len];
                    if slot.as_ref().map_or(true, |(b, _)| k > *b) {
                        *slot = Some((k, self.prefix.clone()));
                    }
                }
            }
            if len < self.req.cfg.max_len {
                self.walk(&next)?;
            }
            self.prefix.pop();
        }
        Ok(())
    }

    fn check_time(&self) -> Result<(), TeachError> {
        let Some(limit) = self.req.cfg.budget.time_limit else {
            return Ok(());
        };
        let elapsed = self.started.elapsed();
        let projected = elapsed.as_secs_f64() * self.total as f64 / self.nodes as f64;
        if elapsed > limit || projected > limit.as_secs_f64() * 1.5 {
            return Err(TeachError::Budget(format!(
                "exhaustive search projected to take {projected:.1} s for {} nodes, limit is {:.1} s",
                self.total,
                limit.as_secs_f64()
            )));
        }
        Ok(())
    }
}

/// Randomized greedy step: samples labeled trajectories (length uniform in
/// `1..=max_len`, each state uniform over the allowed successors), keeps those
/// that meet the same feasibility rules as the exact step, and returns the
/// best one by the objective. Zero-gain choices are allowed.
pub fn randomized_step<R: Rng>(
    req: &DemoRequest<'_>,
    sample_size: usize,
    rng: &mut R,
) -> Result<DemoChoice, TeachError> {
    let candidates = req.candidates();
    if candidates.is_empty() {
        return Err(TeachError::NothingToTeach);
    }
    let started = Instant::now();
    let target = req.target_formula();
    let protected = req.protected_formulas();
    let objective = req.cfg.objective;
    let mut best: Option<(DemoLabel, Best)> = None;
    let mut accepted = 0;
    let mut attempts = 0;
    let max_attempts = sample_size.max(1) * 200;
    while accepted < sample_size && attempts < max_attempts {
        attempts += 1;
        let len = rng.gen_range(1..=req.cfg.max_len);
        let Some(states) = sample_states(req.domain, len, rng) else {
            continue;
        };
        let seq: Vec<_> = states
            .iter()
            .map(|&i| req.domain.state(i).clone())
            .collect();
        let Some(label) = verdict_on_states(target, &seq).as_label() else {
            continue;
        };
        if req.cfg.positive_only && label == DemoLabel::Negative {
            continue;
        }
        let want = Verdict::of_label(label);
        if protected.iter().any(|p| verdict_on_states(p, &seq) != want) {
            continue;
        }
        let mut kappa = 0;
        let mut determined = true;
        for (_, f) in &candidates {
            match verdict_on_states(f, &seq) {
                Verdict::Undetermined => {
                    determined = false;
                    break;
                }
                v if v != want => kappa += 1,
                _ => {}
            }
        }
        if !determined {
            continue;
        }
        accepted += 1;
        if best
            .as_ref()
            .map_or(true, |(_, b)| better(objective, kappa, len, b.kappa, b.len))
        {
            best = Some((label, Best { kappa, len, states }));
        }
    }
    let (label, b) = best.ok_or(TeachError::NoProgress {
        remaining: candidates.len(),
        max_len: req.cfg.max_len,
    })?;
    let demo = Demonstration::new(req.domain.trajectory(&b.states), label);
    let (_, eliminated) = prune(req.space, &demo, target, req.hyps)?;
    Ok(DemoChoice {
        demo,
        eliminated,
        kappa: b.kappa,
        solver_time: started.elapsed(),
        nodes: attempts as u64,
        exhausted: false,
    })
}

fn sample_states<R: Rng>(domain: &StateDomain, len: usize, rng: &mut R) -> Option<Vec<usize>> {
    let mut states = Vec::with_capacity(len);
    for t in 0..len {
        let options: Vec<usize> = match t {
            0 => (0..domain.size()).collect(),
            _ => (0..domain.size())
                .filter(|&s| domain.allows(states[t - 1], s))
                .collect(),
        };
        if options.is_empty() {
            return None;
        }
        states.push(options[rng.gen_range(0..options.len())]);
    }
    Some(states)
}
