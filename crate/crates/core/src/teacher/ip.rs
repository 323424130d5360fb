//! The per-label demonstration synthesis problem and its exact solver.
//!
//! An instance asks for a trajectory of fixed length `L` whose verdict on the
//! target is the label's, on which every candidate receives a strong verdict,
//! and which maximizes the number of candidates it eliminates. The solver is
//! a depth-first search over state choices with a memo keyed on the vector of
//! residual formulas, so it is exact and much cheaper than plain enumeration.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::residual::{Arena, Rid, TRUE};
use super::{Budget, Objective};
use crate::analysis::minimal_length;
use crate::domains::{StateDomain, TransitionConstraint};
use crate::formula::{DemoLabel, Formula, State};
use crate::semantics::Verdict;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: usize,
    pub formula: Formula,
    /// False when the length bound rules out elimination (`zeta(phi, -l) > L`).
    pub eliminable: bool,
}

#[derive(Clone, Debug)]
pub struct IpInstance {
    pub label: DemoLabel,
    pub target: Formula,
    /// Formulas the trajectory must also be a valid demonstration of, e.g. the
    /// true target while an intermediate target is taught.
    pub protected: Vec<Formula>,
    pub candidates: Vec<Candidate>,
    pub length: usize,
    pub objective: Objective,
    pub alphabet: Vec<State>,
    pub transitions: Option<TransitionConstraint>,
    /// Allowed alphabet indices at selected time steps.
    pub pinned: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IpError {
    #[error(
        "length {length} is below the minimal length {needed} of the target for label {label}"
    )]
    InfeasibleByLength {
        length: usize,
        needed: u64,
        label: DemoLabel,
    },
}

/// Builds the problem for label `label`; candidates must not contain the
/// target.
pub fn build_ip(
    label: DemoLabel,
    candidates: &[(usize, Formula)],
    target: &Formula,
    length: usize,
    domain: &StateDomain,
    objective: Objective,
) -> Result<IpInstance, IpError> {
    let needed = minimal_length(target, label).max(1);
    if (length as u64) < needed {
        return Err(IpError::InfeasibleByLength {
            length,
            needed,
            label,
        });
    }
    let candidates = candidates
        .iter()
        .map(|(id, f)| Candidate {
            id: *id,
            formula: f.clone(),
            eliminable: minimal_length(f, -label) <= length as u64,
        })
        .collect();
    Ok(IpInstance {
        label,
        target: target.clone(),
        protected: Vec::new(),
        candidates,
        length,
        objective,
        alphabet: domain.alphabet().to_vec(),
        transitions: None,
        pinned: BTreeMap::new(),
    })
}

/// Adds the domain's transition relation to the instance.
pub fn inject_constraints(mut inst: IpInstance, domain: &StateDomain) -> IpInstance {
    inst.transitions = domain.transitions().filter(|t| !t.is_free()).cloned();
    inst
}

impl IpInstance {
    pub fn with_protected(mut self, protected: Vec<Formula>) -> Self {
        self.protected = protected;
        self
    }

    pub fn pin(mut self, t: usize, allowed: Vec<usize>) -> Self {
        self.pinned.insert(t, allowed);
        self
    }

    fn allowed(&self, t: usize, prev: Option<usize>, s: usize) -> bool {
        if let Some(p) = self.pinned.get(&t) {
            if !p.contains(&s) {
                return false;
            }
        }
        match (prev, &self.transitions) {
            (Some(p), Some(tr)) => tr.allows(p, s),
            _ => true,
        }
    }

    /// Whether a state sequence satisfies the domain constraints.
    pub fn admits(&self, states: &[usize]) -> bool {
        states.len() == self.length
            && states
                .iter()
                .enumerate()
                .all(|(t, &s)| self.allowed(t, t.checked_sub(1).map(|p| states[p]), s))
    }

    /// Checks one assignment against the full constraint set and counts the
    /// eliminated candidates; `None` if infeasible.
    pub fn evaluate(&self, states: &[usize]) -> Option<Vec<usize>> {
        if !self.admits(states) {
            return None;
        }
        let seq: Vec<State> = states.iter().map(|&i| self.alphabet[i].clone()).collect();
        let want = Verdict::of_label(self.label);
        let bad = want.negate();
        if crate::semantics::verdict_on_states(&self.target, &seq) != want {
            return None;
        }
        if self
            .protected
            .iter()
            .any(|p| crate::semantics::verdict_on_states(p, &seq) != want)
        {
            return None;
        }
        let mut eliminated = Vec::new();
        for c in &self.candidates {
            match crate::semantics::verdict_on_states(&c.formula, &seq) {
                Verdict::Undetermined => return None,
                v if v == bad => {
                    if !c.eliminable {
                        return None;
                    }
                    eliminated.push(c.id);
                }
                _ => {}
            }
        }
        Some(eliminated)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpSolution {
    /// Alphabet indices of the chosen trajectory.
    pub states: Vec<usize>,
    /// Hypothesis ids of the eliminated candidates.
    pub eliminated: Vec<usize>,
    pub kappa: usize,
    /// The search budget ran out; the solution is the best one found.
    pub exhausted: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no trajectory of length {length} meets the constraints")]
    Infeasible { length: usize },
    #[error("search budget exhausted after {nodes} nodes without a feasible trajectory")]
    BudgetExhausted { nodes: u64 },
}

/// Shared progression state for the solver and the exhaustive baseline.
pub(crate) struct Compiled {
    pub arena: Arena,
    /// Roots: target, protected..., candidates...
    pub roots: Vec<Rid>,
    pub n_protected: usize,
}

impl Compiled {
    pub fn new(
        alphabet: &[State],
        target: &Formula,
        protected: &[Formula],
        candidates: &[&Formula],
    ) -> Self {
        let mut arena = Arena::new(alphabet);
        let mut roots = vec![arena.from_formula(target)];
        roots.extend(protected.iter().map(|p| arena.from_formula(p)));
        roots.extend(candidates.iter().map(|c| arena.from_formula(c)));
        Compiled {
            arena,
            roots,
            n_protected: protected.len(),
        }
    }

    pub fn step_all(&mut self, residuals: &[Rid], s: u16) -> Vec<Rid> {
        residuals.iter().map(|&r| self.arena.step(r, s)).collect()
    }

    /// Early infeasibility: the target or a protected formula is already
    /// decided against the label.
    pub fn dead(&self, residuals: &[Rid], label: DemoLabel) -> bool {
        let want = label == DemoLabel::Positive;
        if self.arena.constant(residuals[0]) == Some(!want) {
            return true;
        }
        residuals[1..=self.n_protected]
            .iter()
            .any(|&r| self.arena.constant(r) == Some(!want))
    }

    /// Verdict-based feasibility and elimination count at the end of a
    /// trajectory. `eliminable[j]` guards candidate `j`.
    pub fn finish(
        &mut self,
        residuals: &[Rid],
        label: DemoLabel,
        eliminable: &[bool],
    ) -> Option<(usize, u128)> {
        let want = Verdict::of_label(label);
        let bad = want.negate();
        if self.arena.end_verdict(residuals[0]) != want {
            return None;
        }
        for &r in &residuals[1..=self.n_protected] {
            if self.arena.end_verdict(r) != want {
                return None;
            }
        }
        let mut kappa = 0;
        let mut mask = 0u128;
        for (j, &r) in residuals[1 + self.n_protected..].iter().enumerate() {
            match self.arena.end_verdict(r) {
                Verdict::Undetermined => return None,
                v if v == bad => {
                    if !eliminable[j] {
                        return None;
                    }
                    kappa += 1;
                    if j < 128 {
                        mask |= 1 << j;
                    }
                }
                _ => {}
            }
        }
        Some((kappa, mask))
    }
}

type Memo = HashMap<(u16, u16, Box<[Rid]>), Option<(usize, Vec<u16>)>>;

struct Search<'a> {
    inst: &'a IpInstance,
    compiled: Compiled,
    eliminable: Vec<bool>,
    memo: Memo,
    nodes: u64,
    budget: Budget,
    start: Instant,
    exhausted: bool,
    track_last: bool,
}

impl Search<'_> {
    fn over_budget(&mut self) -> bool {
        if self.exhausted {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget.node_limit {
            self.exhausted = true;
        } else if self.nodes % 1024 == 0 {
            if let Some(limit) = self.budget.time_limit {
                if self.start.elapsed() > limit {
                    self.exhausted = true;
                }
            }
        }
        self.exhausted
    }

    /// Steps every residual by `s`. Candidates decided by this step are
    /// scored and collapsed to `TRUE`, so memo keys only carry open ones and
    /// values count future eliminations. `None` when the step is infeasible.
    fn advance(&mut self, res: &[Rid], s: u16) -> Option<(usize, Vec<Rid>)> {
        let bad = self.inst.label != DemoLabel::Positive;
        let first = 1 + self.compiled.n_protected;
        let mut next = Vec::with_capacity(res.len());
        for &r in &res[..first] {
            next.push(self.compiled.arena.step(r, s));
        }
        if self.compiled.dead(&next, self.inst.label) {
            return None;
        }
        let mut gain = 0;
        for (j, &r) in res[first..].iter().enumerate() {
            if self.compiled.arena.constant(r).is_some() {
                next.push(TRUE);
                continue;
            }
            let n = self.compiled.arena.step(r, s);
            match self.compiled.arena.constant(n) {
                Some(v) => {
                    if v == bad {
                        if !self.eliminable[j] {
                            return None;
                        }
                        gain += 1;
                    }
                    next.push(TRUE);
                }
                None => next.push(n),
            }
        }
        Some((gain, next))
    }

    /// End-of-trajectory score of the candidates still open in `res`.
    fn close(&mut self, res: &[Rid]) -> Option<usize> {
        let want = Verdict::of_label(self.inst.label);
        let first = 1 + self.compiled.n_protected;
        for &r in &res[..first] {
            if self.compiled.arena.end_verdict(r) != want {
                return None;
            }
        }
        let mut kappa = 0;
        for (j, &r) in res[first..].iter().enumerate() {
            if self.compiled.arena.constant(r).is_some() {
                continue;
            }
            match self.compiled.arena.end_verdict(r) {
                Verdict::Undetermined => return None,
                v if v == want => {}
                _ if !self.eliminable[j] => return None,
                _ => kappa += 1,
            }
        }
        Some(kappa)
    }

    /// Best `(future eliminations, suffix)` from time `t` with residuals
    /// `res`. Suffixes are explored in alphabet order and replaced only on
    /// strict improvement, so ties keep the lexicographically smallest.
    fn best(&mut self, t: usize, prev: Option<usize>, res: Vec<Rid>) -> Option<(usize, Vec<u16>)> {
        let inst = self.inst;
        if t == inst.length {
            return self.close(&res).map(|k| (k, Vec::new()));
        }
        let last = if self.track_last {
            prev.map_or(u16::MAX, |p| p as u16)
        } else {
            0
        };
        let key = (t as u16, last, res.into_boxed_slice());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let res = &key.2;
        let mut best: Option<(usize, Vec<u16>)> = None;
        let mut complete = true;
        for s in 0..inst.alphabet.len() {
            if !inst.allowed(t, prev, s) {
                continue;
            }
            if self.over_budget() {
                complete = false;
                break;
            }
            let Some((gain, next)) = self.advance(res, s as u16) else {
                continue;
            };
            if let Some((k, mut suffix)) = self.best(t + 1, Some(s), next) {
                if best.as_ref().map_or(true, |(b, _)| gain + k > *b) {
                    suffix.insert(0, s as u16);
                    best = Some((gain + k, suffix));
                }
            }
            if self.exhausted {
                complete = false;
                break;
            }
        }
        if complete {
            self.memo.insert(key, best.clone());
        }
        best
    }
}

/// Maximizes the number of eliminated candidates; ties go to the
/// lexicographically smallest trajectory in alphabet order.
pub fn solve_ip(inst: &IpInstance, budget: &Budget) -> Result<IpSolution, SolveError> {
    let formulas: Vec<&Formula> = inst.candidates.iter().map(|c| &c.formula).collect();
    let compiled = Compiled::new(&inst.alphabet, &inst.target, &inst.protected, &formulas);
    let mut roots = compiled.roots.clone();
    // Candidates decided before any state score the same on every
    // trajectory; only a blocked elimination matters.
    let bad = inst.label != DemoLabel::Positive;
    for (j, r) in roots[1 + inst.protected.len()..].iter_mut().enumerate() {
        if let Some(v) = compiled.arena.constant(*r) {
            if v == bad && !inst.candidates[j].eliminable {
                return Err(SolveError::Infeasible {
                    length: inst.length,
                });
            }
            *r = TRUE;
        }
    }
    let mut search = Search {
        inst,
        compiled,
        eliminable: inst.candidates.iter().map(|c| c.eliminable).collect(),
        memo: HashMap::new(),
        nodes: 0,
        budget: budget.clone(),
        start: Instant::now(),
        exhausted: false,
        track_last: inst.transitions.is_some(),
    };
    let found = search.best(0, None, roots);
    let nodes = search.nodes;
    match found {
        Some((_, suffix)) => {
            let states: Vec<usize> = suffix.iter().map(|&s| s as usize).collect();
            let eliminated = inst
                .evaluate(&states)
                .expect("solver output satisfies the constraints");
            Ok(IpSolution {
                kappa: eliminated.len(),
                states,
                eliminated,
                exhausted: search.exhausted,
                nodes,
            })
        }
        None if search.exhausted => Err(SolveError::BudgetExhausted { nodes }),
        None => Err(SolveError::Infeasible {
            length: inst.length,
        }),
    }
}
