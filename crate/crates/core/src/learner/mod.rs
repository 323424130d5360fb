//! Version-space learners with preferences over hypotheses.

mod conditions;
mod preference;
mod tiebreak;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::semantics::{check_demonstration, eliminates, Demonstration, MalformedDemonstration};

pub use conditions::{check_condition1, check_condition2, Condition1Violation, Condition2Report};
pub use preference::{default_operator_penalty, PreferenceError, PreferenceModel};
pub use tiebreak::{AdversarialTies, ScriptedTies, TieBreaker, TieContext, UniformTies};

pub type IdSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisError {
    #[error("hypothesis set is empty")]
    Empty,
    #[error("hypotheses {first} and {second} are the same formula")]
    Duplicate { first: usize, second: usize },
    #[error("target id {target} out of range for {len} hypotheses")]
    TargetOutOfRange { target: usize, len: usize },
}

/// Ordered, duplicate-free hypotheses with a distinguished target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisSet {
    formulas: Vec<Formula>,
    target: usize,
}

impl HypothesisSet {
    pub fn new(formulas: Vec<Formula>, target: usize) -> Result<Self, HypothesisError> {
        if formulas.is_empty() {
            return Err(HypothesisError::Empty);
        }
        if target >= formulas.len() {
            return Err(HypothesisError::TargetOutOfRange {
                target,
                len: formulas.len(),
            });
        }
        let mut sorted: Vec<(&Formula, usize)> = formulas.iter().zip(0..).collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(HypothesisError::Duplicate {
                first: w[0].1,
                second: w[1].1,
            });
        }
        Ok(HypothesisSet { formulas, target })
    }

    pub fn with_target(&self, target: usize) -> Result<Self, HypothesisError> {
        if target >= self.formulas.len() {
            return Err(HypothesisError::TargetOutOfRange {
                target,
                len: self.formulas.len(),
            });
        }
        Ok(HypothesisSet {
            formulas: self.formulas.clone(),
            target,
        })
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn formula(&self, id: usize) -> &Formula {
        &self.formulas[id]
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn target_formula(&self) -> &Formula {
        &self.formulas[self.target]
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.formulas.iter().position(|g| g == f)
    }

    pub fn all_ids(&self) -> IdSet {
        (0..self.formulas.len()).collect()
    }
}

/// Hypotheses that survived every demonstration so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionSpace {
    pub alive: IdSet,
}

impl VersionSpace {
    pub fn full(hyps: &HypothesisSet) -> Self {
        VersionSpace {
            alive: hyps.all_ids(),
        }
    }

    pub fn from_ids(alive: IdSet) -> Self {
        VersionSpace { alive }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.alive.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }
}

/// Removes every surviving hypothesis the demonstration strongly contradicts.
/// Returns the pruned space and the removed ids.
pub fn prune(
    space: &VersionSpace,
    demo: &Demonstration,
    target: &Formula,
    hyps: &HypothesisSet,
) -> Result<(VersionSpace, IdSet), MalformedDemonstration> {
    check_demonstration(demo, target)?;
    let eliminated: IdSet = space
        .alive
        .iter()
        .copied()
        .filter(|&id| eliminates(demo, hyps.formula(id)))
        .collect();
    let alive = space.alive.difference(&eliminated).copied().collect();
    Ok((VersionSpace { alive }, eliminated))
}

/// Recomputes the version space induced by a demonstration sequence from the
/// full hypothesis set.
pub fn version_space_of(hyps: &HypothesisSet, demos: &[Demonstration]) -> VersionSpace {
    let alive = (0..hyps.len())
        .filter(|&id| !demos.iter().any(|d| eliminates(d, hyps.formula(id))))
        .collect();
    VersionSpace { alive }
}

/// Algorithm-level preferred set: under a global model the surviving
/// hypotheses ranked no worse than the target; under a local model those that
/// are no worse than the target from the viewpoint of some survivor.
pub fn preferred_set(space: &VersionSpace, pref: &PreferenceModel, target: usize) -> IdSet {
    if pref.is_global() {
        let bar = pref.sigma(target, target);
        return space
            .alive
            .iter()
            .copied()
            .filter(|&c| pref.sigma(c, target) <= bar)
            .chain([target])
            .collect();
    }
    space
        .alive
        .iter()
        .copied()
        .filter(|&c| {
            space
                .alive
                .iter()
                .any(|&v| pref.sigma(c, v) <= pref.sigma(target, v))
        })
        .chain([target])
        .collect()
}

/// Survivors no worse than the target from the current hypothesis.
pub fn preferred_version_space(
    current: usize,
    space: &VersionSpace,
    pref: &PreferenceModel,
    target: usize,
) -> IdSet {
    let bar = pref.sigma(target, current);
    space
        .alive
        .iter()
        .copied()
        .filter(|&c| pref.sigma(c, current) <= bar)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerState {
    pub current: usize,
    pub space: VersionSpace,
}

impl LearnerState {
    pub fn new(hyps: &HypothesisSet, initial: usize) -> Self {
        LearnerState {
            current: initial,
            space: VersionSpace::full(hyps),
        }
    }
}

/// Survivors minimizing `sigma(.; current)`.
pub fn argmin_set(current: usize, space: &VersionSpace, pref: &PreferenceModel) -> Vec<usize> {
    let best = space
        .alive
        .iter()
        .map(|&c| pref.sigma(c, current))
        .fold(f64::INFINITY, f64::min);
    space
        .alive
        .iter()
        .copied()
        .filter(|&c| pref.sigma(c, current) == best)
        .collect()
}

/// Hypotheses the learner may move to from `current` within `space`: the
/// minimizers of `sigma(.; current)`, widened by the perturbation radius of a
/// noisy model when `noisy` is set.
pub fn candidate_moves(
    current: usize,
    space: &VersionSpace,
    pref: &PreferenceModel,
    noisy: bool,
) -> Vec<usize> {
    let mins = argmin_set(current, space, pref);
    match pref {
        PreferenceModel::NoisyLocal { radius, coords, .. } if noisy => space
            .alive
            .iter()
            .copied()
            .filter(|&c| {
                mins.iter().any(|&m| {
                    coords[c].op == coords[m].op && coords[c].manhattan(&coords[m]) <= *radius
                })
            })
            .collect(),
        _ => mins,
    }
}

/// One learner update: prune, then keep the current hypothesis if it survives
/// and is still among the most preferred survivors from itself; otherwise
/// move to a most preferred survivor, ties resolved by `ties`.
pub fn learner_step(
    state: &LearnerState,
    demo: &Demonstration,
    target: &Formula,
    hyps: &HypothesisSet,
    pref: &PreferenceModel,
    ties: &mut dyn TieBreaker,
) -> Result<LearnerState, MalformedDemonstration> {
    let (space, _) = prune(&state.space, demo, target, hyps)?;
    let current = next_hypothesis(state.current, &space, hyps.target(), pref, ties);
    Ok(LearnerState { current, space })
}

/// The move rule of [`learner_step`] on an already pruned space.
pub fn next_hypothesis(
    current: usize,
    space: &VersionSpace,
    target: usize,
    pref: &PreferenceModel,
    ties: &mut dyn TieBreaker,
) -> usize {
    let survives = space.contains(current);
    let mins = argmin_set(current, space, pref);
    if survives && mins.contains(&current) {
        return current;
    }
    let options = candidate_moves(current, space, pref, !survives);
    if options.len() == 1 {
        return options[0];
    }
    ties.choose(
        &options,
        &TieContext {
            current,
            space,
            pref,
            target,
        },
    )
}
