//! The teaching loop: pick a preferred set, compute a demonstration, show it
//! to the learner, repeat until the learner holds the target.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bounds::theorem1_lower_bound;
use super::demo::{
    compute_demonstration, esmt_step, randomized_step, shortest_demonstration, DemoCache,
    DemoChoice, DemoRequest,
};
use super::oracle::Oracle;
use super::{TeachError, TeacherConfig};
use crate::domains::StateDomain;
use crate::learner::{
    learner_step, preferred_set, preferred_version_space, AdversarialTies, HypothesisSet, IdSet,
    LearnerState, PreferenceModel, TieBreaker, TieContext,
};
use crate::semantics::{check_demonstration, Demonstration};

/// The fixed parts of a teaching session.
#[derive(Clone, Copy)]
pub struct TeachSetup<'a> {
    pub hyps: &'a HypothesisSet,
    pub domain: &'a StateDomain,
    pub pref: &'a PreferenceModel,
    pub cfg: &'a TeacherConfig,
    /// Required when `cfg.myopic` is false.
    pub oracle: Option<&'a dyn Oracle>,
}

/// How each demonstration is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Exact per-step optimum via the integer-programming solver.
    Tlip,
    /// Exact per-step optimum by enumerating every trajectory.
    Esmt,
    /// Best of `sample_size` random valid demonstrations per step.
    RandomizedGreedy { sample_size: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// The hypothesis taught in this step (differs from the target during
    /// oracle phases).
    pub phase_target: usize,
    pub preferred: usize,
    pub kappa: usize,
    pub eliminated: usize,
    /// The learner's hypothesis after the step.
    pub hypothesis: usize,
    pub solver_ms: f64,
    pub nodes: u64,
    pub exhausted: bool,
    /// The oracle's target could not be taught further and the step fell
    /// back to the true target.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeachingTranscript {
    pub demos: Vec<Demonstration>,
    /// The learner's hypothesis before the first and after every
    /// demonstration.
    pub hypothesis_path: Vec<usize>,
    pub steps: Vec<StepRecord>,
    pub an_cost: usize,
    pub al_cost: usize,
    pub reached_target: bool,
}

impl TeachingTranscript {
    pub fn total_solver_ms(&self) -> f64 {
        self.steps.iter().map(|s| s.solver_ms).sum()
    }
}

/// Runs one teaching session from the learner's initial hypothesis. `ties`
/// resolves the learner's choices; `cache` memoizes deterministic steps.
pub fn teach(
    setup: &TeachSetup<'_>,
    initial: usize,
    method: Method,
    ties: &mut dyn TieBreaker,
    mut cache: Option<&mut DemoCache>,
) -> Result<TeachingTranscript, TeachError> {
    let TeachSetup {
        hyps,
        domain,
        pref,
        cfg,
        oracle,
    } = *setup;
    let target = hyps.target();
    if initial == target {
        return Err(TeachError::InitialIsTarget);
    }
    if !cfg.myopic && oracle.is_none() {
        return Err(TeachError::Oracle(
            "an oracle when teaching non-myopically".into(),
        ));
    }
    let mut rng = match method {
        Method::RandomizedGreedy { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let cap = cfg.max_iterations.unwrap_or(10 * hyps.len());
    let mut learner = LearnerState::new(hyps, initial);
    // The non-adaptive teacher's guess at the learner's hypothesis.
    let mut simulated = initial;
    let mut transcript = TeachingTranscript {
        demos: Vec::new(),
        hypothesis_path: vec![initial],
        steps: Vec::new(),
        an_cost: 0,
        al_cost: 0,
        reached_target: false,
    };

    loop {
        let view = if cfg.adaptive {
            learner.current
        } else {
            simulated
        };
        if cfg.adaptive && learner.current == target {
            break;
        }
        if !cfg.adaptive && preferred_set(&learner.space, pref, target) == BTreeSet::from([target])
        {
            break;
        }
        if transcript.demos.len() >= cap {
            return Err(TeachError::IterationCap { cap });
        }
        let phase = match oracle {
            Some(o) if !cfg.myopic => o.intermediate(hyps, view, &learner.space),
            _ => target,
        };
        let preferred_for = |phase: usize| -> IdSet {
            let mut set = if cfg.adaptive {
                preferred_version_space(view, &learner.space, pref, phase)
            } else {
                preferred_set(&learner.space, pref, phase)
            };
            set.insert(phase);
            set
        };
        let run = |phase: usize,
                   preferred: &IdSet,
                   cache: Option<&mut DemoCache>,
                   rng: Option<&mut ChaCha8Rng>| {
            let protected: Vec<usize> = if phase == target {
                vec![]
            } else {
                vec![target]
            };
            let req = DemoRequest {
                hyps,
                domain,
                space: &learner.space,
                preferred,
                target: phase,
                protected: &protected,
                cfg,
            };
            match method {
                Method::Tlip => compute_demonstration(&req, cache),
                Method::Esmt => esmt_step(&req),
                Method::RandomizedGreedy { sample_size, .. } => randomized_step(
                    &req,
                    sample_size,
                    rng.expect("seeded for randomized greedy"),
                ),
            }
        };
        let mut preferred = preferred_for(phase);
        let mut phase_used = phase;
        let mut fallback = false;
        let mut choice = run(phase, &preferred, cache.as_deref_mut(), rng.as_mut());
        if phase != target
            && matches!(
                choice,
                Err(TeachError::NoProgress { .. } | TeachError::NothingToTeach)
            )
        {
            fallback = true;
            phase_used = target;
            preferred = preferred_for(target);
            choice = run(target, &preferred, cache.as_deref_mut(), rng.as_mut());
        }
        if matches!(choice, Err(TeachError::NothingToTeach)) {
            // Nothing preferred over the target survives, so the learner
            // moves to the target on any demonstration it is shown.
            let req = DemoRequest {
                hyps,
                domain,
                space: &learner.space,
                preferred: &preferred,
                target,
                protected: &[],
                cfg,
            };
            choice = shortest_demonstration(&req);
        }
        let DemoChoice {
            demo,
            eliminated,
            kappa,
            solver_time,
            nodes,
            exhausted,
        } = choice?;

        check_demonstration(&demo, hyps.target_formula())?;
        let bound = theorem1_lower_bound(
            hyps.target_formula(),
            eliminated.iter().map(|&id| hyps.formula(id)),
            demo.label,
        );
        if (demo.len() as u64) < bound {
            return Err(TeachError::Invariant(format!(
                "demonstration {demo} has length {} below the lower bound {bound}",
                demo.len()
            )));
        }
        if !domain.valid_trajectory(&demo.trajectory) {
            return Err(TeachError::Invariant(format!(
                "demonstration {demo} breaks the domain's transitions"
            )));
        }

        learner = learner_step(&learner, &demo, hyps.target_formula(), hyps, pref, ties)?;
        if !cfg.adaptive {
            let left: Vec<usize> = preferred
                .iter()
                .copied()
                .filter(|id| !eliminated.contains(id) && *id != target)
                .collect();
            simulated = match left.as_slice() {
                [] => target,
                [only] => *only,
                _ => AdversarialTies.choose(
                    &left,
                    &TieContext {
                        current: simulated,
                        space: &learner.space,
                        pref,
                        target,
                    },
                ),
            };
        }
        transcript.an_cost += 1;
        transcript.al_cost += demo.len();
        transcript.hypothesis_path.push(learner.current);
        transcript.steps.push(StepRecord {
            phase_target: phase_used,
            preferred: preferred.len(),
            kappa,
            eliminated: eliminated.len(),
            hypothesis: learner.current,
            solver_ms: solver_time.as_secs_f64() * 1e3,
            nodes,
            exhausted,
            fallback,
        });
        transcript.demos.push(demo);
    }
    transcript.reached_target = learner.current == target;
    Ok(transcript)
}

pub fn tlip_teach(
    setup: &TeachSetup<'_>,
    initial: usize,
    ties: &mut dyn TieBreaker,
) -> Result<TeachingTranscript, TeachError> {
    teach(setup, initial, Method::Tlip, ties, None)
}

pub fn esmt_teach(
    setup: &TeachSetup<'_>,
    initial: usize,
    ties: &mut dyn TieBreaker,
) -> Result<TeachingTranscript, TeachError> {
    teach(setup, initial, Method::Esmt, ties, None)
}

pub fn randomized_greedy_teach(
    setup: &TeachSetup<'_>,
    initial: usize,
    sample_size: usize,
    seed: u64,
    ties: &mut dyn TieBreaker,
) -> Result<TeachingTranscript, TeachError> {
    teach(
        setup,
        initial,
        Method::RandomizedGreedy { sample_size, seed },
        ties,
        None,
    )
}

/// TLIP restricted to positive demonstrations.
pub fn positive_only_teach(
    setup: &TeachSetup<'_>,
    initial: usize,
    ties: &mut dyn TieBreaker,
) -> Result<TeachingTranscript, TeachError> {
    let cfg: TeacherConfig = setup.cfg.clone().positive_only(true);
    let setup = TeachSetup {
        cfg: &cfg,
        ..*setup
    };
    teach(&setup, initial, Method::Tlip, ties, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{DemoLabel, Formula};
    use crate::teacher::Objective;

    fn suits() -> (HypothesisSet, StateDomain) {
        let mut fs = Vec::new();
        for s in ["Club", "Spade", "Diamond"] {
            for i in 0..=4 {
                fs.push(Formula::eventually(i, Formula::label(s)));
            }
        }
        (
            HypothesisSet::new(fs, 2).unwrap(),
            StateDomain::symbolic(&["Club", "Spade", "Diamond"]),
        )
    }

    #[test]
    fn worked_example_an() {
        let (hyps, domain) = suits();
        let cfg = TeacherConfig::new(Objective::AN, 5);
        let setup = TeachSetup {
            hyps: &hyps,
            domain: &domain,
            pref: &PreferenceModel::Uniform,
            cfg: &cfg,
            oracle: None,
        };
        for initial in (0..15).filter(|&i| i != 2) {
            let t = tlip_teach(&setup, initial, &mut AdversarialTies).unwrap();
            assert!(t.reached_target);
            assert_eq!(t.an_cost, 2);
            assert_eq!(t.demos[0].label, DemoLabel::Negative);
            // A length-4 negative demonstration already removes 11 of the 14.
            assert_eq!(t.demos[0].len(), 4);
            assert_eq!(t.al_cost, 7);
        }
    }

    #[test]
    fn initial_target_is_rejected() {
        let (hyps, domain) = suits();
        let cfg = TeacherConfig::new(Objective::AN, 5);
        let setup = TeachSetup {
            hyps: &hyps,
            domain: &domain,
            pref: &PreferenceModel::Uniform,
            cfg: &cfg,
            oracle: None,
        };
        assert_eq!(
            tlip_teach(&setup, 2, &mut AdversarialTies),
            Err(TeachError::InitialIsTarget)
        );
    }

    #[test]
    fn esmt_matches_tlip_per_step() {
        let (hyps, domain) = suits();
        for objective in [Objective::AN, Objective::AL] {
            let cfg = TeacherConfig::new(objective, 5);
            let setup = TeachSetup {
                hyps: &hyps,
                domain: &domain,
                pref: &PreferenceModel::Uniform,
                cfg: &cfg,
                oracle: None,
            };
            let a = tlip_teach(&setup, 0, &mut AdversarialTies).unwrap();
            let b = esmt_teach(&setup, 0, &mut AdversarialTies).unwrap();
            assert_eq!(a.demos, b.demos);
            let ka: Vec<usize> = a.steps.iter().map(|s| s.kappa).collect();
            let kb: Vec<usize> = b.steps.iter().map(|s| s.kappa).collect();
            assert_eq!(ka, kb);
        }
    }

    #[test]
    fn randomized_greedy_completes() {
        let (hyps, domain) = suits();
        let cfg = TeacherConfig::new(Objective::AN, 5);
        let setup = TeachSetup {
            hyps: &hyps,
            domain: &domain,
            pref: &PreferenceModel::Uniform,
            cfg: &cfg,
            oracle: None,
        };
        let t = randomized_greedy_teach(&setup, 0, 64, 7, &mut AdversarialTies).unwrap();
        assert!(t.reached_target);
        assert!(t.an_cost >= 2);
    }

    #[test]
    fn non_adaptive_stops_when_only_target_is_preferred() {
        let (hyps, domain) = suits();
        let cfg = TeacherConfig::new(Objective::AN, 5).adaptive(false);
        let setup = TeachSetup {
            hyps: &hyps,
            domain: &domain,
            pref: &PreferenceModel::Uniform,
            cfg: &cfg,
            oracle: None,
        };
        let t = tlip_teach(&setup, 0, &mut AdversarialTies).unwrap();
        assert_eq!(t.an_cost, 2);
        assert!(t.reached_target);
    }
}
