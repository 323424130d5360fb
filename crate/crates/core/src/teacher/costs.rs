//! Teaching costs of transcripts, worst cases over the learner's tie breaks,
//! and teaching complexities on tiny instances.

use serde::{Deserialize, Serialize};

use super::demo::DemoCache;
use super::session::{teach, Method, TeachSetup, TeachingTranscript};
use super::setcover::{enumerate_pool, optimal_teach_setcover, SetCoverError};
use super::{Objective, TeachError};
use crate::learner::{preferred_version_space, ScriptedTies, VersionSpace};

/// `(AN, AL)`: number of demonstrations and their summed lengths.
pub fn cost_metrics(t: &TeachingTranscript) -> (usize, usize) {
    (t.demos.len(), t.demos.iter().map(|d| d.len()).sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorstCase {
    pub an: usize,
    pub al: usize,
    /// Number of tie-break realizations enumerated.
    pub realizations: usize,
    /// Whether every realization ended at the target.
    pub all_reached: bool,
}

/// Maximum AN and AL cost over every tie-break realization of the learner,
/// enumerated like an odometer over the tie sets it meets. Fails when more
/// than `max_realizations` runs would be needed.
pub fn worst_case_costs(
    setup: &TeachSetup<'_>,
    initial: usize,
    method: Method,
    max_realizations: usize,
) -> Result<WorstCase, TeachError> {
    let mut cache = DemoCache::default();
    let mut script = Vec::new();
    let mut worst = WorstCase {
        an: 0,
        al: 0,
        realizations: 0,
        all_reached: true,
    };
    loop {
        if worst.realizations >= max_realizations {
            return Err(TeachError::Budget(format!(
                "more than {max_realizations} tie-break realizations"
            )));
        }
        let mut ties = ScriptedTies::new(script);
        let cache_ref = matches!(method, Method::Tlip).then_some(&mut cache);
        let t = teach(setup, initial, method, &mut ties, cache_ref)?;
        let (an, al) = cost_metrics(&t);
        worst.an = worst.an.max(an);
        worst.al = worst.al.max(al);
        worst.all_reached &= t.reached_target;
        worst.realizations += 1;
        match ties.next_script() {
            Some(next) => script = next,
            None => return Ok(worst),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complexity {
    pub an: usize,
    pub al: usize,
    /// Size of the initial preferred version space, target included.
    pub preferred: usize,
    pub pool: usize,
}

/// AN and AL teaching complexities: the cheapest covers, over every valid
/// demonstration up to `max_len`, of the hypotheses the learner prefers to
/// the target from its initial hypothesis.
pub fn teaching_complexity(
    setup: &TeachSetup<'_>,
    initial: usize,
    max_len: usize,
) -> Result<Complexity, SetCoverError> {
    let hyps = setup.hyps;
    let target = hyps.target();
    let mut preferred =
        preferred_version_space(initial, &VersionSpace::full(hyps), setup.pref, target);
    preferred.insert(target);
    let pool = enumerate_pool(hyps, setup.domain, max_len, setup.cfg.positive_only);
    if preferred.len() == 1 {
        // Nothing to eliminate, but the learner only moves when shown a
        // demonstration: one of the shortest valid ones is optimal.
        let shortest = pool.first().ok_or(SetCoverError::Uncoverable(initial))?;
        return Ok(Complexity {
            an: 1,
            al: shortest.len(),
            preferred: 1,
            pool: pool.len(),
        });
    }
    let an = optimal_teach_setcover(&pool, hyps, &preferred, Objective::AN)?;
    let al = optimal_teach_setcover(&pool, hyps, &preferred, Objective::AL)?;
    Ok(Complexity {
        an: an.cost,
        al: al.cost,
        preferred: preferred.len(),
        pool: pool.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::StateDomain;
    use crate::formula::Formula;
    use crate::learner::{HypothesisSet, PreferenceModel};
    use crate::teacher::TeacherConfig;

    #[test]
    fn worked_example_costs_and_complexity() {
        let mut fs = Vec::new();
        for s in ["Club", "Spade", "Diamond"] {
            for i in 0..=4 {
                fs.push(Formula::eventually(i, Formula::label(s)));
            }
        }
        let hyps = HypothesisSet::new(fs, 2).unwrap();
        let domain = StateDomain::symbolic(&["Club", "Spade", "Diamond"]);
        let cfg = TeacherConfig::new(Objective::AN, 5);
        let setup = TeachSetup {
            hyps: &hyps,
            domain: &domain,
            pref: &PreferenceModel::Uniform,
            cfg: &cfg,
            oracle: None,
        };
        let worst = worst_case_costs(&setup, 0, Method::Tlip, 1000).unwrap();
        assert_eq!((worst.an, worst.al), (2, 7));
        assert!(worst.all_reached);
        let c = teaching_complexity(&setup, 0, 5).unwrap();
        assert_eq!((c.an, c.al), (2, 7));
        assert_eq!(c.preferred, 15);
    }

    #[test]
    fn empty_transcript_costs_nothing() {
        let t = TeachingTranscript {
            demos: vec![],
            hypothesis_path: vec![0],
            steps: vec![],
            an_cost: 0,
            al_cost: 0,
            reached_target: false,
        };
        assert_eq!(cost_metrics(&t), (0, 0));
    }
}
