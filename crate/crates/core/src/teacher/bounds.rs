//! Length bounds on demonstrations and necessary conditions for teachability
//! under global preferences.

use serde::{Deserialize, Serialize};

use crate::analysis::{implies_syntactic, minimal_length, Implication};
use crate::formula::{DemoLabel, Formula};
use crate::learner::{preferred_set, HypothesisSet, PreferenceModel, VersionSpace};
use crate::semantics::Demonstration;

/// `max{zeta(target, l), max_i zeta(phi_i, -l)}` over the eliminated
/// formulas: no shorter demonstration with label `l` can be valid for the
/// target and eliminate all of them.
pub fn theorem1_lower_bound<'a>(
    target: &Formula,
    eliminated: impl IntoIterator<Item = &'a Formula>,
    label: DemoLabel,
) -> u64 {
    eliminated
        .into_iter()
        .map(|f| minimal_length(f, -label))
        .fold(minimal_length(target, label), u64::max)
}

/// A demonstration-length requirement and what the sequence provides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthCheck {
    pub holds: bool,
    pub required: u64,
    /// Longest demonstration in the sequence (0 when empty).
    pub available: u64,
    /// The preferred hypothesis that sets the requirement.
    pub witness: Option<usize>,
}

/// Whether some preferred hypothesis is implied by the target (such a
/// hypothesis survives every positive demonstration).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationCheck {
    pub holds: bool,
    pub witness: Option<usize>,
    /// Preferred hypotheses whose implication status the syntactic rules
    /// cannot decide; treated as not implied.
    pub undecided: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeachabilityReport {
    /// Positive-only length condition.
    pub positive_length: LengthCheck,
    /// Positive-only implication condition.
    pub implication: ImplicationCheck,
    /// Mixed-label length condition.
    pub mixed_length: LengthCheck,
}

impl TeachabilityReport {
    pub fn positive_only_holds(&self) -> bool {
        self.positive_length.holds && self.implication.holds
    }
}

fn length_check(required: impl Iterator<Item = (usize, u64)>, available: u64) -> LengthCheck {
    let worst = required.max_by_key(|&(id, z)| (z, std::cmp::Reverse(id)));
    let required = worst.map_or(0, |(_, z)| z);
    LengthCheck {
        holds: available >= required,
        required,
        available,
        witness: worst.map(|(id, _)| id),
    }
}

/// Evaluates the necessary conditions for teaching the target from `demos`
/// to a learner with a global preference model: the positive-only length and
/// implication conditions, and the mixed-label length condition.
pub fn teachability_checks(
    hyps: &HypothesisSet,
    pref: &PreferenceModel,
    demos: &[Demonstration],
) -> TeachabilityReport {
    let target = hyps.target();
    let preferred = preferred_set(&VersionSpace::full(hyps), pref, target);
    let available = demos.iter().map(|d| d.len() as u64).max().unwrap_or(0);
    let others: Vec<usize> = preferred
        .iter()
        .copied()
        .filter(|&id| id != target)
        .collect();

    let positive_length = length_check(
        others
            .iter()
            .map(|&id| (id, minimal_length(hyps.formula(id), DemoLabel::Negative))),
        available,
    );
    let mixed_length = length_check(
        preferred.iter().map(|&id| {
            let f = hyps.formula(id);
            (
                id,
                minimal_length(f, DemoLabel::Positive).min(minimal_length(f, DemoLabel::Negative)),
            )
        }),
        available,
    );
    let mut witness = None;
    let mut undecided = Vec::new();
    for &id in &others {
        match implies_syntactic(hyps.target_formula(), hyps.formula(id)) {
            Implication::Holds if witness.is_none() => witness = Some(id),
            Implication::Unknown => undecided.push(id),
            _ => {}
        }
    }
    TeachabilityReport {
        positive_length,
        implication: ImplicationCheck {
            holds: witness.is_none(),
            witness,
            undecided,
        },
        mixed_length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        let club = f("F[<=2] (sym:Club)");
        assert_eq!(
            theorem1_lower_bound(&club, [&f("F[<=4] (sym:Spade)")], DemoLabel::Positive),
            4
        );
        assert_eq!(
            theorem1_lower_bound(&club, [], DemoLabel::Negative),
            minimal_length(&club, DemoLabel::Negative)
        );
        let gone = [
            f("F[<=4] (sym:Spade)"),
            f("F[<=3] (sym:Club)"),
            f("F[<=1] (sym:Diamond)"),
        ];
        assert!(theorem1_lower_bound(&club, &gone, DemoLabel::Negative) <= 5);
    }

    #[test]
    fn implied_preferred_hypothesis_blocks_positive_teaching() {
        let hyps = HypothesisSet::new(
            vec![f("F[<=2] (x<=3)"), f("F[<=4] (x<=5)"), f("G[<=1] (x<=2)")],
            0,
        )
        .unwrap();
        let pref = PreferenceModel::ranked(vec![2.0, 1.0, 3.0]);
        let report = teachability_checks(&hyps, &pref, &[]);
        assert!(!report.implication.holds);
        assert_eq!(report.implication.witness, Some(1));
        assert!(!report.positive_only_holds());
    }

    #[test]
    fn only_target_preferred_holds_vacuously() {
        let hyps = HypothesisSet::new(vec![f("F[<=2] (x<=3)"), f("F[<=4] (x<=5)")], 0).unwrap();
        let pref = PreferenceModel::ranked(vec![1.0, 2.0]);
        let report = teachability_checks(&hyps, &pref, &[]);
        assert!(report.positive_only_holds());
        assert_eq!(report.positive_length.required, 0);
        assert!(report.mixed_length.holds);
    }
}
