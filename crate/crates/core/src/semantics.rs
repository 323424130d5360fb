//! Strong and weak Boolean views of formulas on finite trajectories, and the
//! three-valued verdict derived from them.
//!
//! Both views are computed together, bottom-up, as tables indexed by time
//! `0..=L`; every index at or past the end of the trajectory behaves the same,
//! so index `L` stands for all of them. Negation swaps the views.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{DemoLabel, Formula, State};

/// A finite, non-empty state sequence `s_0 s_1 ... s_{L-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<State>", into = "Vec<State>")]
pub struct Trajectory {
    states: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrajectoryError {
    #[error("a trajectory needs at least one state")]
    Empty,
    #[error("empty state token at position {0}")]
    EmptyToken(usize),
}

impl Trajectory {
    pub fn new(states: Vec<State>) -> Result<Self, TrajectoryError> {
        if states.is_empty() {
            return Err(TrajectoryError::Empty);
        }
        Ok(Trajectory { states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn get(&self, t: usize) -> Option<&State> {
        self.states.get(t)
    }

    pub fn prefix(&self, len: usize) -> Option<Trajectory> {
        if len == 0 || len > self.states.len() {
            return None;
        }
        Some(Trajectory {
            states: self.states[..len].to_vec(),
        })
    }

    pub fn extended(&self, tail: &[State]) -> Trajectory {
        let mut states = self.states.clone();
        states.extend_from_slice(tail);
        Trajectory { states }
    }
}

impl TryFrom<Vec<State>> for Trajectory {
    type Error = TrajectoryError;

    fn try_from(states: Vec<State>) -> Result<Self, Self::Error> {
        Trajectory::new(states)
    }
}

impl From<Trajectory> for Vec<State> {
    fn from(t: Trajectory) -> Self {
        t.states
    }
}

impl fmt::Debug for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Comma-separated state tokens: `3,7,2,0` or `Red,Blue,Green`.
impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Trajectory {
    type Err = TrajectoryError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut states = Vec::new();
        for (i, tok) in text.split(',').enumerate() {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(TrajectoryError::EmptyToken(i));
            }
            match tok.parse::<u32>() {
                Ok(v) => states.push(State::Num(v)),
                Err(_) => states.push(State::sym(tok)),
            }
        }
        Trajectory::new(states)
    }
}

/// `c(phi, rho)`: strong satisfaction, undetermined, or strong violation at
/// time 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Verdict {
    StrongSat,
    Undetermined,
    StrongViol,
}

impl Verdict {
    pub fn value(self) -> i8 {
        match self {
            Verdict::StrongSat => 1,
            Verdict::Undetermined => 0,
            Verdict::StrongViol => -1,
        }
    }

    pub fn negate(self) -> Verdict {
        match self {
            Verdict::StrongSat => Verdict::StrongViol,
            Verdict::Undetermined => Verdict::Undetermined,
            Verdict::StrongViol => Verdict::StrongSat,
        }
    }

    /// The strong verdict that a demonstration with this label carries.
    pub fn of_label(label: DemoLabel) -> Verdict {
        match label {
            DemoLabel::Positive => Verdict::StrongSat,
            DemoLabel::Negative => Verdict::StrongViol,
        }
    }

    pub fn as_label(self) -> Option<DemoLabel> {
        match self {
            Verdict::StrongSat => Some(DemoLabel::Positive),
            Verdict::StrongViol => Some(DemoLabel::Negative),
            Verdict::Undetermined => None,
        }
    }
}

/// A labeled trajectory.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Demonstration {
    pub trajectory: Trajectory,
    pub label: DemoLabel,
}

impl Demonstration {
    pub fn new(trajectory: Trajectory, label: DemoLabel) -> Self {
        Demonstration { trajectory, label }
    }

    pub fn len(&self) -> usize {
        self.trajectory.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Demonstration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.trajectory, self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("demonstration {demo} is labeled {label} but the target's verdict on it is {verdict:?}")]
pub struct MalformedDemonstration {
    pub demo: String,
    pub label: DemoLabel,
    pub verdict: Verdict,
}

struct Views {
    strong: Vec<bool>,
    weak: Vec<bool>,
}

fn evaluate(f: &Formula, states: &[State]) -> Views {
    let len = states.len();
    let horizon = len + 1;
    match f {
        Formula::True => Views {
            strong: (0..horizon).map(|t| t < len).collect(),
            weak: vec![true; horizon],
        },
        Formula::Atom(a) => {
            let mut strong: Vec<bool> = states.iter().map(|s| a.holds(s)).collect();
            let mut weak = strong.clone();
            strong.push(false);
            weak.push(true);
            Views { strong, weak }
        }
        Formula::Not(a) => {
            let inner = evaluate(a, states);
            Views {
                strong: inner.weak.iter().map(|w| !w).collect(),
                weak: inner.strong.iter().map(|s| !s).collect(),
            }
        }
        Formula::And(a, b) => {
            let (x, y) = (evaluate(a, states), evaluate(b, states));
            zip_views(&x, &y, |p, q| p && q, |p, q| p && q)
        }
        Formula::Or(a, b) => {
            let (x, y) = (evaluate(a, states), evaluate(b, states));
            zip_views(&x, &y, |p, q| p || q, |p, q| p || q)
        }
        Formula::Implies(a, b) => {
            // a -> b == !a | b
            let (x, y) = (evaluate(a, states), evaluate(b, states));
            Views {
                strong: (0..horizon).map(|t| !x.weak[t] || y.strong[t]).collect(),
                weak: (0..horizon).map(|t| !x.strong[t] || y.weak[t]).collect(),
            }
        }
        Formula::Eventually(bound, a) => {
            let inner = evaluate(a, states);
            Views {
                strong: window(&inner.strong, *bound, |w| w.iter().any(|&v| v)),
                weak: window(&inner.weak, *bound, |w| w.iter().any(|&v| v)),
            }
        }
        Formula::Always(bound, a) => {
            let inner = evaluate(a, states);
            Views {
                strong: window(&inner.strong, *bound, |w| w.iter().all(|&v| v)),
                weak: window(&inner.weak, *bound, |w| w.iter().all(|&v| v)),
            }
        }
    }
}

fn zip_views(
    x: &Views,
    y: &Views,
    strong: impl Fn(bool, bool) -> bool,
    weak: impl Fn(bool, bool) -> bool,
) -> Views {
    Views {
        strong: x
            .strong
            .iter()
            .zip(&y.strong)
            .map(|(&p, &q)| strong(p, q))
            .collect(),
        weak: x
            .weak
            .iter()
            .zip(&y.weak)
            .map(|(&p, &q)| weak(p, q))
            .collect(),
    }
}

/// Aggregates `values[t..=t+bound]`, clamping at the past-the-end slot.
fn window(values: &[bool], bound: u32, agg: impl Fn(&[bool]) -> bool) -> Vec<bool> {
    let last = values.len() - 1;
    (0..values.len())
        .map(|t| {
            let end = t.saturating_add(bound as usize).min(last);
            agg(&values[t..=end])
        })
        .collect()
}

fn slot(t: usize, len: usize) -> usize {
    t.min(len)
}

/// `(rho, t) |=_S f`.
pub fn strong_sat(rho: &Trajectory, t: usize, f: &Formula) -> bool {
    evaluate(f, rho.states()).strong[slot(t, rho.len())]
}

/// Strong satisfaction at time 0 on a raw, non-empty state slice.
pub fn strong_sat_states(states: &[State], f: &Formula) -> bool {
    evaluate(f, states).strong[0]
}

/// `(rho, t) |=_W f`.
pub fn weak_sat(rho: &Trajectory, t: usize, f: &Formula) -> bool {
    evaluate(f, rho.states()).weak[slot(t, rho.len())]
}

/// Both views at time `t` in one pass: `(strong, weak)`.
pub fn views_at(rho: &Trajectory, t: usize, f: &Formula) -> (bool, bool) {
    let v = evaluate(f, rho.states());
    let i = slot(t, rho.len());
    (v.strong[i], v.weak[i])
}

pub fn verdict(f: &Formula, rho: &Trajectory) -> Verdict {
    verdict_on_states(f, rho.states())
}

/// Verdict on a raw state slice; used by enumeration loops that avoid
/// allocating a [`Trajectory`] per candidate. The slice must be non-empty.
pub fn verdict_on_states(f: &Formula, states: &[State]) -> Verdict {
    debug_assert!(!states.is_empty());
    let v = evaluate(f, states);
    if v.strong[0] {
        Verdict::StrongSat
    } else if !v.weak[0] {
        Verdict::StrongViol
    } else {
        Verdict::Undetermined
    }
}

/// Checks that the demonstration's label matches the target's strong verdict.
pub fn check_demonstration(
    demo: &Demonstration,
    target: &Formula,
) -> Result<(), MalformedDemonstration> {
    let v = verdict(target, &demo.trajectory);
    if v == Verdict::of_label(demo.label) {
        Ok(())
    } else {
        Err(MalformedDemonstration {
            demo: demo.to_string(),
            label: demo.label,
            verdict: v,
        })
    }
}

/// Whether `demo` (valid for `target`) eliminates `f`.
pub fn strongly_inconsistent(
    demo: &Demonstration,
    target: &Formula,
    f: &Formula,
) -> Result<bool, MalformedDemonstration> {
    check_demonstration(demo, target)?;
    Ok(eliminates(demo, f))
}

/// The elimination test without re-validating the demonstration against the
/// target: `f`'s strong verdict opposes the label.
pub fn eliminates(demo: &Demonstration, f: &Formula) -> bool {
    verdict(f, &demo.trajectory) == Verdict::of_label(-demo.label)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suits(text: &str) -> Trajectory {
        text.parse().unwrap()
    }

    fn f(text: &str) -> Formula {
        text.parse().unwrap()
    }

    #[test]
    fn worked_example_demonstrations() {
        let target = f("F[<=2] (sym:C)");
        let pos = suits("S,D,C");
        let neg = suits("S,D,S,C,C");
        assert!(strong_sat(&pos, 0, &target));
        assert!(!strong_sat(&neg, 0, &target));
        assert_eq!(verdict(&target, &pos), Verdict::StrongSat);
        assert_eq!(verdict(&target, &neg), Verdict::StrongViol);
        assert!(weak_sat(&pos, 0, &target));
    }

    #[test]
    fn atoms_past_the_end() {
        let rho = suits("1,2");
        let atom = f("x<=5");
        assert!(!strong_sat(&rho, 5, &atom));
        assert!(weak_sat(&rho, 5, &atom));
        assert!(!strong_sat(&rho, 2, &f("T")));
        assert!(weak_sat(&rho, 2, &f("T")));
    }

    #[test]
    fn short_trajectory_leaves_eventually_open() {
        let rho = suits("C,D");
        let g = f("F[<=4] (sym:S)");
        assert!(weak_sat(&rho, 0, &g));
        assert!(weak_sat(&rho, 0, &Formula::not(g.clone())));
        assert_eq!(verdict(&g, &rho), Verdict::Undetermined);
        assert_eq!(verdict(&f("F[<=4] (sym:C)"), &rho), Verdict::StrongSat);
    }

    #[test]
    fn inconsistency_requires_strong_verdict() {
        let target = f("F[<=2] (sym:C)");
        let neg = Demonstration::new(suits("S,D,S,C,C"), DemoLabel::Negative);
        assert!(strongly_inconsistent(&neg, &target, &f("F[<=4] (sym:C)")).unwrap());
        let pos = Demonstration::new(suits("S,D,C"), DemoLabel::Positive);
        assert!(!strongly_inconsistent(&pos, &target, &target).unwrap());
        let short = Demonstration::new(suits("C,D"), DemoLabel::Positive);
        assert!(
            !strongly_inconsistent(&short, &f("F[<=0] (sym:C)"), &f("F[<=4] (sym:S)")).unwrap()
        );
    }

    #[test]
    fn malformed_demonstration_is_rejected() {
        let target = f("F[<=2] (sym:C)");
        let wrong = Demonstration::new(suits("S,D,C"), DemoLabel::Negative);
        let err = strongly_inconsistent(&wrong, &target, &target).unwrap_err();
        assert_eq!(err.verdict, Verdict::StrongSat);
    }

    #[test]
    fn trajectory_text_round_trip() {
        let t: Trajectory = "3, 7,2,0".parse().unwrap();
        assert_eq!(t.to_string(), "3,7,2,0");
        assert_eq!(t.len(), 4);
        assert_eq!(
            "Red,Blue".parse::<Trajectory>().unwrap().states()[1],
            State::sym("Blue")
        );
        assert_eq!(
            "".parse::<Trajectory>(),
            Err(TrajectoryError::EmptyToken(0))
        );
        assert_eq!(
            "1,,2".parse::<Trajectory>(),
            Err(TrajectoryError::EmptyToken(1))
        );
        assert!(Trajectory::new(vec![]).is_err());
    }

    #[test]
    fn huge_bounds_do_not_overflow() {
        let rho = suits("1,2,3");
        assert_eq!(
            verdict(&f("F[<=4294967295] (x<=3)"), &rho),
            Verdict::StrongSat
        );
        assert_eq!(
            verdict(&f("G[<=4294967295] (x<=3)"), &rho),
            Verdict::Undetermined
        );
    }
}
