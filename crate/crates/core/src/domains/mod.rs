//! State domains: the numeric threshold world, small symbolic alphabets and
//! the colored gridworld, plus hypothesis-grid generators over them.

mod grid;
pub mod gridworld;

use serde::{Deserialize, Serialize};

use crate::formula::State;
use crate::semantics::Trajectory;

pub use grid::{generate_hypothesis_grid, GridCoord, HypothesisGrid};
pub use gridworld::{Color, ColorMap, GridError, Gridworld};

/// Allowed successor relation over alphabet indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionConstraint {
    allowed: Vec<Vec<bool>>,
}

impl TransitionConstraint {
    /// Every transition allowed.
    pub fn free(n: usize) -> Self {
        TransitionConstraint {
            allowed: vec![vec![true; n]; n],
        }
    }

    pub fn from_matrix(allowed: Vec<Vec<bool>>) -> Self {
        TransitionConstraint { allowed }
    }

    pub fn forbid(&mut self, from: usize, to: usize) {
        self.allowed[from][to] = false;
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.allowed[from][to]
    }

    pub fn size(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_free(&self) -> bool {
        self.allowed.iter().all(|row| row.iter().all(|&a| a))
    }
}

#[derive(Clone, Debug)]
pub enum DomainKind {
    /// States `0..=max`.
    Numeric { max: u32 },
    /// A finite alphabet of named symbols.
    Symbolic,
    /// Color observations of a 9x9 cell grid.
    Gridworld(Box<Gridworld>),
}

/// A finite, totally ordered state alphabet with an optional transition
/// relation. The alphabet order drives solver branching and tie-breaking.
#[derive(Clone, Debug)]
pub struct StateDomain {
    kind: DomainKind,
    alphabet: Vec<State>,
    transitions: Option<TransitionConstraint>,
}

impl StateDomain {
    /// The `{0, ..., 10}` threshold world.
    pub fn numeric() -> Self {
        Self::numeric_with_max(10)
    }

    pub fn numeric_with_max(max: u32) -> Self {
        StateDomain {
            kind: DomainKind::Numeric { max },
            alphabet: (0..=max).map(State::Num).collect(),
            transitions: None,
        }
    }

    /// Named symbols in the given order, e.g. card suits.
    pub fn symbolic(names: &[&str]) -> Self {
        StateDomain {
            kind: DomainKind::Symbolic,
            alphabet: names.iter().map(|n| State::sym(n)).collect(),
            transitions: None,
        }
    }

    /// Gridworld whose visible alphabet is the four colors in `Color` order,
    /// constrained by the world's color-transition relation.
    pub fn gridworld(world: Gridworld) -> Self {
        let transitions = world.transitions().clone();
        StateDomain {
            alphabet: Color::ALL.iter().map(|c| c.state()).collect(),
            kind: DomainKind::Gridworld(Box::new(world)),
            transitions: Some(transitions),
        }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, DomainKind::Numeric { .. })
    }

    pub fn alphabet(&self) -> &[State] {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn state(&self, idx: usize) -> &State {
        &self.alphabet[idx]
    }

    pub fn index_of(&self, s: &State) -> Option<usize> {
        self.alphabet.iter().position(|x| x == s)
    }

    /// Transition relation, `None` when unconstrained.
    pub fn transitions(&self) -> Option<&TransitionConstraint> {
        self.transitions.as_ref()
    }

    pub fn with_transitions(mut self, t: TransitionConstraint) -> Self {
        assert_eq!(
            t.size(),
            self.alphabet.len(),
            "transition relation size mismatch"
        );
        self.transitions = Some(t);
        self
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.transitions
            .as_ref()
            .map_or(true, |t| t.allows(from, to))
    }

    /// All states in the alphabet and every consecutive pair allowed.
    pub fn valid_trajectory(&self, rho: &Trajectory) -> bool {
        let mut prev: Option<usize> = None;
        for s in rho.states() {
            let Some(i) = self.index_of(s) else {
                return false;
            };
            if let Some(p) = prev {
                if !self.allows(p, i) {
                    return false;
                }
            }
            prev = Some(i);
        }
        true
    }

    pub fn trajectory(&self, idx: &[usize]) -> Trajectory {
        Trajectory::new(idx.iter().map(|&i| self.alphabet[i].clone()).collect())
            .expect("non-empty index sequence")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_alphabet() {
        let d = StateDomain::numeric();
        assert_eq!(d.size(), 11);
        assert!(d.valid_trajectory(&"3,7,0".parse().unwrap()));
        assert!(!d.valid_trajectory(&"3,11".parse().unwrap()));
        assert_eq!(d.index_of(&State::Num(4)), Some(4));
    }

    #[test]
    fn symbolic_order_is_kept() {
        let d = StateDomain::symbolic(&["Club", "Spade", "Diamond"]);
        assert_eq!(d.state(1), &State::sym("Spade"));
        assert!(d.transitions().is_none());
    }

    #[test]
    fn gridworld_transition_rules() {
        let d = StateDomain::gridworld(Gridworld::default_world());
        assert_eq!(d.size(), 4);
        assert!(d.valid_trajectory(&"Red,Blue".parse().unwrap()));
        assert!(!d.valid_trajectory(&"Red,Green".parse().unwrap()));
        assert!(!d.valid_trajectory(&"Green,Red".parse().unwrap()));
        assert!(d.valid_trajectory(&"Green,Yellow,Red".parse().unwrap()));
    }
}
