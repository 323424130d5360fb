//! Static analysis of formulas: minimal demonstration length and implication.

use thiserror::Error;

use crate::formula::{AtomicPredicate, DemoLabel, Formula, State, TemporalOp};
use crate::semantics::strong_sat_states;

/// `zeta(f, l)`: the shortest trajectory length on which `f` can receive the
/// strong verdict carried by label `l`.
///
/// `Or` and `Implies` are unfolded through their normalized form, so the
/// function is total on every AST.
pub fn minimal_length(f: &Formula, l: DemoLabel) -> u64 {
    use DemoLabel::*;
    match f {
        Formula::True | Formula::Atom(_) => 0,
        Formula::Not(a) => minimal_length(a, -l),
        Formula::And(a, b) => {
            let (x, y) = (minimal_length(a, l), minimal_length(b, l));
            match l {
                Positive => x.max(y),
                Negative => x.min(y),
            }
        }
        Formula::Or(a, b) => {
            // !( !a & !b )
            let (x, y) = (minimal_length(a, l), minimal_length(b, l));
            match l {
                Positive => x.min(y),
                Negative => x.max(y),
            }
        }
        Formula::Implies(a, b) => {
            let (x, y) = (minimal_length(a, -l), minimal_length(b, l));
            match l {
                Positive => x.min(y),
                Negative => x.max(y),
            }
        }
        Formula::Eventually(t, a) => match l {
            Positive => minimal_length(a, l),
            Negative => minimal_length(a, l) + *t as u64,
        },
        Formula::Always(t, a) => match l {
            Positive => minimal_length(a, l) + *t as u64,
            Negative => minimal_length(a, l),
        },
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Implication {
    Holds,
    Fails,
    Unknown,
}

/// Sound but incomplete implication check for `F[<=i](x<=v)` /
/// `G[<=i](x<=v)` shaped formulas.
///
/// The `Fails` answers assume every threshold lies below the domain maximum,
/// i.e. `x<=v` is not trivially true. Identical formulas always imply each
/// other; every other shape is `Unknown`.
pub fn implies_syntactic(f1: &Formula, f2: &Formula) -> Implication {
    if f1 == f2 {
        return Implication::Holds;
    }
    let (Some((op1, i1, p1)), Some((op2, i2, p2))) = (f1.as_temporal_atom(), f2.as_temporal_atom())
    else {
        return Implication::Unknown;
    };
    let (AtomicPredicate::Threshold(v1), AtomicPredicate::Threshold(v2)) = (p1, p2) else {
        return Implication::Unknown;
    };
    let holds = match (op1, op2) {
        (TemporalOp::Eventually, TemporalOp::Eventually) => i1 <= i2 && v1 <= v2,
        (TemporalOp::Always, TemporalOp::Always) => i1 >= i2 && v1 <= v2,
        (TemporalOp::Always, TemporalOp::Eventually) => v1 <= v2,
        (TemporalOp::Eventually, TemporalOp::Always) => return Implication::Unknown,
    };
    if holds {
        Implication::Holds
    } else {
        Implication::Fails
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("implication enumeration exceeded {limit} nodes")]
pub struct BudgetExceeded {
    pub limit: u64,
}

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

/// Semantic implication over bounded trajectories: every trajectory of length
/// `1..=max_len` over `alphabet` that strongly satisfies `f1` also strongly
/// satisfies `f2`.
///
/// States that agree on every atom of both formulas are interchangeable, so
/// only one representative per atom signature is enumerated.
pub fn implies_bruteforce(
    f1: &Formula,
    f2: &Formula,
    alphabet: &[State],
    max_len: usize,
    node_limit: u64,
) -> Result<bool, BudgetExceeded> {
    Ok(implication_witness(f1, f2, alphabet, max_len, node_limit)?.is_none())
}

/// Like [`implies_bruteforce`] but returns a counterexample trajectory.
pub fn implication_witness(
    f1: &Formula,
    f2: &Formula,
    alphabet: &[State],
    max_len: usize,
    node_limit: u64,
) -> Result<Option<Vec<State>>, BudgetExceeded> {
    if f1 == f2 || alphabet.is_empty() || max_len == 0 {
        return Ok(None);
    }
    let mut atoms = f1.atoms();
    atoms.extend(f2.atoms());
    atoms.sort();
    atoms.dedup();
    let mut reps: Vec<State> = Vec::new();
    let mut seen: Vec<Vec<bool>> = Vec::new();
    for s in alphabet {
        let sig: Vec<bool> = atoms.iter().map(|a| a.holds(s)).collect();
        if !seen.contains(&sig) {
            seen.push(sig);
            reps.push(s.clone());
        }
    }

    let mut search = Search {
        f1,
        f2,
        reps: &reps,
        max_len,
        nodes: 0,
        node_limit,
    };
    let mut prefix = Vec::with_capacity(max_len);
    search.extend(&mut prefix)
}

struct Search<'a> {
    f1: &'a Formula,
    f2: &'a Formula,
    reps: &'a [State],
    max_len: usize,
    nodes: u64,
    node_limit: u64,
}

impl Search<'_> {
    fn extend(&mut self, prefix: &mut Vec<State>) -> Result<Option<Vec<State>>, BudgetExceeded> {
        for s in self.reps {
            self.nodes += 1;
            if self.nodes > self.node_limit {
                return Err(BudgetExceeded {
                    limit: self.node_limit,
                });
            }
            prefix.push(s.clone());
            if strong_sat_states(prefix, self.f1) && !strong_sat_states(prefix, self.f2) {
                return Ok(Some(prefix.clone()));
            }
            if prefix.len() < self.max_len {
                if let Some(w) = self.extend(prefix)? {
                    return Ok(Some(w));
                }
            }
            prefix.pop();
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(text: &str) -> Formula {
        text.parse().unwrap()
    }

    fn numeric() -> Vec<State> {
        (0..=10).map(State::Num).collect()
    }

    #[test]
    fn zeta_unfolds() {
        assert_eq!(minimal_length(&f("F[<=4] (sym:S)"), DemoLabel::Negative), 4);
        assert_eq!(minimal_length(&f("G[<=2] (sym:C)"), DemoLabel::Positive), 2);
        assert_eq!(
            minimal_length(&f("(F[<=3] (sym:a) & G[<=5] (sym:b))"), DemoLabel::Positive),
            5
        );
        assert_eq!(
            minimal_length(&f("!G[<=2] (sym:C)"), DemoLabel::Negative),
            2
        );
    }

    #[test]
    fn derived_connectives_match_normal_form() {
        for text in [
            "(F[<=3] (x<=1) | G[<=2] (x<=4))",
            "(G[<=3] (x<=1) -> F[<=6] (x<=4))",
        ] {
            let g = f(text);
            for l in [DemoLabel::Positive, DemoLabel::Negative] {
                assert_eq!(minimal_length(&g, l), minimal_length(&g.normalize(), l));
            }
        }
    }

    #[test]
    fn syntactic_rules() {
        assert_eq!(
            implies_syntactic(&f("F[<=2] (x<=3)"), &f("F[<=4] (x<=5)")),
            Implication::Holds
        );
        assert_eq!(
            implies_syntactic(&f("G[<=4] (x<=3)"), &f("G[<=2] (x<=3)")),
            Implication::Holds
        );
        assert_eq!(
            implies_syntactic(&f("F[<=4] (x<=3)"), &f("G[<=2] (x<=3)")),
            Implication::Unknown
        );
        assert_eq!(
            implies_syntactic(&f("F[<=4] (x<=5)"), &f("F[<=2] (x<=3)")),
            Implication::Fails
        );
    }

    #[test]
    fn bruteforce_examples() {
        let s = numeric();
        let a = f("F[<=2] (x<=3)");
        let b = f("F[<=4] (x<=5)");
        assert!(implies_bruteforce(&a, &a, &s, 6, DEFAULT_NODE_LIMIT).unwrap());
        assert!(implies_bruteforce(&a, &b, &s, 6, DEFAULT_NODE_LIMIT).unwrap());
        let w = implication_witness(&b, &a, &s, 6, DEFAULT_NODE_LIMIT)
            .unwrap()
            .unwrap();
        assert!(strong_sat_states(&w, &b) && !strong_sat_states(&w, &a));
    }

    #[test]
    fn bruteforce_budget() {
        let s = numeric();
        let err = implies_bruteforce(&f("F[<=2] (x<=3)"), &f("F[<=4] (x<=5)"), &s, 6, 3);
        assert_eq!(err, Err(BudgetExceeded { limit: 3 }));
    }
}
