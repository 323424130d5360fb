//! Formula syntax for the bounded (F,G)-fragment: atomic predicates, Boolean
//! connectives and the parameterized `F[<=N]` / `G[<=N]` operators.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// A symbol of a finite state alphabet, e.g. a color in the gridworld.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// One element of a trajectory. Numeric domains use `Num`, labelled domains
/// (colors, card suits) use `Sym`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum State {
    Num(u32),
    Sym(Symbol),
}

impl State {
    pub fn sym(name: &str) -> Self {
        State::Sym(Symbol::new(name))
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Num(v) => write!(f, "{v}"),
            State::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// An atomic predicate evaluated on a single state.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum AtomicPredicate {
    /// `x<=bound` on numeric states.
    Threshold(u32),
    /// `sym:NAME`, true exactly on the named state.
    Label(Symbol),
}

impl AtomicPredicate {
    pub fn holds(&self, state: &State) -> bool {
        match (self, state) {
            (AtomicPredicate::Threshold(bound), State::Num(x)) => x <= bound,
            (AtomicPredicate::Label(sym), State::Sym(s)) => sym == s,
            _ => false,
        }
    }
}

/// Label of a demonstration.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum DemoLabel {
    Positive,
    Negative,
}

impl DemoLabel {
    pub fn sign(self) -> i8 {
        match self {
            DemoLabel::Positive => 1,
            DemoLabel::Negative => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            DemoLabel::Positive => DemoLabel::Negative,
            DemoLabel::Negative => DemoLabel::Positive,
        }
    }
}

impl std::ops::Neg for DemoLabel {
    type Output = DemoLabel;

    fn neg(self) -> DemoLabel {
        self.flip()
    }
}

impl fmt::Display for DemoLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DemoLabel::Positive => f.write_str("+1"),
            DemoLabel::Negative => f.write_str("-1"),
        }
    }
}

/// Temporal operator of a grid-shaped hypothesis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum TemporalOp {
    Eventually,
    Always,
}

/// Formula AST. `Or` and `Implies` are kept as written and only rewritten to
/// the base grammar by [`Formula::normalize`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Formula {
    True,
    Atom(AtomicPredicate),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Eventually(u32, Box<Formula>),
    Always(u32, Box<Formula>),
}

impl Formula {
    pub fn threshold(bound: u32) -> Self {
        Formula::Atom(AtomicPredicate::Threshold(bound))
    }

    pub fn label(name: &str) -> Self {
        Formula::Atom(AtomicPredicate::Label(Symbol::new(name)))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn eventually(bound: u32, f: Formula) -> Self {
        Formula::Eventually(bound, Box::new(f))
    }

    pub fn always(bound: u32, f: Formula) -> Self {
        Formula::Always(bound, Box::new(f))
    }

    /// Rewrites `Or` and `Implies` into `Not`/`And`. The result only uses
    /// `True`, `Atom`, `Not`, `And`, `Eventually` and `Always`.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::True | Formula::Atom(_) => self.clone(),
            Formula::Not(a) => Formula::not(a.normalize()),
            Formula::And(a, b) => Formula::and(a.normalize(), b.normalize()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.normalize()),
                Formula::not(b.normalize()),
            )),
            Formula::Implies(a, b) => {
                Formula::or(Formula::not((**a).clone()), (**b).clone()).normalize()
            }
            Formula::Eventually(t, a) => Formula::eventually(*t, a.normalize()),
            Formula::Always(t, a) => Formula::always(*t, a.normalize()),
        }
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            Formula::True | Formula::Atom(_) => true,
            Formula::Not(a) | Formula::Eventually(_, a) | Formula::Always(_, a) => {
                a.is_normalized()
            }
            Formula::And(a, b) => a.is_normalized() && b.is_normalized(),
            Formula::Or(..) | Formula::Implies(..) => false,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::Atom(_) => 0,
            Formula::Not(a) | Formula::Eventually(_, a) | Formula::Always(_, a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Sum of all temporal bounds in the formula.
    pub fn total_horizon(&self) -> u64 {
        match self {
            Formula::True | Formula::Atom(_) => 0,
            Formula::Not(a) => a.total_horizon(),
            Formula::Eventually(t, a) | Formula::Always(t, a) => *t as u64 + a.total_horizon(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.total_horizon() + b.total_horizon()
            }
        }
    }

    /// Collects the distinct atomic predicates occurring in the formula.
    pub fn atoms(&self) -> Vec<AtomicPredicate> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_atoms(&self, out: &mut Vec<AtomicPredicate>) {
        match self {
            Formula::True => {}
            Formula::Atom(a) => out.push(a.clone()),
            Formula::Not(a) | Formula::Eventually(_, a) | Formula::Always(_, a) => {
                a.collect_atoms(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Splits `F[<=i] p` / `G[<=i] p` with an atomic `p` into its parts.
    pub fn as_temporal_atom(&self) -> Option<(TemporalOp, u32, &AtomicPredicate)> {
        match self {
            Formula::Eventually(t, body) => match body.as_ref() {
                Formula::Atom(a) => Some((TemporalOp::Eventually, *t, a)),
                _ => None,
            },
            Formula::Always(t, body) => match body.as_ref() {
                Formula::Atom(a) => Some((TemporalOp::Always, *t, a)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Canonical text form, see [`crate::parse`] for the grammar.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("T"),
            Formula::Atom(AtomicPredicate::Threshold(v)) => write!(f, "(x<={v})"),
            Formula::Atom(AtomicPredicate::Label(s)) => write!(f, "(sym:{s})"),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Eventually(t, a) => write!(f, "F[<={t}] {a}"),
            Formula::Always(t, a) => write!(f, "G[<={t}] {a}"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::parse::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parse::parse(s)
    }
}
