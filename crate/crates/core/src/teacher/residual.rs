//! Hash-consed residual formulas under progression.
//!
//! Progressing a formula through the state at time `t` yields a residual whose
//! strong and weak views at `t + 1` equal the original's views at `t`. The
//! solver keys its memo on residual ids, so trajectories that leave every
//! formula in the same residual share one subproblem.

use std::collections::HashMap;

use crate::formula::{AtomicPredicate, Formula, State};
use crate::semantics::Verdict;

pub type Rid = u32;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Node {
    Const(bool),
    /// Index into the atom truth table; `T` is the atom true everywhere.
    Atom(u32),
    Not(Rid),
    And(Box<[Rid]>),
    Or(Box<[Rid]>),
    Eventually(u32, Rid),
    Always(u32, Rid),
}

pub struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, Rid>,
    atoms: Vec<Option<AtomicPredicate>>,
    /// `truth[atom][state]`.
    truth: Vec<Vec<bool>>,
    alphabet: Vec<State>,
    progress: HashMap<(Rid, u16), Rid>,
    ends: Vec<Option<(bool, bool)>>,
}

pub const FALSE: Rid = 0;
pub const TRUE: Rid = 1;

impl Arena {
    pub fn new(alphabet: &[State]) -> Self {
        let mut arena = Arena {
            nodes: Vec::new(),
            index: HashMap::new(),
            atoms: Vec::new(),
            truth: Vec::new(),
            alphabet: alphabet.to_vec(),
            progress: HashMap::new(),
            ends: Vec::new(),
        };
        assert_eq!(arena.intern(Node::Const(false)), FALSE);
        assert_eq!(arena.intern(Node::Const(true)), TRUE);
        arena
    }

    fn intern(&mut self, node: Node) -> Rid {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as Rid;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        self.ends.push(None);
        id
    }

    fn atom(&mut self, a: Option<&AtomicPredicate>) -> Rid {
        let pos = match self.atoms.iter().position(|x| x.as_ref() == a) {
            Some(p) => p,
            None => {
                self.atoms.push(a.cloned());
                self.truth.push(
                    self.alphabet
                        .iter()
                        .map(|s| a.map_or(true, |p| p.holds(s)))
                        .collect(),
                );
                self.atoms.len() - 1
            }
        };
        self.intern(Node::Atom(pos as u32))
    }

    pub fn constant(&self, id: Rid) -> Option<bool> {
        match self.nodes[id as usize] {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn not(&mut self, x: Rid) -> Rid {
        match self.nodes[x as usize] {
            Node::Const(c) => self.intern(Node::Const(!c)),
            Node::Not(y) => y,
            _ => self.intern(Node::Not(x)),
        }
    }

    pub fn and(&mut self, parts: &[Rid]) -> Rid {
        self.junction(parts, true)
    }

    pub fn or(&mut self, parts: &[Rid]) -> Rid {
        self.junction(parts, false)
    }

    /// Flattened, sorted, deduplicated conjunction (`conj`) or disjunction.
    fn junction(&mut self, parts: &[Rid], conj: bool) -> Rid {
        let (unit, zero) = if conj { (TRUE, FALSE) } else { (FALSE, TRUE) };
        let mut flat: Vec<Rid> = Vec::with_capacity(parts.len());
        for &p in parts {
            if p == zero {
                return zero;
            }
            if p == unit {
                continue;
            }
            match &self.nodes[p as usize] {
                Node::And(xs) if conj => flat.extend_from_slice(xs),
                Node::Or(xs) if !conj => flat.extend_from_slice(xs),
                _ => flat.push(p),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => unit,
            1 => flat[0],
            _ if conj => self.intern(Node::And(flat.into())),
            _ => self.intern(Node::Or(flat.into())),
        }
    }

    fn eventually(&mut self, bound: u32, x: Rid) -> Rid {
        if bound == 0 || self.constant(x).is_some() {
            x
        } else {
            self.intern(Node::Eventually(bound, x))
        }
    }

    fn always(&mut self, bound: u32, x: Rid) -> Rid {
        if bound == 0 || self.constant(x).is_some() {
            x
        } else {
            self.intern(Node::Always(bound, x))
        }
    }

    pub fn from_formula(&mut self, f: &Formula) -> Rid {
        match f {
            Formula::True => self.atom(None),
            Formula::Atom(a) => self.atom(Some(a)),
            Formula::Not(a) => {
                let x = self.from_formula(a);
                self.not(x)
            }
            Formula::And(a, b) => {
                let (x, y) = (self.from_formula(a), self.from_formula(b));
                self.and(&[x, y])
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.from_formula(a), self.from_formula(b));
                self.or(&[x, y])
            }
            Formula::Implies(a, b) => {
                let x = self.from_formula(a);
                let nx = self.not(x);
                let y = self.from_formula(b);
                self.or(&[nx, y])
            }
            Formula::Eventually(t, a) => {
                let x = self.from_formula(a);
                self.eventually(*t, x)
            }
            Formula::Always(t, a) => {
                let x = self.from_formula(a);
                self.always(*t, x)
            }
        }
    }

    /// Residual after reading alphabet state `state`.
    pub fn step(&mut self, id: Rid, state: u16) -> Rid {
        if id <= TRUE {
            return id;
        }
        if let Some(&r) = self.progress.get(&(id, state)) {
            return r;
        }
        let r = match self.nodes[id as usize].clone() {
            Node::Const(_) => id,
            Node::Atom(a) => {
                if self.truth[a as usize][state as usize] {
                    TRUE
                } else {
                    FALSE
                }
            }
            Node::Not(x) => {
                let y = self.step(x, state);
                self.not(y)
            }
            Node::And(xs) => {
                let ys: Vec<Rid> = xs.iter().map(|&x| self.step(x, state)).collect();
                self.and(&ys)
            }
            Node::Or(xs) => {
                let ys: Vec<Rid> = xs.iter().map(|&x| self.step(x, state)).collect();
                self.or(&ys)
            }
            Node::Eventually(t, x) => {
                let now = self.step(x, state);
                let later = self.eventually(t - 1, x);
                self.or(&[now, later])
            }
            Node::Always(t, x) => {
                let now = self.step(x, state);
                let later = self.always(t - 1, x);
                self.and(&[now, later])
            }
        };
        self.progress.insert((id, state), r);
        r
    }

    /// `(strong, weak)` views of a residual once the trajectory has ended.
    pub fn end_views(&mut self, id: Rid) -> (bool, bool) {
        if let Some(v) = self.ends[id as usize] {
            return v;
        }
        let v = match self.nodes[id as usize].clone() {
            Node::Const(c) => (c, c),
            Node::Atom(_) => (false, true),
            Node::Not(x) => {
                let (s, w) = self.end_views(x);
                (!w, !s)
            }
            Node::And(xs) => xs.iter().fold((true, true), |(s, w), &x| {
                let (a, b) = self.end_views(x);
                (s && a, w && b)
            }),
            Node::Or(xs) => xs.iter().fold((false, false), |(s, w), &x| {
                let (a, b) = self.end_views(x);
                (s || a, w || b)
            }),
            Node::Eventually(_, x) | Node::Always(_, x) => self.end_views(x),
        };
        self.ends[id as usize] = Some(v);
        v
    }

    pub fn end_verdict(&mut self, id: Rid) -> Verdict {
        match self.end_views(id) {
            (true, _) => Verdict::StrongSat,
            (false, false) => Verdict::StrongViol,
            (false, true) => Verdict::Undetermined,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::verdict_on_states;

    #[test]
    fn progression_matches_direct_verdicts() {
        let alphabet: Vec<State> = ["Club", "Spade", "Diamond"]
            .iter()
            .map(|s| State::sym(s))
            .collect();
        let formulas = [
            "F[<=2] (sym:Club)",
            "G[<=1] !(sym:Spade)",
            "(F[<=1] (sym:Diamond) -> G[<=2] T)",
            "!(F[<=3] (sym:Club) & G[<=0] (sym:Spade))",
            "(T | G[<=2] (sym:Diamond))",
        ];
        let mut arena = Arena::new(&alphabet);
        for text in formulas {
            let f: Formula = text.parse().unwrap();
            let root = arena.from_formula(&f);
            // Every trajectory up to length 4.
            let mut stack: Vec<(Vec<u16>, Rid)> = vec![(Vec::new(), root)];
            while let Some((prefix, r)) = stack.pop() {
                if !prefix.is_empty() {
                    let states: Vec<State> = prefix
                        .iter()
                        .map(|&i| alphabet[i as usize].clone())
                        .collect();
                    assert_eq!(
                        arena.end_verdict(r),
                        verdict_on_states(&f, &states),
                        "{text} on {states:?}"
                    );
                }
                if prefix.len() < 4 {
                    for s in 0..3u16 {
                        let mut next = prefix.clone();
                        next.push(s);
                        let child = arena.step(r, s);
                        stack.push((next, child));
                    }
                }
            }
        }
    }

    #[test]
    fn simplification_shares_nodes() {
        let alphabet = vec![State::Num(0), State::Num(1)];
        let mut arena = Arena::new(&alphabet);
        let a = arena.from_formula(&"((x<=0) & (x<=0))".parse().unwrap());
        let b = arena.from_formula(&"x<=0".parse().unwrap());
        assert_eq!(a, b);
        let c = arena.from_formula(&"!!F[<=0] (x<=0)".parse().unwrap());
        assert_eq!(c, b);
        assert_eq!(arena.step(b, 0), TRUE);
        assert_eq!(arena.step(b, 1), FALSE);
    }
}
