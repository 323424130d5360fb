//! Export of a synthesis instance as a 0-1 linear program in the CPLEX LP text
//! format, for cross-checking against external MILP solvers.
//!
//! Variables: `s_t_v` (state `v` at time `t`), `b_j` (hypothesis `j` is
//! eliminated), and `yS_n_t` / `yW_n_t` for the strong and weak views of
//! subformula `n` at time `t`, where `t = L` stands for every position past the
//! end of the trajectory.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::ip::IpInstance;
use crate::formula::{AtomicPredicate, DemoLabel, Formula};
use crate::semantics::{views_at, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(i64, usize)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Constraint {
    pub fn holds(&self, values: &[bool]) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(c, v)| c * values[v] as i64).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    Atom(AtomicPredicate),
    Not(usize),
    And(usize, usize),
    Eventually(u32, usize),
    Always(u32, usize),
}

/// A maximization over binary variables.
#[derive(Clone, Debug)]
pub struct LpModel {
    pub vars: Vec<String>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(i64, usize)>,
    nodes: Vec<(Node, Formula)>,
    roots: Vec<usize>,
    length: usize,
    states: usize,
    candidates: Vec<usize>,
}

struct Builder {
    vars: Vec<String>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
    nodes: Vec<(Node, Formula)>,
    node_index: HashMap<Node, usize>,
}

impl Builder {
    fn var(&mut self, name: String) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        self.vars.push(name.clone());
        self.index.insert(name, self.vars.len() - 1);
        self.vars.len() - 1
    }

    fn y(&mut self, strong: bool, n: usize, t: usize) -> usize {
        self.var(format!("{}_{n}_{t}", if strong { "yS" } else { "yW" }))
    }

    fn push(&mut self, prefix: &str, terms: Vec<(i64, usize)>, sense: Sense, rhs: i64) {
        let name = format!("{prefix}{}", self.constraints.len());
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
    }

    fn node(&mut self, f: &Formula) -> usize {
        let node = match f {
            Formula::True => Node::True,
            Formula::Atom(a) => Node::Atom(a.clone()),
            Formula::Not(a) => Node::Not(self.node(a)),
            Formula::And(a, b) => Node::And(self.node(a), self.node(b)),
            Formula::Eventually(t, a) => Node::Eventually(*t, self.node(a)),
            Formula::Always(t, a) => Node::Always(*t, self.node(a)),
            Formula::Or(..) | Formula::Implies(..) => unreachable!("formulas are normalized first"),
        };
        if let Some(&i) = self.node_index.get(&node) {
            return i;
        }
        self.nodes.push((node.clone(), f.clone()));
        self.node_index.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }
}

impl LpModel {
    pub fn from_instance(inst: &IpInstance) -> LpModel {
        let len = inst.length;
        let n_states = inst.alphabet.len();
        let mut b = Builder {
            vars: Vec::new(),
            index: HashMap::new(),
            constraints: Vec::new(),
            nodes: Vec::new(),
            node_index: HashMap::new(),
        };
        let s: Vec<Vec<usize>> = (0..len)
            .map(|t| (0..n_states).map(|v| b.var(format!("s_{t}_{v}"))).collect())
            .collect();
        for (t, row) in s.iter().enumerate() {
            b.push(
                "onehot",
                row.iter().map(|&x| (1, x)).collect(),
                Sense::Eq,
                1,
            );
            if let Some(allowed) = inst.pinned.get(&t) {
                for v in (0..n_states).filter(|v| !allowed.contains(v)) {
                    b.push("pin", vec![(1, row[v])], Sense::Eq, 0);
                }
            }
            if let (Some(tr), true) = (&inst.transitions, t > 0) {
                for p in 0..n_states {
                    for q in (0..n_states).filter(|&q| !tr.allows(p, q)) {
                        b.push("trans", vec![(1, s[t - 1][p]), (1, row[q])], Sense::Le, 1);
                    }
                }
            }
        }

        let mut roots = vec![b.node(&inst.target.normalize())];
        roots.extend(inst.protected.iter().map(|p| b.node(&p.normalize())));
        let candidate_roots: Vec<usize> = inst
            .candidates
            .iter()
            .map(|c| b.node(&c.formula.normalize()))
            .collect();
        roots.extend(&candidate_roots);

        // Children are created before parents, so a forward pass defines
        // every view.
        for n in 0..b.nodes.len() {
            let node = b.nodes[n].0.clone();
            for t in 0..=len {
                let (ys, yw) = (b.y(true, n, t), b.y(false, n, t));
                match &node {
                    Node::True => {
                        b.push("true", vec![(1, ys)], Sense::Eq, (t < len) as i64);
                        b.push("true", vec![(1, yw)], Sense::Eq, 1);
                    }
                    Node::Atom(a) if t < len => {
                        let mut terms: Vec<(i64, usize)> = (0..n_states)
                            .filter(|&v| a.holds(&inst.alphabet[v]))
                            .map(|v| (-1, s[t][v]))
                            .collect();
                        for y in [ys, yw] {
                            terms.push((1, y));
                            b.push("atom", terms.clone(), Sense::Eq, 0);
                            terms.pop();
                        }
                    }
                    Node::Atom(_) => {
                        b.push("end", vec![(1, ys)], Sense::Eq, 0);
                        b.push("end", vec![(1, yw)], Sense::Eq, 1);
                    }
                    Node::Not(c) => {
                        let (cs, cw) = (b.y(true, *c, t), b.y(false, *c, t));
                        b.push("not", vec![(1, ys), (1, cw)], Sense::Eq, 1);
                        b.push("not", vec![(1, yw), (1, cs)], Sense::Eq, 1);
                    }
                    Node::And(l, r) => {
                        for strong in [true, false] {
                            let (y, a, c) =
                                (b.y(strong, n, t), b.y(strong, *l, t), b.y(strong, *r, t));
                            b.push("and", vec![(1, y), (-1, a)], Sense::Le, 0);
                            b.push("and", vec![(1, y), (-1, c)], Sense::Le, 0);
                            b.push("and", vec![(1, y), (-1, a), (-1, c)], Sense::Ge, -1);
                        }
                    }
                    Node::Eventually(tau, c) | Node::Always(tau, c) => {
                        let any = matches!(node, Node::Eventually(..));
                        let end = (t + *tau as usize).min(len);
                        for strong in [true, false] {
                            let y = b.y(strong, n, t);
                            let window: Vec<usize> =
                                (t..=end).map(|k| b.y(strong, *c, k)).collect();
                            let w = window.len() as i64;
                            for &x in &window {
                                if any {
                                    b.push("ev", vec![(1, y), (-1, x)], Sense::Ge, 0);
                                } else {
                                    b.push("al", vec![(1, y), (-1, x)], Sense::Le, 0);
                                }
                            }
                            let mut terms = vec![(1, y)];
                            terms.extend(window.iter().map(|&x| (-1, x)));
                            if any {
                                b.push("ev", terms, Sense::Le, 0);
                            } else {
                                b.push("al", terms, Sense::Ge, 1 - w);
                            }
                        }
                    }
                }
            }
        }

        let positive = inst.label == DemoLabel::Positive;
        let require = |b: &mut Builder, root: usize, prefix: &str| {
            if positive {
                let y = b.y(true, root, 0);
                b.push(prefix, vec![(1, y)], Sense::Eq, 1);
            } else {
                let y = b.y(false, root, 0);
                b.push(prefix, vec![(1, y)], Sense::Eq, 0);
            }
        };
        require(&mut b, roots[0], "target");
        for &p in &roots[1..=inst.protected.len()] {
            require(&mut b, p, "protect");
        }
        let mut objective = Vec::new();
        for (c, &root) in inst.candidates.iter().zip(&candidate_roots) {
            let bj = b.var(format!("b_{}", c.id));
            objective.push((1, bj));
            for strong in [true, false] {
                let y = b.y(strong, root, 0);
                if positive {
                    b.push("cand", vec![(1, y), (1, bj)], Sense::Eq, 1);
                } else {
                    b.push("cand", vec![(1, y), (-1, bj)], Sense::Eq, 0);
                }
            }
            if !c.eliminable {
                b.push("len", vec![(1, bj)], Sense::Eq, 0);
            }
        }
        LpModel {
            vars: b.vars,
            constraints: b.constraints,
            objective,
            nodes: b.nodes,
            roots,
            length: len,
            states: n_states,
            candidates: inst.candidates.iter().map(|c| c.id).collect(),
        }
    }

    /// The variable values induced by a trajectory: state indicators, every
    /// subformula view, and `b_j` set for the candidates whose verdict opposes
    /// `label`.
    pub fn assignment(&self, rho: &Trajectory, states: &[usize], label: DemoLabel) -> Vec<bool> {
        assert_eq!(
            states.len(),
            self.length,
            "trajectory length must match the instance"
        );
        let mut values = vec![false; self.vars.len()];
        let index: HashMap<&str, usize> = self
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut set = |name: String, value: bool| {
            if let Some(&i) = index.get(name.as_str()) {
                values[i] = value;
            }
        };
        for (t, &v) in states.iter().enumerate() {
            for u in 0..self.states {
                set(format!("s_{t}_{u}"), u == v);
            }
        }
        for (n, (_, f)) in self.nodes.iter().enumerate() {
            for t in 0..=self.length {
                let (strong, weak) = views_at(rho, t, f);
                set(format!("yS_{n}_{t}"), strong);
                set(format!("yW_{n}_{t}"), weak);
            }
        }
        let first_candidate = self.roots.len() - self.candidates.len();
        for (k, &id) in self.candidates.iter().enumerate() {
            let f = &self.nodes[self.roots[first_candidate + k]].1;
            let (strong, weak) = views_at(rho, 0, f);
            let opposed = match label {
                DemoLabel::Positive => !weak,
                DemoLabel::Negative => strong,
            };
            set(format!("b_{id}"), opposed);
        }
        values
    }

    pub fn violated(&self, values: &[bool]) -> Vec<&str> {
        self.constraints
            .iter()
            .filter(|c| !c.holds(values))
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn objective_value(&self, values: &[bool]) -> i64 {
        self.objective
            .iter()
            .map(|&(c, v)| c * values[v] as i64)
            .sum()
    }

    /// The model in CPLEX LP format.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        out.push_str("\\ demonstration synthesis instance\nMaximize\n obj:");
        if self.objective.is_empty() {
            let _ = write!(out, " 0 {}", self.vars[0]);
        } else {
            write_terms(&mut out, &self.objective, &self.vars);
        }
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            write_terms(&mut out, &c.terms, &self.vars);
            let sense = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {sense} {}", c.rhs);
        }
        out.push_str("Binaries\n");
        for chunk in self.vars.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
        out.push_str("End\n");
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_lp_string())
    }
}

fn write_terms(out: &mut String, terms: &[(i64, usize)], vars: &[String]) {
    for (k, &(c, v)) in terms.iter().enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n  ");
        }
        let sign = if c < 0 {
            "-"
        } else if k > 0 {
            "+"
        } else {
            ""
        };
        let mag = c.abs();
        if mag == 1 {
            let _ = write!(out, " {sign} {}", vars[v]);
        } else {
            let _ = write!(out, " {sign} {mag} {}", vars[v]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{Gridworld, StateDomain};
    use crate::teacher::{build_ip, inject_constraints, solve_ip, Budget, Objective};

    fn sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
        (0..n.pow(len as u32))
            .map(|mut code| {
                (0..len)
                    .map(|_| {
                        let s = code % n;
                        code /= n;
                        s
                    })
                    .rev()
                    .collect()
            })
            .collect()
    }

    #[test]
    fn constraints_agree_with_the_instance() {
        let d = StateDomain::symbolic(&["Club", "Spade", "Diamond"]);
        let cands: Vec<(usize, Formula)> = [
            "F[<=1] (sym:Spade)",
            "G[<=1] !(sym:Diamond)",
            "(F[<=2] (sym:Club) | G[<=0] (sym:Spade))",
            "F[<=4] (sym:Diamond)",
        ]
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 1, s.parse().unwrap()))
        .collect();
        let target: Formula = "F[<=2] (sym:Club)".parse().unwrap();
        for label in [DemoLabel::Positive, DemoLabel::Negative] {
            let inst = build_ip(label, &cands, &target, 3, &d, Objective::AN)
                .unwrap()
                .with_protected(vec!["F[<=1] !(sym:Spade)".parse().unwrap()]);
            let model = LpModel::from_instance(&inst);
            for seq in sequences(3, 3) {
                let rho = d.trajectory(&seq);
                let values = model.assignment(&rho, &seq, label);
                let violated = model.violated(&values);
                match inst.evaluate(&seq) {
                    Some(elim) => {
                        assert!(violated.is_empty(), "{seq:?}: {violated:?}");
                        assert_eq!(model.objective_value(&values), elim.len() as i64);
                    }
                    None => assert!(!violated.is_empty(), "{seq:?} should be infeasible"),
                }
            }
            let text = model.to_lp_string();
            assert!(text.starts_with("\\ ") && text.ends_with("End\n"));
            assert!(text.contains("b_4") && text.contains("s_2_2"));
        }
    }

    #[test]
    fn solver_output_is_an_lp_point_under_transitions() {
        let d = StateDomain::gridworld(Gridworld::default_world());
        let target: Formula = "F[<=2] (sym:Green)".parse().unwrap();
        let cands = vec![
            (1, "G[<=1] (sym:Red)".parse().unwrap()),
            (2, "F[<=2] (sym:Yellow)".parse().unwrap()),
        ];
        let inst = inject_constraints(
            build_ip(DemoLabel::Positive, &cands, &target, 3, &d, Objective::AN).unwrap(),
            &d,
        );
        let sol = solve_ip(&inst, &Budget::default()).unwrap();
        let model = LpModel::from_instance(&inst);
        let values = model.assignment(&d.trajectory(&sol.states), &sol.states, inst.label);
        assert!(model.violated(&values).is_empty());
        assert_eq!(model.objective_value(&values), sol.kappa as i64);
        // Red followed directly by Green breaks a transition constraint.
        let bad = [0, 2, 2];
        let values = model.assignment(&d.trajectory(&bad), &bad, inst.label);
        assert!(model
            .violated(&values)
            .iter()
            .any(|n| n.starts_with("trans")));
    }
}
