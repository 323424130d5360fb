use serde::{Deserialize, Serialize};

use super::{Color, DomainKind, StateDomain};
use crate::formula::{Formula, TemporalOp};

/// Grid position of a `F[<=i] p` / `G[<=i] p` hypothesis; `value` is the
/// threshold for numeric predicates and the color rank for colors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GridCoord {
    pub op: TemporalOp,
    pub horizon: u32,
    pub value: u32,
}

impl GridCoord {
    /// `|i1 - i2| + |v1 - v2|`.
    pub fn manhattan(&self, other: &GridCoord) -> u32 {
        self.horizon.abs_diff(other.horizon) + self.value.abs_diff(other.value)
    }
}

/// A hypothesis grid with the coordinates of each formula.
#[derive(Clone, Debug)]
pub struct HypothesisGrid {
    pub formulas: Vec<Formula>,
    pub coords: Vec<GridCoord>,
    /// Largest horizon `a`.
    pub max_horizon: u32,
    /// Ids of the `F[<=i](x<=0)` / `F[<=i](x<=max)` boundary forms, if added.
    pub boundary: Vec<usize>,
}

impl HypothesisGrid {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.formulas.iter().position(|g| g == f)
    }

    /// Appends the boundary forms `F[<=i](x<=0)` and `F[<=i](x<=max)` for
    /// `i = 1..=a`. Numeric domains only.
    pub fn with_boundary(mut self, domain: &StateDomain) -> Self {
        let DomainKind::Numeric { max } = domain.kind() else {
            return self;
        };
        for value in [0, *max] {
            for horizon in 1..=self.max_horizon {
                let coord = GridCoord {
                    op: TemporalOp::Eventually,
                    horizon,
                    value,
                };
                if self.coords.contains(&coord) {
                    continue;
                }
                self.boundary.push(self.formulas.len());
                self.formulas
                    .push(Formula::eventually(horizon, Formula::threshold(value)));
                self.coords.push(coord);
            }
        }
        self
    }

    pub fn is_boundary(&self, id: usize) -> bool {
        self.boundary.contains(&id)
    }
}

/// `{F[<=i] p, G[<=i] p : 1 <= i <= a}` with `p` ranging over `x<=1 ..
/// x<=max-1` on numeric domains and over the four colors on the gridworld.
/// Ordered by operator (F first), then horizon, then predicate.
pub fn generate_hypothesis_grid(domain: &StateDomain, a: u32) -> HypothesisGrid {
    assert!(a >= 1, "grid needs a >= 1");
    let values: Vec<(u32, Formula)> = match domain.kind() {
        DomainKind::Numeric { max } => (1..*max).map(|v| (v, Formula::threshold(v))).collect(),
        DomainKind::Gridworld(_) => Color::ALL.iter().map(|c| (c.rank(), c.atom())).collect(),
        DomainKind::Symbolic => domain
            .alphabet()
            .iter()
            .enumerate()
            .map(|(i, s)| (i as u32, Formula::label(&s.to_string())))
            .collect(),
    };
    let mut formulas = Vec::new();
    let mut coords = Vec::new();
    for op in [TemporalOp::Eventually, TemporalOp::Always] {
        for horizon in 1..=a {
            for (value, atom) in &values {
                formulas.push(match op {
                    TemporalOp::Eventually => Formula::eventually(horizon, atom.clone()),
                    TemporalOp::Always => Formula::always(horizon, atom.clone()),
                });
                coords.push(GridCoord {
                    op,
                    horizon,
                    value: *value,
                });
            }
        }
    }
    HypothesisGrid {
        formulas,
        coords,
        max_horizon: a,
        boundary: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Gridworld;

    #[test]
    fn table_sizes() {
        let d = StateDomain::numeric();
        for (a, n) in [(5, 90), (10, 180), (15, 270)] {
            assert_eq!(generate_hypothesis_grid(&d, a).len(), n);
        }
        let g = StateDomain::gridworld(Gridworld::default_world());
        assert_eq!(generate_hypothesis_grid(&g, 1).len(), 8);
        assert_eq!(generate_hypothesis_grid(&g, 5).len(), 40);
    }

    #[test]
    fn grid_order_and_coords() {
        let grid = generate_hypothesis_grid(&StateDomain::numeric(), 2);
        assert_eq!(grid.formulas[0].render(), "F[<=1] (x<=1)");
        assert_eq!(grid.formulas[9].render(), "F[<=2] (x<=1)");
        assert_eq!(grid.formulas[18].render(), "G[<=1] (x<=1)");
        assert_eq!(grid.coords[18].op, TemporalOp::Always);
        assert_eq!(grid.coords[3].manhattan(&grid.coords[9 + 5]), 1 + 2);
    }

    #[test]
    fn boundary_forms() {
        let d = StateDomain::numeric();
        let grid = generate_hypothesis_grid(&d, 3).with_boundary(&d);
        assert_eq!(grid.len(), 54 + 6);
        let b: Vec<String> = grid
            .boundary
            .iter()
            .map(|&i| grid.formulas[i].render())
            .collect();
        assert!(b.contains(&"F[<=1] (x<=10)".to_string()));
        assert!(b.contains(&"F[<=3] (x<=0)".to_string()));
    }
}
