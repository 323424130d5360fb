//! Intermediate-target oracles for non-myopic teaching.

use super::TeachError;
use crate::domains::{DomainKind, GridCoord, HypothesisGrid, StateDomain};
use crate::formula::TemporalOp;
use crate::learner::{HypothesisSet, VersionSpace};

/// Supplies the hypothesis to teach next, given the learner's current
/// hypothesis and the surviving hypotheses.
pub trait Oracle: Send + Sync {
    fn intermediate(&self, hyps: &HypothesisSet, current: usize, space: &VersionSpace) -> usize;
}

/// Steers a learner whose local preference only lets it switch from `F` to
/// `G` at the boundary forms `F[<=i](x<=0)` / `F[<=i](x<=max)`: while the
/// learner holds a non-boundary `F` formula and the target is a `G` formula,
/// teach `F[<=1](x<=max)` first.
#[derive(Clone, Debug)]
pub struct BoundaryOracle {
    coords: Vec<GridCoord>,
    boundary: Vec<usize>,
    /// Id of `F[<=1](x<=max)`.
    preferred: usize,
}

impl BoundaryOracle {
    /// Requires a numeric grid extended with its boundary forms, whose ids
    /// match the hypothesis set's.
    pub fn new(grid: &HypothesisGrid, domain: &StateDomain) -> Result<Self, TeachError> {
        let DomainKind::Numeric { max } = domain.kind() else {
            return Err(TeachError::Oracle("a numeric domain".into()));
        };
        let want = GridCoord {
            op: TemporalOp::Eventually,
            horizon: 1,
            value: *max,
        };
        let preferred = grid
            .coords
            .iter()
            .position(|c| *c == want)
            .filter(|id| grid.is_boundary(*id))
            .ok_or_else(|| TeachError::Oracle("a grid with boundary forms".into()))?;
        Ok(BoundaryOracle {
            coords: grid.coords.clone(),
            boundary: grid.boundary.clone(),
            preferred,
        })
    }

    pub fn boundary_target(&self) -> usize {
        self.preferred
    }
}

impl Oracle for BoundaryOracle {
    fn intermediate(&self, hyps: &HypothesisSet, current: usize, space: &VersionSpace) -> usize {
        let target = hyps.target();
        let switch = self.coords[target].op == TemporalOp::Always
            && self.coords[current].op == TemporalOp::Eventually
            && !self.boundary.contains(&current);
        if !switch {
            return target;
        }
        if space.contains(self.preferred) {
            return self.preferred;
        }
        self.boundary
            .iter()
            .copied()
            .find(|&b| space.contains(b))
            .unwrap_or(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::generate_hypothesis_grid;

    #[test]
    fn switches_only_from_interior_f_to_g() {
        let d = StateDomain::numeric();
        let grid = generate_hypothesis_grid(&d, 5).with_boundary(&d);
        let pos = |s: &str| grid.position(&s.parse().unwrap()).unwrap();
        let target = pos("G[<=2] (x<=3)");
        let hyps = HypothesisSet::new(grid.formulas.clone(), target).unwrap();
        let oracle = BoundaryOracle::new(&grid, &d).unwrap();
        let space = VersionSpace::full(&hyps);
        assert_eq!(
            oracle.intermediate(&hyps, pos("F[<=3] (x<=4)"), &space),
            pos("F[<=1] (x<=10)")
        );
        assert_eq!(
            oracle.intermediate(&hyps, pos("G[<=4] (x<=4)"), &space),
            target
        );
        assert_eq!(
            oracle.intermediate(&hyps, pos("F[<=2] (x<=10)"), &space),
            target
        );

        let f_target = hyps.with_target(pos("F[<=2] (x<=3)")).unwrap();
        assert_eq!(
            oracle.intermediate(&f_target, pos("F[<=3] (x<=4)"), &space),
            f_target.target()
        );
    }

    #[test]
    fn needs_boundary_forms() {
        let d = StateDomain::numeric();
        assert!(BoundaryOracle::new(&generate_hypothesis_grid(&d, 3), &d).is_err());
    }
}
