//! Preference functions `sigma(candidate; current)`; lower is more preferred.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{DomainKind, GridCoord, HypothesisGrid, StateDomain};
use crate::formula::TemporalOp;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PreferenceModel {
    /// `sigma == 1`.
    Uniform,
    /// `sigma(c; _) = rank[c]`.
    GlobalRanked { rank: Vec<f64> },
    /// `sigma(c; cur) = table[c][cur]`.
    Local { table: Vec<Vec<f64>> },
    /// A local model whose learner also picks, with equal probability, any
    /// surviving hypothesis within `radius` of a minimizer in the grid's
    /// `(horizon, value)` plane.
    NoisyLocal {
        table: Vec<Vec<f64>>,
        radius: u32,
        coords: Vec<GridCoord>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreferenceError {
    #[error("sigma({candidate}; {current}) = {value} is not positive")]
    NotPositive {
        candidate: usize,
        current: usize,
        value: f64,
    },
    #[error("preference covers {got} hypotheses, expected {expected}")]
    SizeMismatch { got: usize, expected: usize },
}

impl PreferenceModel {
    pub fn sigma(&self, candidate: usize, current: usize) -> f64 {
        match self {
            PreferenceModel::Uniform => 1.0,
            PreferenceModel::GlobalRanked { rank } => rank[candidate],
            PreferenceModel::Local { table } | PreferenceModel::NoisyLocal { table, .. } => {
                table[candidate][current]
            }
        }
    }

    /// Whether `sigma` ignores the current hypothesis by construction.
    pub fn is_global(&self) -> bool {
        matches!(
            self,
            PreferenceModel::Uniform | PreferenceModel::GlobalRanked { .. }
        )
    }

    pub fn is_noisy(&self) -> bool {
        matches!(self, PreferenceModel::NoisyLocal { .. })
    }

    /// Checks positivity and that the model covers exactly `n` hypotheses.
    pub fn validate(&self, n: usize) -> Result<(), PreferenceError> {
        let size = match self {
            PreferenceModel::Uniform => return Ok(()),
            PreferenceModel::GlobalRanked { rank } => rank.len(),
            PreferenceModel::Local { table } | PreferenceModel::NoisyLocal { table, .. } => {
                if let Some(row) = table.iter().find(|r| r.len() != table.len()) {
                    return Err(PreferenceError::SizeMismatch {
                        got: row.len(),
                        expected: table.len(),
                    });
                }
                table.len()
            }
        };
        if size != n {
            return Err(PreferenceError::SizeMismatch {
                got: size,
                expected: n,
            });
        }
        if let PreferenceModel::NoisyLocal { coords, .. } = self {
            if coords.len() != n {
                return Err(PreferenceError::SizeMismatch {
                    got: coords.len(),
                    expected: n,
                });
            }
        }
        for c in 0..n {
            for cur in 0..n {
                let value = self.sigma(c, cur);
                if !(value > 0.0) {
                    return Err(PreferenceError::NotPositive {
                        candidate: c,
                        current: cur,
                        value,
                    });
                }
                if self.is_global() {
                    break;
                }
            }
        }
        Ok(())
    }

    pub fn ranked(rank: Vec<f64>) -> Self {
        PreferenceModel::GlobalRanked { rank }
    }

    pub fn local(table: Vec<Vec<f64>>) -> Self {
        PreferenceModel::Local { table }
    }

    /// Local Manhattan preference on a hypothesis grid:
    /// `sigma(c; cur) = 1 + |di| + |dv| + penalty * [op(c) != preferred op]`.
    ///
    /// The preferred operator is the current one, except that from a
    /// boundary form `F[<=i](x<=0)` / `F[<=i](x<=max)` of a numeric domain the
    /// learner prefers G. `penalty` defaults to `2 * (a + 9) + 1`, which
    /// exceeds every distance, so the operator preference dominates.
    pub fn local_manhattan(
        grid: &HypothesisGrid,
        domain: &StateDomain,
        penalty: Option<f64>,
    ) -> Self {
        PreferenceModel::Local {
            table: manhattan_table(grid, domain, penalty),
        }
    }

    /// [`Self::local_manhattan`] with perturbation noise of the given radius.
    pub fn noisy_local(
        grid: &HypothesisGrid,
        domain: &StateDomain,
        penalty: Option<f64>,
        radius: u32,
    ) -> Self {
        PreferenceModel::NoisyLocal {
            table: manhattan_table(grid, domain, penalty),
            radius,
            coords: grid.coords.clone(),
        }
    }

    /// Global preference that ranks every F formula before every G formula
    /// and, within one operator, orders formulas along implication:
    /// `F[<=i](x<=v)` gets `1 + i + v` and `G[<=i](x<=v)` gets
    /// `offset + (a - i) + v` with `offset` above every F score.
    pub fn global_implication(grid: &HypothesisGrid) -> Self {
        let a = grid.max_horizon;
        let max_f = grid
            .coords
            .iter()
            .filter(|c| c.op == TemporalOp::Eventually)
            .map(|c| 1 + c.horizon + c.value)
            .max()
            .unwrap_or(0);
        let offset = max_f + 1;
        let rank = grid
            .coords
            .iter()
            .map(|c| match c.op {
                TemporalOp::Eventually => (1 + c.horizon + c.value) as f64,
                TemporalOp::Always => (offset + (a - c.horizon.min(a)) + c.value) as f64,
            })
            .collect();
        PreferenceModel::GlobalRanked { rank }
    }
}

pub fn default_operator_penalty(a: u32) -> f64 {
    (2 * (a + 9) + 1) as f64
}

fn manhattan_table(
    grid: &HypothesisGrid,
    domain: &StateDomain,
    penalty: Option<f64>,
) -> Vec<Vec<f64>> {
    let penalty = penalty.unwrap_or_else(|| default_operator_penalty(grid.max_horizon));
    let boundary: Vec<u32> = match domain.kind() {
        DomainKind::Numeric { max } => vec![0, *max],
        _ => Vec::new(),
    };
    let preferred_op = |cur: &GridCoord| {
        if cur.op == TemporalOp::Eventually && boundary.contains(&cur.value) {
            TemporalOp::Always
        } else {
            cur.op
        }
    };
    let n = grid.len();
    let mut table = vec![vec![0.0; n]; n];
    for (c, cc) in grid.coords.iter().enumerate() {
        for (cur, cu) in grid.coords.iter().enumerate() {
            let switch = if cc.op == preferred_op(cu) {
                0.0
            } else {
                penalty
            };
            table[c][cur] = 1.0 + cc.manhattan(cu) as f64 + switch;
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::generate_hypothesis_grid;
    use crate::formula::Formula;

    fn id(grid: &HypothesisGrid, text: &str) -> usize {
        grid.position(&text.parse::<Formula>().unwrap()).unwrap()
    }

    #[test]
    fn manhattan_prefers_same_operator_then_distance() {
        let d = StateDomain::numeric();
        let grid = generate_hypothesis_grid(&d, 5);
        let pref = PreferenceModel::local_manhattan(&grid, &d, None);
        pref.validate(grid.len()).unwrap();
        let cur = id(&grid, "F[<=3] (x<=4)");
        let near = id(&grid, "F[<=3] (x<=5)");
        let far = id(&grid, "F[<=1] (x<=1)");
        let g = id(&grid, "G[<=2] (x<=3)");
        assert_eq!(pref.sigma(near, cur), 2.0);
        assert_eq!(pref.sigma(far, cur), 6.0);
        assert_eq!(pref.sigma(g, cur), 1.0 + 2.0 + 29.0);
        assert!(!pref.is_global());
    }

    #[test]
    fn boundary_forms_prefer_g() {
        let d = StateDomain::numeric();
        let grid = generate_hypothesis_grid(&d, 3).with_boundary(&d);
        let pref = PreferenceModel::local_manhattan(&grid, &d, None);
        let cur = id(&grid, "F[<=1] (x<=10)");
        let g = id(&grid, "G[<=1] (x<=9)");
        let f = id(&grid, "F[<=1] (x<=9)");
        assert!(pref.sigma(g, cur) < pref.sigma(f, cur));
        assert!(pref.sigma(g, cur) < pref.sigma(cur, cur));
    }

    #[test]
    fn global_implication_orders_implied_formulas_later() {
        let d = StateDomain::numeric();
        let grid = generate_hypothesis_grid(&d, 5);
        let pref = PreferenceModel::global_implication(&grid);
        pref.validate(grid.len()).unwrap();
        let s = |t: &str| pref.sigma(id(&grid, t), 0);
        assert!(s("F[<=2] (x<=3)") < s("F[<=4] (x<=5)"));
        assert!(s("G[<=4] (x<=3)") < s("G[<=2] (x<=3)"));
        assert!(s("F[<=5] (x<=9)") < s("G[<=5] (x<=1)"));
    }

    #[test]
    fn validation_rejects_bad_models() {
        assert!(PreferenceModel::ranked(vec![1.0, 0.0]).validate(2).is_err());
        assert!(PreferenceModel::ranked(vec![1.0]).validate(2).is_err());
        assert!(PreferenceModel::local(vec![vec![1.0, 2.0], vec![1.0]])
            .validate(2)
            .is_err());
        assert!(PreferenceModel::Uniform.validate(7).is_ok());
    }
}
