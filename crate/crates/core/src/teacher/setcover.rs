//! Optimal teaching over an explicit demonstration pool as exact weighted set
//! cover, the reference point for teaching complexities on tiny instances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Objective;
use crate::domains::StateDomain;
use crate::learner::{HypothesisSet, IdSet};
use crate::semantics::{eliminates, verdict_on_states, Demonstration};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetCoverError {
    #[error("hypothesis {0} is eliminated by no demonstration in the pool")]
    Uncoverable(usize),
    #[error("{0} hypotheses to cover; at most 128 are supported")]
    TooLarge(usize),
    #[error("set cover search exceeded {0} nodes")]
    Budget(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetCoverSolution {
    /// Indices into the pool.
    pub chosen: Vec<usize>,
    pub demos: Vec<Demonstration>,
    /// Value of the requested objective.
    pub cost: usize,
    pub an: usize,
    pub al: usize,
}

/// Every valid demonstration of the target of length `1..=max_len` whose
/// states respect the domain's transitions, in length-then-lexicographic
/// order.
pub fn enumerate_pool(
    hyps: &HypothesisSet,
    domain: &StateDomain,
    max_len: usize,
    positive_only: bool,
) -> Vec<Demonstration> {
    let target = hyps.target_formula();
    let mut pool = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &layer {
            for s in 0..domain.size() {
                if prefix.last().map_or(true, |&p| domain.allows(p, s)) {
                    let mut seq = prefix.clone();
                    seq.push(s);
                    next.push(seq);
                }
            }
        }
        for seq in &next {
            let rho = domain.trajectory(seq);
            if let Some(label) = verdict_on_states(target, rho.states()).as_label() {
                if !positive_only || label == crate::formula::DemoLabel::Positive {
                    pool.push(Demonstration::new(rho, label));
                }
            }
        }
        layer = next;
    }
    pool
}

const NODE_LIMIT: u64 = 50_000_000;

struct Cover {
    masks: Vec<u128>,
    costs: Vec<usize>,
    /// `by_element[e]`: sets covering element `e`, cheapest first.
    by_element: Vec<Vec<usize>>,
    max_cover: u32,
    min_cost: usize,
    /// Smallest cost per covered element, as a fraction `(cost, count)`.
    min_ratio: (usize, usize),
    best: Option<(usize, Vec<usize>)>,
    nodes: u64,
}

impl Cover {
    fn lower_bound(&self, uncovered: u128) -> usize {
        let left = uncovered.count_ones() as usize;
        let by_count = left.div_ceil(self.max_cover as usize) * self.min_cost;
        let by_ratio = (left * self.min_ratio.0).div_ceil(self.min_ratio.1);
        by_count.max(by_ratio)
    }

    fn search(
        &mut self,
        uncovered: u128,
        cost: usize,
        chosen: &mut Vec<usize>,
    ) -> Result<(), SetCoverError> {
        self.nodes += 1;
        if self.nodes > NODE_LIMIT {
            return Err(SetCoverError::Budget(NODE_LIMIT));
        }
        if uncovered == 0 {
            if self.best.as_ref().map_or(true, |(c, _)| cost < *c) {
                self.best = Some((cost, chosen.clone()));
            }
            return Ok(());
        }
        if let Some((c, _)) = &self.best {
            if cost + self.lower_bound(uncovered) >= *c {
                return Ok(());
            }
        }
        // Branch on the element with the fewest covering sets.
        let element = (0..128)
            .filter(|e| uncovered >> e & 1 == 1)
            .min_by_key(|&e| self.by_element[e].len())
            .expect("uncovered is non-empty");
        for k in self.by_element[element].clone() {
            chosen.push(k);
            self.search(uncovered & !self.masks[k], cost + self.costs[k], chosen)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Minimum-cost subset of `pool` eliminating every hypothesis of
/// `preferred` other than the target. Cost is the number of demonstrations
/// (AN) or their summed lengths (AL).
pub fn optimal_teach_setcover(
    pool: &[Demonstration],
    hyps: &HypothesisSet,
    preferred: &IdSet,
    objective: Objective,
) -> Result<SetCoverSolution, SetCoverError> {
    let universe: Vec<usize> = preferred
        .iter()
        .copied()
        .filter(|&id| id != hyps.target())
        .collect();
    if universe.len() > 128 {
        return Err(SetCoverError::TooLarge(universe.len()));
    }
    let cost_of = |d: &Demonstration| match objective {
        Objective::AN => 1,
        Objective::AL => d.len(),
    };
    // Cheapest pool demonstration for every distinct elimination pattern.
    let mut by_mask: std::collections::HashMap<u128, usize> = std::collections::HashMap::new();
    let mut order: Vec<u128> = Vec::new();
    let mut covered = 0u128;
    for (k, d) in pool.iter().enumerate() {
        let mask = universe
            .iter()
            .enumerate()
            .filter(|(_, &id)| eliminates(d, hyps.formula(id)))
            .fold(0u128, |m, (bit, _)| m | 1 << bit);
        if mask == 0 {
            continue;
        }
        covered |= mask;
        match by_mask.get(&mask) {
            Some(&j) if cost_of(&pool[j]) <= cost_of(d) => {}
            Some(_) => {
                by_mask.insert(mask, k);
            }
            None => {
                by_mask.insert(mask, k);
                order.push(mask);
            }
        }
    }
    if let Some(bit) = (0..universe.len()).find(|b| covered >> b & 1 == 0) {
        return Err(SetCoverError::Uncoverable(universe[bit]));
    }
    if universe.is_empty() {
        return Ok(SetCoverSolution {
            chosen: vec![],
            demos: vec![],
            cost: 0,
            an: 0,
            al: 0,
        });
    }
    // Drop patterns dominated by a superset that costs no more.
    let entries: Vec<(u128, usize)> = order.iter().map(|m| (*m, by_mask[m])).collect();
    let kept: Vec<(u128, usize)> = entries
        .iter()
        .copied()
        .filter(|&(m, k)| {
            !entries
                .iter()
                .any(|&(m2, k2)| m2 != m && m2 & m == m && cost_of(&pool[k2]) <= cost_of(&pool[k]))
        })
        .collect();
    let masks: Vec<u128> = kept.iter().map(|e| e.0).collect();
    let costs: Vec<usize> = kept.iter().map(|&(_, k)| cost_of(&pool[k])).collect();
    let mut by_element = vec![Vec::new(); 128];
    for (j, m) in masks.iter().enumerate() {
        for (e, list) in by_element.iter_mut().enumerate().take(universe.len()) {
            if m >> e & 1 == 1 {
                list.push(j);
            }
        }
    }
    for list in &mut by_element {
        list.sort_by_key(|&j| (costs[j], std::cmp::Reverse(masks[j].count_ones()), j));
    }
    let min_ratio = masks
        .iter()
        .zip(&costs)
        .map(|(m, &c)| (c, m.count_ones() as usize))
        .min_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)))
        .expect("at least one covering pattern");
    let mut cover = Cover {
        max_cover: masks.iter().map(|m| m.count_ones()).max().unwrap_or(1),
        min_cost: costs.iter().copied().min().unwrap_or(1),
        min_ratio,
        masks,
        costs,
        by_element,
        best: None,
        nodes: 0,
    };
    let full = if universe.len() == 128 {
        u128::MAX
    } else {
        (1u128 << universe.len()) - 1
    };
    cover.search(full, 0, &mut Vec::new())?;
    let (cost, picks) = cover.best.expect("coverable universe has a cover");
    let mut chosen: Vec<usize> = picks.iter().map(|&j| kept[j].1).collect();
    chosen.sort_unstable();
    let demos: Vec<Demonstration> = chosen.iter().map(|&k| pool[k].clone()).collect();
    let al = demos.iter().map(|d| d.len()).sum();
    Ok(SetCoverSolution {
        an: demos.len(),
        al,
        cost,
        chosen,
        demos,
    })
}
