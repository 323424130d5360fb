//! Checkers for the two structural conditions under which the greedy adaptive
//! teacher is near-optimal.

use std::collections::HashSet;

use thiserror::Error;

use super::{HypothesisSet, PreferenceModel};
use crate::semantics::{eliminates, Demonstration};

/// Witness `(phi, phi1, phi2)` with
/// `sigma(phi1; phi) <= sigma(phi2; phi) <= sigma(target; phi)` but
/// `sigma(phi2; phi1) > sigma(target; phi1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Condition1Violation {
    pub current: usize,
    pub first: usize,
    pub second: usize,
}

pub fn violates_condition1(
    pref: &PreferenceModel,
    target: usize,
    phi: usize,
    p1: usize,
    p2: usize,
) -> bool {
    let s = |a, b| pref.sigma(a, b);
    s(p1, phi) <= s(p2, phi) && s(p2, phi) <= s(target, phi) && s(p2, p1) > s(target, p1)
}

/// Exhaustive triple loop over the hypothesis set.
pub fn check_condition1(
    pref: &PreferenceModel,
    hyps: &HypothesisSet,
) -> Result<(), Condition1Violation> {
    if pref.is_global() {
        // sigma(p1) <= sigma(p2) <= sigma(target) already gives the conclusion.
        return Ok(());
    }
    let n = hyps.len();
    let target = hyps.target();
    for phi in 0..n {
        let bar = pref.sigma(target, phi);
        let below: Vec<usize> = (0..n).filter(|&c| pref.sigma(c, phi) <= bar).collect();
        for &p1 in &below {
            for &p2 in &below {
                if violates_condition1(pref, target, phi, p1, p2) {
                    return Err(Condition1Violation {
                        current: phi,
                        first: p1,
                        second: p2,
                    });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("demonstration {demo} eliminates {size} hypotheses; subset enumeration is capped at {cap}")]
pub struct SubsetBudgetExceeded {
    pub demo: usize,
    pub size: usize,
    pub cap: usize,
}

/// Outcome of the subset-closure check, relative to an explicit pool.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition2Report {
    pub holds: bool,
    pub pool_size: usize,
    /// A pool demonstration and a subset of its elimination set that no pool
    /// demonstration eliminates exactly.
    pub witness: Option<(usize, Vec<usize>)>,
}

const MAX_SUBSET_BITS: usize = 20;

/// For every pool demonstration `z` and every subset of the hypotheses `z`
/// eliminates, some pool demonstration eliminates exactly that subset.
pub fn check_condition2(
    hyps: &HypothesisSet,
    pool: &[Demonstration],
) -> Result<Condition2Report, SubsetBudgetExceeded> {
    let sets: Vec<Vec<usize>> = pool
        .iter()
        .map(|d| {
            (0..hyps.len())
                .filter(|&id| eliminates(d, hyps.formula(id)))
                .collect()
        })
        .collect();
    let achieved: HashSet<&Vec<usize>> = sets.iter().collect();
    for (k, set) in sets.iter().enumerate() {
        if set.len() > MAX_SUBSET_BITS {
            return Err(SubsetBudgetExceeded {
                demo: k,
                size: set.len(),
                cap: MAX_SUBSET_BITS,
            });
        }
    }
    let mut checked: HashSet<&Vec<usize>> = HashSet::new();
    for (k, set) in sets.iter().enumerate() {
        if !checked.insert(set) {
            continue;
        }
        for mask in 0u32..(1 << set.len()) {
            let subset: Vec<usize> = set
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &id)| id)
                .collect();
            if !achieved.contains(&subset) {
                return Ok(Condition2Report {
                    holds: false,
                    pool_size: pool.len(),
                    witness: Some((k, subset)),
                });
            }
        }
    }
    Ok(Condition2Report {
        holds: true,
        pool_size: pool.len(),
        witness: None,
    })
}
