#![allow(dead_code)]

use pltl_teach::{Formula, State};
use rand::Rng;

pub const SYMBOLS: [&str; 3] = ["a", "b", "c"];

pub fn alphabet() -> Vec<State> {
    SYMBOLS.iter().map(|s| State::sym(s)).collect()
}

/// Random formula over `SYMBOLS` with nesting depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, max_bound: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.1) {
            Formula::True
        } else {
            Formula::label(SYMBOLS[rng.gen_range(0..SYMBOLS.len())])
        };
    }
    let sub = |rng: &mut R| random_formula(rng, depth - 1, max_bound);
    match rng.gen_range(0..6) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::eventually(rng.gen_range(0..=max_bound), sub(rng)),
        _ => Formula::always(rng.gen_range(0..=max_bound), sub(rng)),
    }
}

pub fn random_states<R: Rng>(rng: &mut R, max_len: usize) -> Vec<State> {
    let alpha = alphabet();
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| alpha[rng.gen_range(0..alpha.len())].clone())
        .collect()
}

/// Every sequence of `len` indices below `n`, in lexicographic order.
pub fn sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..n).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}
