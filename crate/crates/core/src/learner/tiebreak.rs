//! Tie-breaking policies: the learner's source of randomness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{preferred_version_space, PreferenceModel, VersionSpace};

pub struct TieContext<'a> {
    pub current: usize,
    pub space: &'a VersionSpace,
    pub pref: &'a PreferenceModel,
    pub target: usize,
}

pub trait TieBreaker {
    /// Picks one of `ties` (sorted, at least two entries).
    fn choose(&mut self, ties: &[usize], ctx: &TieContext<'_>) -> usize;
}

/// Uniformly random choice from a seeded stream.
pub struct UniformTies {
    rng: ChaCha8Rng,
}

impl UniformTies {
    pub fn new(seed: u64) -> Self {
        UniformTies {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl TieBreaker for UniformTies {
    fn choose(&mut self, ties: &[usize], _: &TieContext<'_>) -> usize {
        ties[self.rng.gen_range(0..ties.len())]
    }
}

/// Deterministic stand-in for the worst case: avoid the target, then pick the
/// hypothesis whose preferred version space is largest, then the lowest id.
#[derive(Clone, Copy, Debug, Default)]
pub struct AdversarialTies;

impl TieBreaker for AdversarialTies {
    fn choose(&mut self, ties: &[usize], ctx: &TieContext<'_>) -> usize {
        let score = |&id: &usize| {
            let remaining = preferred_version_space(id, ctx.space, ctx.pref, ctx.target).len();
            (id != ctx.target, remaining, std::cmp::Reverse(id))
        };
        *ties
            .iter()
            .max_by_key(|id| score(id))
            .expect("non-empty tie set")
    }
}

/// Replays a fixed sequence of choice indices and records the size of every
/// tie set it meets, so that all realizations can be enumerated like an
/// odometer. Choices past the end of the script default to index 0.
#[derive(Clone, Debug, Default)]
pub struct ScriptedTies {
    script: Vec<usize>,
    arity: Vec<usize>,
    pos: usize,
}

impl ScriptedTies {
    pub fn new(script: Vec<usize>) -> Self {
        ScriptedTies {
            script,
            arity: Vec::new(),
            pos: 0,
        }
    }

    /// The script of the lexicographically next realization, or `None` when
    /// every realization has been visited. Call after a complete run.
    pub fn next_script(&self) -> Option<Vec<usize>> {
        let used = self.pos;
        let mut script: Vec<usize> = (0..used)
            .map(|k| self.script.get(k).copied().unwrap_or(0))
            .collect();
        for k in (0..used).rev() {
            if script[k] + 1 < self.arity[k] {
                script[k] += 1;
                script.truncate(k + 1);
                return Some(script);
            }
        }
        None
    }

    pub fn decisions(&self) -> usize {
        self.pos
    }
}

impl TieBreaker for ScriptedTies {
    fn choose(&mut self, ties: &[usize], _: &TieContext<'_>) -> usize {
        let k = self.pos;
        self.pos += 1;
        self.arity.truncate(k);
        self.arity.push(ties.len());
        let pick = self.script.get(k).copied().unwrap_or(0);
        ties[pick.min(ties.len() - 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx<'a>(space: &'a VersionSpace, pref: &'a PreferenceModel) -> TieContext<'a> {
        TieContext {
            current: 0,
            space,
            pref,
            target: 1,
        }
    }

    #[test]
    fn scripted_enumerates_all_branches() {
        let space = VersionSpace::from_ids([0, 1, 2].into());
        let pref = PreferenceModel::Uniform;
        let mut seen = Vec::new();
        let mut script = Vec::new();
        loop {
            let mut t = ScriptedTies::new(script.clone());
            let a = t.choose(&[0, 1, 2], &ctx(&space, &pref));
            let b = if a == 0 {
                t.choose(&[5, 6], &ctx(&space, &pref))
            } else {
                9
            };
            seen.push((a, b));
            match t.next_script() {
                Some(s) => script = s,
                None => break,
            }
        }
        assert_eq!(seen, [(0, 5), (0, 6), (1, 9), (2, 9)]);
    }

    #[test]
    fn adversary_avoids_target() {
        let space = VersionSpace::from_ids([0, 1, 2].into());
        let pref = PreferenceModel::Uniform;
        assert_eq!(AdversarialTies.choose(&[1, 2], &ctx(&space, &pref)), 2);
        assert_eq!(AdversarialTies.choose(&[0, 1, 2], &ctx(&space, &pref)), 0);
    }

    #[test]
    fn uniform_is_reproducible() {
        let space = VersionSpace::from_ids([0].into());
        let pref = PreferenceModel::Uniform;
        let ties: Vec<usize> = (0..10).collect();
        let draw = |seed| {
            let mut u = UniformTies::new(seed);
            (0..20)
                .map(|_| u.choose(&ties, &ctx(&space, &pref)))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(4), draw(4));
        assert_ne!(draw(4), draw(5));
    }
}
