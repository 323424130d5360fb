mod common;

use pltl_teach::analysis::minimal_length;
use pltl_teach::domains::StateDomain;
use pltl_teach::learner::{HypothesisSet, IdSet, VersionSpace};
use pltl_teach::semantics::verdict_on_states;
use pltl_teach::teacher::{
    build_ip, compute_demonstration, esmt_step, solve_ip, Budget, DemoRequest, Objective,
    TeachError, TeacherConfig,
};
use pltl_teach::{DemoLabel, Formula, State, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

struct Instance {
    domain: StateDomain,
    hyps: HypothesisSet,
    max_len: usize,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n_states = rng.gen_range(2..=4);
    let names = &NAMES[..n_states];
    let size = rng.gen_range(2..=15);
    let mut formulas: Vec<Formula> = Vec::new();
    while formulas.len() < size {
        let mut f = common::random_formula(rng, 2, 3);
        // Keep atoms inside the instance alphabet.
        if n_states < 3 {
            f = f.render().replace("sym:c", "sym:a").parse().unwrap();
        }
        if !formulas.contains(&f) {
            formulas.push(f);
        }
    }
    let target = rng.gen_range(0..size);
    Instance {
        domain: StateDomain::symbolic(names),
        hyps: HypothesisSet::new(formulas, target).unwrap(),
        max_len: rng.gen_range(1..=5),
    }
}

/// Best elimination count per length for `label`, by enumeration. A
/// trajectory counts when the target gets the label's verdict and every
/// candidate is decided.
fn brute_force(inst: &Instance, label: DemoLabel, candidates: &[usize]) -> Vec<Option<usize>> {
    let alpha: Vec<State> = inst.domain.alphabet().to_vec();
    let want = Verdict::of_label(label);
    let mut out = vec![None; inst.max_len + 1];
    for (len, slot) in out.iter_mut().enumerate().skip(1) {
        for seq in common::sequences(alpha.len(), len) {
            let states: Vec<State> = seq.iter().map(|&s| alpha[s].clone()).collect();
            if verdict_on_states(inst.hyps.target_formula(), &states) != want {
                continue;
            }
            let mut kappa = Some(0);
            for &c in candidates {
                match verdict_on_states(inst.hyps.formula(c), &states) {
                    Verdict::Undetermined => kappa = None,
                    v if v != want => kappa = kappa.map(|k| k + 1),
                    _ => {}
                }
            }
            if let Some(k) = kappa {
                *slot = Some(slot.map_or(k, |b: usize| b.max(k)));
            }
        }
    }
    out
}

/// Expected `(label, kappa, length)` of one teaching step.
fn expected_choice(
    objective: Objective,
    pos: &[Option<usize>],
    neg: &[Option<usize>],
) -> Option<(DemoLabel, usize, usize)> {
    let rank = |k: usize, l: usize| -> (f64, usize, std::cmp::Reverse<usize>) {
        match objective {
            Objective::AN => (k as f64, k, std::cmp::Reverse(l)),
            Objective::AL => (k as f64 / l as f64, k, std::cmp::Reverse(l)),
        }
    };
    let best = |scores: &[Option<usize>]| {
        scores
            .iter()
            .enumerate()
            .filter_map(|(l, k)| k.map(|k| (k, l)))
            .max_by(|a, b| {
                rank(a.0, a.1)
                    .partial_cmp(&rank(b.0, b.1))
                    .unwrap()
                    .then(b.1.cmp(&a.1))
            })
    };
    let primary = |k: usize, l: usize| match objective {
        Objective::AN => k as f64,
        Objective::AL => k as f64 / l as f64,
    };
    let chosen = match (best(pos), best(neg)) {
        (Some(p), Some(n)) if primary(n.0, n.1) > primary(p.0, p.1) => {
            Some((DemoLabel::Negative, n.0, n.1))
        }
        (Some(p), _) => Some((DemoLabel::Positive, p.0, p.1)),
        (None, Some(n)) => Some((DemoLabel::Negative, n.0, n.1)),
        (None, None) => None,
    };
    chosen.filter(|c| c.1 > 0)
}

#[test]
fn solver_matches_enumeration_per_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let inst = random_instance(&mut rng);
        let target = inst.hyps.target();
        let cands: Vec<usize> = (0..inst.hyps.len()).filter(|&i| i != target).collect();
        let pairs: Vec<(usize, Formula)> = cands
            .iter()
            .map(|&i| (i, inst.hyps.formula(i).clone()))
            .collect();
        for label in [DemoLabel::Positive, DemoLabel::Negative] {
            let expect = brute_force(&inst, label, &cands);
            for (len, want) in expect.iter().enumerate().skip(1) {
                let Ok(ip) = build_ip(
                    label,
                    &pairs,
                    inst.hyps.target_formula(),
                    len,
                    &inst.domain,
                    Objective::AN,
                ) else {
                    assert!((len as u64) < minimal_length(inst.hyps.target_formula(), label));
                    assert_eq!(*want, None);
                    continue;
                };
                let got = solve_ip(&ip, &Budget::default()).ok().map(|s| {
                    assert_eq!(ip.evaluate(&s.states).map(|e| e.len()), Some(s.kappa));
                    s.kappa
                });
                assert_eq!(
                    got,
                    *want,
                    "label {label}, length {len}, target {}",
                    inst.hyps.target_formula()
                );
            }
        }
    }
}

#[test]
fn teaching_step_matches_enumeration_for_both_objectives() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let inst = random_instance(&mut rng);
        let target = inst.hyps.target();
        let cands: Vec<usize> = (0..inst.hyps.len()).filter(|&i| i != target).collect();
        let pos = brute_force(&inst, DemoLabel::Positive, &cands);
        let neg = brute_force(&inst, DemoLabel::Negative, &cands);
        let space = VersionSpace::full(&inst.hyps);
        let preferred: IdSet = inst.hyps.all_ids();
        for objective in [Objective::AN, Objective::AL] {
            let cfg = TeacherConfig::new(objective, inst.max_len);
            let req = DemoRequest {
                hyps: &inst.hyps,
                domain: &inst.domain,
                space: &space,
                preferred: &preferred,
                target,
                protected: &[],
                cfg: &cfg,
            };
            let want = expected_choice(objective, &pos, &neg);
            for got in [compute_demonstration(&req, None), esmt_step(&req)] {
                match (got, want) {
                    (Ok(c), Some((label, kappa, len))) => {
                        assert_eq!(
                            (c.demo.label, c.kappa, c.demo.len()),
                            (label, kappa, len),
                            "{objective:?}"
                        );
                    }
                    (Err(TeachError::NoProgress { .. }), None) => {}
                    (got, want) => panic!("{objective:?}: got {got:?}, expected {want:?}"),
                }
            }
        }
    }
}
