mod common;

use actual_cause::hp::{self, cause_candidates};
use actual_cause::normality::{self, NormalityGate};
use actual_cause::{Ac2bVariant, CauseConjunct, Evaluator, ExtendedCausalModel};
use common::*;

const MODELS: u64 = 120;

#[test]
fn verdicts_match_brute_force() {
    for seed in 0..MODELS {
        let mut r = rng(seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ev = Evaluator::new(&model);
        for cause in actual_conjunctions(&model, &ctx, &effect, 3) {
            let c = CauseConjunct::new(&model, cause.iter().copied()).unwrap();
            for (variant, updated) in [(Ac2bVariant::Updated, true), (Ac2bVariant::Original, false)] {
                let verdict = hp::is_actual_cause(&ev, &ctx, &c, &effect, variant).unwrap();
                assert_eq!(
                    verdict.is_cause(),
                    oracle_hp(&model, &ctx, &cause, &effect, updated, None),
                    "seed {seed}, cause {}, {variant:?}",
                    c.render(&model)
                );
            }
        }
    }
}

#[test]
fn reported_witnesses_recheck() {
    for seed in 0..MODELS {
        let mut r = rng(seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ev = Evaluator::new(&model);
        for (cause, w) in hp::enumerate_causes(&ev, &ctx, &effect, Ac2bVariant::Updated).unwrap() {
            assert!(hp::check_ac1(&ev, &ctx, &cause, &effect).unwrap());
            assert!(hp::check_ac2(&ev, &ctx, &cause, &effect, &w, Ac2bVariant::Updated).unwrap(), "seed {seed}");
        }
    }
}

#[test]
fn enumeration_matches_brute_force() {
    for seed in 0..MODELS {
        let mut r = rng(seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ev = Evaluator::new(&model);
        let found: Vec<Vec<_>> = hp::enumerate_causes(&ev, &ctx, &effect, Ac2bVariant::Updated)
            .unwrap()
            .into_iter()
            .map(|(c, _)| c.iter().collect())
            .collect();
        let expected: Vec<Vec<_>> = actual_conjunctions(&model, &ctx, &effect, 3)
            .into_iter()
            .filter(|c| oracle_hp(&model, &ctx, c, &effect, true, None))
            .collect();
        let mut a = found.clone();
        let mut b = expected.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b, "seed {seed}");
        assert!(cause_candidates(&model, &effect).iter().all(|v| !effect.mentions().contains(v)));
    }
}

#[test]
fn gated_verdicts_match_brute_force() {
    for seed in 0..MODELS {
        let mut r = rng(1000 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ranking = random_ranking(&mut r, &model);
        let ext = ExtendedCausalModel::new(model.clone(), ranking.clone()).unwrap();
        let ev = Evaluator::new(&model);
        for cause in actual_conjunctions(&model, &ctx, &effect, 3) {
            let c = CauseConjunct::new(&model, cause.iter().copied()).unwrap();
            for (gate, strict) in [(NormalityGate::AtMost, false), (NormalityGate::Strict, true)] {
                let got = normality::is_cause_extended(&ev, &ext, &ctx, &c, &effect, Ac2bVariant::Updated, gate).unwrap();
                let g = Gate { ranking: &ranking, strict };
                assert_eq!(
                    got.is_cause(),
                    oracle_hp(&model, &ctx, &cause, &effect, true, Some(&g)),
                    "seed {seed}, cause {}, strict {strict}",
                    c.render(&model)
                );
            }
        }
    }
}

/// An updated-variant witness also satisfies the original AC2(b), so weak
/// causes under the updated variant are weak causes under the original.
#[test]
fn updated_witnesses_satisfy_original() {
    for seed in 0..MODELS {
        let mut r = rng(2000 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ev = Evaluator::new(&model);
        for cause in actual_conjunctions(&model, &ctx, &effect, 2) {
            let c = CauseConjunct::new(&model, cause.iter().copied()).unwrap();
            if let Some(w) = hp::find_witness(&ev, &ctx, &c, &effect, Ac2bVariant::Updated).unwrap() {
                assert!(hp::check_ac2(&ev, &ctx, &c, &effect, &w, Ac2bVariant::Original).unwrap());
            }
        }
    }
}
