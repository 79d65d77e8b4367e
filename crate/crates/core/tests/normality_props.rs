mod common;

use actual_cause::normality::{self, check_typicality};
use actual_cause::{
    hp, Ac2bVariant, CauseConjunct, Evaluator, ExtendedCausalModel, Formula, NormalityGate, Rank, RankingFunction,
};
use common::*;

const MODELS: u64 = 120;

#[test]
fn constant_ranking_reduces_to_updated() {
    for seed in 0..MODELS {
        let mut r = rng(6000 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ev = Evaluator::new(&model);
        for k in [0, 2] {
            let ext = ExtendedCausalModel::new(model.clone(), RankingFunction::constant("K", Rank::Finite(k))).unwrap();
            let plain = hp::enumerate_causes(&ev, &ctx, &effect, Ac2bVariant::Updated).unwrap();
            let gated =
                normality::enumerate_causes_extended(&ev, &ext, &ctx, &effect, Ac2bVariant::Updated, NormalityGate::AtMost)
                    .unwrap();
            assert_eq!(plain, gated, "seed {seed}");
        }
    }
}

#[test]
fn gated_witnesses_are_plain_witnesses() {
    for seed in 0..MODELS {
        let mut r = rng(6500 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ranking = random_ranking(&mut r, &model);
        let ext = ExtendedCausalModel::new(model.clone(), ranking).unwrap();
        let ev = Evaluator::new(&model);
        for cause in actual_conjunctions(&model, &ctx, &effect, 2) {
            let c = CauseConjunct::new(&model, cause.iter().copied()).unwrap();
            let strict =
                normality::find_witness_extended(&ev, &ext, &ctx, &c, &effect, Ac2bVariant::Updated, NormalityGate::Strict)
                    .unwrap();
            let at_most =
                normality::find_witness_extended(&ev, &ext, &ctx, &c, &effect, Ac2bVariant::Updated, NormalityGate::AtMost)
                    .unwrap();
            let plain = hp::find_witness(&ev, &ctx, &c, &effect, Ac2bVariant::Updated).unwrap();
            if strict.is_some() {
                assert!(at_most.is_some(), "seed {seed}");
            }
            if let Some(w) = &at_most {
                assert!(plain.is_some(), "seed {seed}");
                assert!(hp::check_ac2(&ev, &ctx, &c, &effect, w, Ac2bVariant::Updated).unwrap());
                assert!(normality::witness_admitted(&ev, &ext, &ctx, &c, w, NormalityGate::AtMost).unwrap());
            }
        }
    }
}

#[test]
fn lowering_all_contingency_ranks_keeps_weak_causes() {
    // A flat ranking admits every contingency.
    for seed in 0..MODELS {
        let mut r = rng(6800 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ranking = random_ranking(&mut r, &model);
        let ev = Evaluator::new(&model);
        let ext = ExtendedCausalModel::new(model.clone(), ranking.clone()).unwrap();
        let lowered = RankingFunction {
            name: "Low".into(),
            clauses: vec![],
            default: Rank::Finite(0),
        };
        let ext_low = ExtendedCausalModel::new(model.clone(), lowered).unwrap();
        for cause in actual_conjunctions(&model, &ctx, &effect, 2) {
            let c = CauseConjunct::new(&model, cause.iter().copied()).unwrap();
            let before =
                normality::find_witness_extended(&ev, &ext, &ctx, &c, &effect, Ac2bVariant::Updated, NormalityGate::AtMost)
                    .unwrap();
            let after =
                normality::find_witness_extended(&ev, &ext_low, &ctx, &c, &effect, Ac2bVariant::Updated, NormalityGate::AtMost)
                    .unwrap();
            if before.is_some() {
                assert!(after.is_some(), "seed {seed}");
            }
        }
    }
}

#[test]
fn gated_verdicts_match_oracle_for_original_variant() {
    for seed in 0..60 {
        let mut r = rng(7100 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ranking = random_ranking(&mut r, &model);
        let ext = ExtendedCausalModel::new(model.clone(), ranking.clone()).unwrap();
        let ev = Evaluator::new(&model);
        let gate = Gate { ranking: &ranking, strict: false };
        for cause in actual_conjunctions(&model, &ctx, &effect, 2) {
            let c = CauseConjunct::new(&model, cause.iter().copied()).unwrap();
            let got =
                normality::is_cause_extended(&ev, &ext, &ctx, &c, &effect, Ac2bVariant::Original, NormalityGate::AtMost)
                    .unwrap();
            assert_eq!(got.is_cause(), oracle_hp(&model, &ctx, &cause, &effect, false, Some(&gate)), "seed {seed}");
        }
    }
}

#[test]
fn typicality_matches_least_rank_worlds() {
    for seed in 0..MODELS {
        let mut r = rng(7400 + seed);
        let model = random_model(&mut r, "M");
        let ranking = random_ranking(&mut r, &model);
        let ext = ExtendedCausalModel::new(model.clone(), ranking.clone()).unwrap();
        let endo = model.endogenous().to_vec();
        let p = Formula::Event(endo[0], 1);
        let q = Formula::Event(endo[1], 0);
        let worlds: Vec<Vec<usize>> = settings(&endo)
            .into_iter()
            .map(|s| {
                let mut w = vec![0; model.var_count()];
                for (v, x) in s {
                    w[v.index()] = x;
                }
                w
            })
            .filter(|w| p.holds_at(w))
            .collect();
        let least = worlds.iter().map(|w| ranking.rank(w)).min().unwrap();
        let expected = worlds.iter().filter(|w| ranking.rank(w) == least).all(|w| q.holds_at(w));
        assert_eq!(check_typicality(&ext, &p, &q).unwrap(), expected, "seed {seed}");
    }
}

#[test]
fn rank_uses_first_matching_clause() {
    let mut r = rng(1);
    let model = random_model(&mut r, "M");
    let endo = model.endogenous().to_vec();
    let ranking = RankingFunction {
        name: "R".into(),
        clauses: vec![
            (Formula::Event(endo[0], 1), Rank::Finite(3)),
            (Formula::Event(endo[1], 1), Rank::Finite(1)),
        ],
        default: Rank::Infinite,
    };
    let mut w = vec![0; model.var_count()];
    assert_eq!(ranking.rank(&w), Rank::Infinite);
    w[endo[1].index()] = 1;
    assert_eq!(ranking.rank(&w), Rank::Finite(1));
    w[endo[0].index()] = 1;
    assert_eq!(ranking.rank(&w), Rank::Finite(3));
    assert!(Rank::Finite(7) < Rank::Infinite);
}
