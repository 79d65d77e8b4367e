mod common;

use actual_cause::ness::{self, single_conjunct_audit, ContextSet};
use actual_cause::{CauseConjunct, Context, Evaluator, ExtendedCausalModel, Rank, RankingFunction};
use common::*;
use rand::Rng;

const MODELS: u64 = 120;

fn random_subset(r: &mut rand_chacha::ChaCha8Rng, all: &[Context], must: &Context) -> Vec<Context> {
    let mut out = vec![must.clone()];
    for c in all {
        if c != must && r.gen_bool(0.5) {
            out.push(c.clone());
        }
    }
    out
}

#[test]
fn verdicts_match_brute_force() {
    for seed in 0..MODELS {
        let mut r = rng(3000 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let all = all_contexts(&model);
        let listed = random_subset(&mut r, &all, &ctx);
        let ev = Evaluator::new(&model);
        for cause in actual_conjunctions(&model, &ctx, &effect, 3) {
            let c = CauseConjunct::new(&model, cause.iter().copied()).unwrap();
            for (set, contexts) in [(ContextSet::All, &all), (ContextSet::Listed(listed.clone()), &listed)] {
                let got = ness::is_ness_cause(&ev, &ctx, &c, &effect, &set).unwrap();
                assert_eq!(
                    got.is_cause(),
                    oracle_ness(&model, &ctx, &cause, &effect, contexts),
                    "seed {seed}, cause {}",
                    c.render(&model)
                );
            }
        }
    }
}

#[test]
fn witnesses_satisfy_nt1_to_nt3() {
    for seed in 0..MODELS {
        let mut r = rng(3000 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let all = all_contexts(&model);
        let ev = Evaluator::new(&model);
        let actual = solve(&model, &ctx, &[]);
        for (cause, w) in ness::enumerate_ness_causes(&ev, &ctx, &effect, &ContextSet::All).unwrap() {
            let s: Vec<_> = w.event_set.iter().collect();
            assert!(w.event_set.holds_at(&actual));
            assert!(cause.iter().all(|(v, x)| w.event_set.get(v) == Some(x)));
            assert!(oracle_strongly_sufficient(&model, &actual, &s, &effect, &all));
            let rest: Vec<_> = s.iter().copied().filter(|(v, _)| cause.get(*v).is_none()).collect();
            assert!(!oracle_strongly_sufficient(&model, &actual, &rest, &effect, &all), "seed {seed}");
            assert!(w.insufficiency_extension.holds_at(&actual));
        }
    }
}

#[test]
fn audit_finds_only_single_conjuncts() {
    for seed in 0..MODELS {
        let mut r = rng(4000 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ev = Evaluator::new(&model);
        let report = single_conjunct_audit(&ev, &ctx, &effect, &ContextSet::All).unwrap();
        assert!(report.violations.is_empty(), "seed {seed}");
    }
}

#[test]
fn constant_ranking_leaves_ness_unchanged() {
    for seed in 0..MODELS {
        let mut r = rng(5000 + seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let effect = random_effect(&mut r, &model);
        let ext = ExtendedCausalModel::new(model.clone(), RankingFunction::constant("K", Rank::Finite(0))).unwrap();
        let ev = Evaluator::new(&model);
        let plain = ness::enumerate_ness_causes(&ev, &ctx, &effect, &ContextSet::All).unwrap();
        let gated = ness::enumerate_ness_causes_default_aware(&ev, &ext, &ctx, &effect, &ContextSet::All).unwrap();
        assert_eq!(plain, gated, "seed {seed}");
    }
}

#[test]
fn empty_restricted_set_is_rejected() {
    let mut r = rng(7);
    let model = random_model(&mut r, "M");
    let ctx = random_context(&mut r, &model);
    let effect = random_effect(&mut r, &model);
    let ev = Evaluator::new(&model);
    assert!(ness::enumerate_ness_causes(&ev, &ctx, &effect, &ContextSet::Listed(vec![])).is_err());
}
