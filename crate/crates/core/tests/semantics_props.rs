mod common;

use actual_cause::{corpus, dsl, CausalModel, Evaluator, Formula, Intervention, VarId};
use common::*;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_event(r: &mut ChaCha8Rng, model: &CausalModel) -> Formula {
    let endo = model.endogenous();
    Formula::Event(endo[r.gen_range(0..endo.len())], r.gen_range(0..2))
}

fn random_intervention(r: &mut ChaCha8Rng, model: &CausalModel) -> Intervention {
    let mut iv = Intervention::new();
    for v in model.endogenous() {
        if r.gen_bool(0.3) {
            iv.set(*v, r.gen_range(0..2));
        }
    }
    iv
}

fn random_formula(r: &mut ChaCha8Rng, model: &CausalModel, depth: u32) -> Formula {
    if depth == 0 {
        return match r.gen_range(0..6) {
            0 => Formula::True,
            1 => Formula::False,
            _ => random_event(r, model),
        };
    }
    match r.gen_range(0..5) {
        0 => Formula::negation(random_formula(r, model, depth - 1)),
        1 => Formula::and(random_formula(r, model, depth - 1), random_formula(r, model, depth - 1)),
        2 => Formula::or(random_formula(r, model, depth - 1), random_formula(r, model, depth - 1)),
        3 => Formula::intervened(random_intervention(r, model), random_formula(r, model, depth - 1)),
        _ => random_event(r, model),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boolean_algebra(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let a = random_formula(&mut r, &model, 3);
        let b = random_formula(&mut r, &model, 3);
        let ev = Evaluator::new(&model);
        let (va, vb) = (ev.eval(&ctx, &a).unwrap(), ev.eval(&ctx, &b).unwrap());
        prop_assert_eq!(ev.eval(&ctx, &Formula::negation(a.clone())).unwrap(), !va);
        prop_assert_eq!(ev.eval(&ctx, &Formula::and(a.clone(), b.clone())).unwrap(), va && vb);
        prop_assert_eq!(ev.eval(&ctx, &Formula::or(a.clone(), b.clone())).unwrap(), va || vb);
        let lhs = Formula::negation(Formula::and(a.clone(), b.clone()));
        let rhs = Formula::or(Formula::negation(a), Formula::negation(b));
        prop_assert_eq!(ev.eval(&ctx, &lhs).unwrap(), ev.eval(&ctx, &rhs).unwrap());
    }

    #[test]
    fn intervention_matches_submodel(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let iv = random_intervention(&mut r, &model);
        let f = random_formula(&mut r, &model, 3);
        let sub = model.intervene(&iv).unwrap();
        let ev = Evaluator::new(&model);
        let direct = ev.eval_under(&ctx, &iv, &f).unwrap();
        prop_assert_eq!(direct, Evaluator::new(&sub).eval(&ctx, &f).unwrap());
        prop_assert_eq!(direct, ev.eval(&ctx, &Formula::intervened(iv, f)).unwrap());
    }

    #[test]
    fn nested_interventions_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let outer = random_intervention(&mut r, &model);
        let inner = random_intervention(&mut r, &model);
        let f = random_event(&mut r, &model);
        let ev = Evaluator::new(&model);
        let nested = Formula::intervened(outer.clone(), Formula::intervened(inner.clone(), f.clone()));
        prop_assert_eq!(ev.eval(&ctx, &nested).unwrap(), ev.eval_under(&ctx, &outer.compose(&inner), &f).unwrap());
    }

    #[test]
    fn solutions_satisfy_equations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, "M");
        let ctx = random_context(&mut r, &model);
        let iv = random_intervention(&mut r, &model);
        let world = solve(&model, &ctx, &iv.iter().collect::<Vec<_>>());
        for v in model.endogenous() {
            match iv.get(*v) {
                Some(x) => prop_assert_eq!(world[v.index()], x),
                None => {
                    let sub = model.intervene(&Intervention::from_pairs(
                        model.endogenous().iter().filter(|w| *w != v).map(|w| (*w, world[w.index()])),
                    )).unwrap();
                    prop_assert_eq!(sub.solve(&ctx).unwrap().get(*v), world[v.index()]);
                }
            }
        }
    }
}

#[test]
fn corpus_formulas_agree_with_submodels() {
    for name in corpus::names() {
        let doc = dsl::parse(corpus::source(name).unwrap()).unwrap();
        for q in &doc.queries {
            let model = doc.model(&q.model).unwrap();
            let ev = Evaluator::new(model);
            let Some(cause) = &q.cause else { continue };
            let iv = Intervention::from_pairs(cause.iter().map(|(v, x)| (v, 1 - x.min(1))));
            let direct = ev.eval_under(&q.context, &iv, &q.effect).unwrap();
            let sub = model.intervene(&iv).unwrap();
            assert_eq!(direct, Evaluator::new(&sub).eval(&q.context, &q.effect).unwrap(), "{name}/{}", q.name);
        }
    }
}

#[test]
fn unknown_variables_are_rejected() {
    let mut r = rng(9);
    let model = random_model(&mut r, "M");
    let f = Formula::Event(VarId(model.var_count() + 3), 0);
    assert!(f.check(&model).is_err());
}
