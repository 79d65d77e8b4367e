//! Seeded random models and brute-force oracles that work straight from the
//! definitions, sharing nothing with the engines but the model solver.

#![allow(dead_code)]

use actual_cause::expr::{CmpOp, Expr};
use actual_cause::model::StructuralEquation;
use actual_cause::{
    CausalModel, Context, Formula, Intervention, ModelDef, Rank, RankingFunction, VarId, VarKind, VariableDecl,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random acyclic binary model: 1-2 exogenous and 2-4 endogenous
/// variables, each equation an arbitrary truth table over up to three
/// earlier variables.
pub fn random_model(rng: &mut ChaCha8Rng, name: &str) -> CausalModel {
    let n_exo = rng.gen_range(1..=2);
    let n_endo = rng.gen_range(2..=4);
    let mut variables = Vec::new();
    for i in 0..n_exo {
        variables.push(VariableDecl::new(format!("U{i}"), &["0", "1"], VarKind::Exogenous));
    }
    for i in 0..n_endo {
        variables.push(VariableDecl::new(format!("X{i}"), &["0", "1"], VarKind::Endogenous));
    }
    let mut equations = Vec::new();
    for i in 0..n_endo {
        let target = n_exo + i;
        let mut pool: Vec<usize> = (0..target).collect();
        let k = rng.gen_range(1..=pool.len().min(3));
        let mut parents = Vec::new();
        for _ in 0..k {
            parents.push(pool.swap_remove(rng.gen_range(0..pool.len())));
        }
        parents.sort();
        let mut arms = Vec::new();
        for row in 0..1usize << k {
            if rng.gen_bool(0.5) {
                let cond = parents
                    .iter()
                    .enumerate()
                    .map(|(j, p)| Expr::Cmp(CmpOp::Eq, Box::new(Expr::Var(VarId(*p))), Box::new(Expr::Const((row >> j & 1) as i64))))
                    .reduce(|a, b| Expr::And(Box::new(a), Box::new(b)))
                    .expect("at least one parent");
                arms.push((cond, Expr::Const(1)));
            }
        }
        equations.push(StructuralEquation {
            target: VarId(target),
            body: Expr::Case(arms, Box::new(Expr::Const(0))),
        });
    }
    ModelDef {
        name: name.to_string(),
        variables,
        equations,
    }
    .build()
    .expect("generated models are valid")
}

pub fn random_context(rng: &mut ChaCha8Rng, model: &CausalModel) -> Context {
    let vals: Vec<usize> = model.exogenous().iter().map(|_| rng.gen_range(0..2)).collect();
    model.context_from_indices(&vals).unwrap()
}

/// A random ranking: a few conjunctive clauses with ranks 0-3 and a default.
pub fn random_ranking(rng: &mut ChaCha8Rng, model: &CausalModel) -> RankingFunction {
    let endo = model.endogenous().to_vec();
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(0..4) {
        let mut events = Vec::new();
        for v in &endo {
            if rng.gen_bool(0.4) {
                events.push(Formula::Event(*v, rng.gen_range(0..2)));
            }
        }
        clauses.push((Formula::conjunction(events), Rank::Finite(rng.gen_range(0..4))));
    }
    RankingFunction {
        name: "R".into(),
        clauses,
        default: Rank::Finite(rng.gen_range(0..4)),
    }
}

pub fn solve(model: &CausalModel, ctx: &Context, iv: &[(VarId, usize)]) -> Vec<usize> {
    model
        .solve_with(ctx, &Intervention::from_pairs(iv.iter().copied()))
        .unwrap()
        .values()
        .to_vec()
}

/// Every subset of `items`, as bitmask-selected vectors.
pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1u32 << items.len())
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Every binary assignment to `vars`.
pub fn settings(vars: &[VarId]) -> Vec<Vec<(VarId, usize)>> {
    (0..1u32 << vars.len())
        .map(|m| vars.iter().enumerate().map(|(i, v)| (*v, (m >> i & 1) as usize)).collect())
        .collect()
}

pub fn holds(f: &Formula, world: &[usize]) -> bool {
    f.holds_at(world)
}

/// Rank of the most normal total endogenous assignment extending `partial`.
pub fn least_rank_extending(model: &CausalModel, ranking: &RankingFunction, partial: &[(VarId, usize)]) -> Option<Rank> {
    let endo = model.endogenous().to_vec();
    let mut best: Option<Rank> = None;
    for s in settings(&endo) {
        if partial.iter().any(|(v, x)| s.iter().any(|(w, y)| w == v && y != x)) {
            continue;
        }
        let mut world = vec![0; model.var_count()];
        for (v, x) in &s {
            world[v.index()] = *x;
        }
        let r = ranking.rank(&world);
        best = Some(best.map_or(r, |b| b.min(r)));
    }
    best
}

pub struct Gate<'a> {
    pub ranking: &'a RankingFunction,
    pub strict: bool,
}

/// AC1 and AC2 by exhaustive search.
pub fn oracle_weak_cause(
    model: &CausalModel,
    ctx: &Context,
    cause: &[(VarId, usize)],
    effect: &Formula,
    updated: bool,
    gate: Option<&Gate>,
) -> bool {
    let actual = solve(model, ctx, &[]);
    if !cause.iter().all(|(v, x)| actual[v.index()] == *x) || !holds(effect, &actual) {
        return false;
    }
    let actual_rank = gate.map(|g| g.ranking.rank(&actual));
    let xs: Vec<VarId> = cause.iter().map(|p| p.0).collect();
    let others: Vec<VarId> = model.endogenous().iter().copied().filter(|v| !xs.contains(v)).collect();
    for w_set in subsets(&others) {
        let z_rest: Vec<VarId> = others.iter().copied().filter(|v| !w_set.contains(v)).collect();
        for x_alt in settings(&xs) {
            if x_alt.iter().zip(cause).all(|(a, b)| a == b) {
                continue;
            }
            'w: for w in settings(&w_set) {
                let mut setting = x_alt.clone();
                setting.extend(w.iter().copied());
                if holds(effect, &solve(model, ctx, &setting)) {
                    continue;
                }
                if let (Some(g), Some(ar)) = (gate, actual_rank) {
                    let admitted = least_rank_extending(model, g.ranking, &setting)
                        .is_some_and(|r| if g.strict { r < ar } else { r <= ar });
                    if !admitted {
                        continue;
                    }
                }
                let w_subsets = if updated { subsets(&w) } else { vec![w.clone()] };
                for w_sub in &w_subsets {
                    for z_sub in subsets(&z_rest) {
                        let mut iv = cause.to_vec();
                        iv.extend(w_sub.iter().copied());
                        iv.extend(z_sub.iter().map(|v| (*v, actual[v.index()])));
                        if !holds(effect, &solve(model, ctx, &iv)) {
                            continue 'w;
                        }
                    }
                }
                return true;
            }
        }
    }
    false
}

/// AC1-AC3 by exhaustive search.
pub fn oracle_hp(
    model: &CausalModel,
    ctx: &Context,
    cause: &[(VarId, usize)],
    effect: &Formula,
    updated: bool,
    gate: Option<&Gate>,
) -> bool {
    if !oracle_weak_cause(model, ctx, cause, effect, updated, gate) {
        return false;
    }
    subsets(cause)
        .into_iter()
        .filter(|s| !s.is_empty() && s.len() < cause.len())
        .all(|s| !oracle_weak_cause(model, ctx, &s, effect, updated, gate))
}

fn actual_events(model: &CausalModel, actual: &[usize]) -> Vec<(VarId, usize)> {
    model.endogenous().iter().map(|v| (*v, actual[v.index()])).collect()
}

/// `S` stays sufficient in every context of `u_set` under any addition of
/// actual events.
pub fn oracle_strongly_sufficient(
    model: &CausalModel,
    actual: &[usize],
    s: &[(VarId, usize)],
    effect: &Formula,
    u_set: &[Context],
) -> bool {
    let extra_pool: Vec<(VarId, usize)> = actual_events(model, actual)
        .into_iter()
        .filter(|(v, _)| !s.iter().any(|(w, _)| w == v))
        .collect();
    subsets(&extra_pool).iter().all(|extra| {
        let mut iv = s.to_vec();
        iv.extend(extra.iter().copied());
        u_set.iter().all(|u| holds(effect, &solve(model, u, &iv)))
    })
}

/// NT1-NT3: some true, strongly sufficient `S` containing the cause whose
/// remainder is not strongly sufficient.
pub fn oracle_nt123(model: &CausalModel, ctx: &Context, cause: &[(VarId, usize)], effect: &Formula, u_set: &[Context]) -> bool {
    let actual = solve(model, ctx, &[]);
    if !cause.iter().all(|(v, x)| actual[v.index()] == *x) {
        return false;
    }
    let pool: Vec<(VarId, usize)> = actual_events(model, &actual)
        .into_iter()
        .filter(|(v, _)| !cause.iter().any(|(w, _)| w == v))
        .collect();
    subsets(&pool).into_iter().any(|rest| {
        let mut s = rest.clone();
        s.extend(cause.iter().copied());
        oracle_strongly_sufficient(model, &actual, &s, effect, u_set)
            && !oracle_strongly_sufficient(model, &actual, &rest, effect, u_set)
    })
}

/// NT1-NT4.
pub fn oracle_ness(model: &CausalModel, ctx: &Context, cause: &[(VarId, usize)], effect: &Formula, u_set: &[Context]) -> bool {
    oracle_nt123(model, ctx, cause, effect, u_set)
        && subsets(cause)
            .into_iter()
            .filter(|s| !s.is_empty() && s.len() < cause.len())
            .all(|s| !oracle_nt123(model, ctx, &s, effect, u_set))
}

/// Actual-valued conjunctions over the endogenous variables `effect` does
/// not mention, up to `max` conjuncts.
pub fn actual_conjunctions(model: &CausalModel, ctx: &Context, effect: &Formula, max: usize) -> Vec<Vec<(VarId, usize)>> {
    let actual = solve(model, ctx, &[]);
    let vars: Vec<VarId> = model.endogenous().iter().copied().filter(|v| !effect.mentions().contains(v)).collect();
    subsets(&vars)
        .into_iter()
        .filter(|s| !s.is_empty() && s.len() <= max)
        .map(|s| s.into_iter().map(|v| (v, actual[v.index()])).collect())
        .collect()
}

/// A random effect: an event on one of the last two endogenous variables.
pub fn random_effect(rng: &mut ChaCha8Rng, model: &CausalModel) -> Formula {
    let endo = model.endogenous();
    let v = endo[endo.len() - 1 - rng.gen_range(0..2.min(endo.len()))];
    Formula::Event(v, rng.gen_range(0..2))
}

pub fn all_contexts(model: &CausalModel) -> Vec<Context> {
    model.enumerate_contexts().collect()
}

/// Premises accepted by the bridge checkers whose conclusion fails, and the
/// number of accepted premises, for every single-conjunct cause of `effect`.
pub fn bridge_violations(model: &CausalModel, ctx: &Context, effect: &Formula) -> (usize, usize) {
    use actual_cause::ness::{self, ContextSet, Sh2Phrasing};
    use actual_cause::{hp, Ac2bVariant, Evaluator};
    let ev = Evaluator::new(model);
    let (mut accepted, mut violations) = (0, 0);
    for (cause, w) in ness::enumerate_ness_causes(&ev, ctx, effect, &ContextSet::All).unwrap() {
        if cause.len() != 1 {
            continue;
        }
        let verdict = hp::is_actual_cause(&ev, ctx, &cause, effect, Ac2bVariant::Updated).unwrap();
        for phrasing in [Sh2Phrasing::Body, Sh2Phrasing::Appendix] {
            let premises = ness::sh_premises(&ev, ctx, &cause, effect, &w, phrasing, false).unwrap();
            accepted += premises.len();
            if !verdict.is_cause() {
                violations += premises.len();
            }
        }
    }
    for (cause, w) in hp::enumerate_causes(&ev, ctx, effect, Ac2bVariant::Updated).unwrap() {
        if cause.len() != 1 {
            continue;
        }
        for p in ness::sn_premises(&ev, ctx, &cause, effect, &w, false).unwrap() {
            accepted += 1;
            let pair = ContextSet::pair(ctx, &p.alt_context);
            if !ness::is_ness_cause(&ev, ctx, &cause, effect, &pair).unwrap().is_cause() {
                violations += 1;
            }
        }
    }
    (accepted, violations)
}
