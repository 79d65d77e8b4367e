//! The causal NESS test: sufficiency, strong sufficiency, NT1-NT4, restricted
//! context sets, and checkers for the conditions linking NESS causes to HP
//! causes in both directions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{cause_candidates, CauseConjunct, Witness};
use crate::model::{CausalModel, Context, VarId};
use crate::normality::ExtendedCausalModel;
use crate::search::{proper_subsets, subsets_by_size, Assignments};
use crate::semantics::{Evaluator, Formula};

pub use crate::semantics::EventSet;

/// The contexts sufficiency is judged against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextSet {
    All,
    Listed(Vec<Context>),
}

impl ContextSet {
    /// `{u, u'}`, collapsing duplicates.
    pub fn pair(u: &Context, u_alt: &Context) -> ContextSet {
        if u == u_alt {
            ContextSet::Listed(vec![u.clone()])
        } else {
            ContextSet::Listed(vec![u.clone(), u_alt.clone()])
        }
    }

    pub fn contexts(&self, model: &CausalModel) -> Vec<Context> {
        match self {
            ContextSet::All => model.enumerate_contexts().collect(),
            ContextSet::Listed(cs) => cs.clone(),
        }
    }

    pub fn check(&self, model: &CausalModel) -> Result<()> {
        if let ContextSet::Listed(cs) = self {
            if cs.is_empty() {
                return Err(Error::Usage("a restricted context set must not be empty".into()));
            }
            for c in cs {
                model.context_from_indices(c.values())?;
            }
        }
        Ok(())
    }
}

/// A failure of strong sufficiency: `S ∪ S'` does not force the effect in `context`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub extension: EventSet,
    pub context: Context,
}

/// An NT1-NT3 certificate for a cause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NessWitness {
    pub event_set: EventSet,
    /// The context where `S` minus the cause stops being sufficient.
    pub insufficiency_context: Context,
    /// The actual events whose addition exposes that failure.
    pub insufficiency_extension: EventSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NessVerdict {
    Cause(NessWitness),
    FailsNt1,
    NoWitness,
    FailsNt4 { smaller: CauseConjunct, witness: NessWitness },
}

impl NessVerdict {
    pub fn is_cause(&self) -> bool {
        matches!(self, NessVerdict::Cause(_))
    }

    pub fn witness(&self) -> Option<&NessWitness> {
        match self {
            NessVerdict::Cause(w) => Some(w),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            NessVerdict::Cause(_) => "cause",
            NessVerdict::FailsNt1 => "fails_nt1",
            NessVerdict::NoWitness => "no_witness",
            NessVerdict::FailsNt4 { .. } => "fails_nt4",
        }
    }
}

/// `[S]φ` holds in every context of `u_set`.
pub fn is_sufficient(ev: &Evaluator, s: &EventSet, effect: &Formula, u_set: &ContextSet) -> Result<bool> {
    effect.check(ev.model())?;
    let o = ev.overrides(&s.to_intervention());
    for ctx in u_set.contexts(ev.model()) {
        if !ev.eval_dense(&ctx, &o, effect)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Strong sufficiency of `s` in `(M, context)`. The first failing `S'`
/// (by size, then declaration order) and context is reported.
pub fn is_strongly_sufficient(
    ev: &Evaluator,
    context: &Context,
    s: &EventSet,
    effect: &Formula,
    u_set: &ContextSet,
) -> Result<(bool, Option<Counterexample>)> {
    let cex = strong_sufficiency_failure(ev, context, s, effect, &u_set.contexts(ev.model()))?;
    Ok((cex.is_none(), cex))
}

fn strong_sufficiency_failure(
    ev: &Evaluator,
    context: &Context,
    s: &EventSet,
    effect: &Formula,
    contexts: &[Context],
) -> Result<Option<Counterexample>> {
    let model = ev.model();
    effect.check(model)?;
    let n = model.var_count();
    let actual = ev.solve(context, &vec![None; n])?;
    let rest: Vec<VarId> = model.endogenous().iter().copied().filter(|v| !s.contains_var(*v)).collect();
    ev.limits().check_vars("free variables in strong sufficiency", rest.len())?;
    let base = ev.overrides(&s.to_intervention());
    for extra in subsets_by_size(&rest) {
        let mut o = base.clone();
        for v in &extra {
            o[v.index()] = Some(actual[v.index()]);
        }
        for ctx in contexts {
            if !ev.eval_dense(ctx, &o, effect)? {
                let ext = EventSet::from_map(extra.iter().map(|v| (*v, actual[v.index()])).collect());
                return Ok(Some(Counterexample {
                    extension: ext,
                    context: ctx.clone(),
                }));
            }
        }
    }
    Ok(None)
}

/// NT1-NT3 for `cause`: the first event set (by added events, size then
/// declaration order) that is true, strongly sufficient over `u_set`, and
/// stops being strongly sufficient over `nt3_set` once the cause is removed.
fn nt123(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    u_set: &[Context],
    nt3_set: &[Context],
) -> Result<Option<NessWitness>> {
    let model = ev.model();
    let actual = ev.solve(context, &vec![None; model.var_count()])?;
    if !cause.holds_at(&actual) {
        return Ok(None);
    }
    let others: Vec<VarId> = model.endogenous().iter().copied().filter(|v| cause.get(*v).is_none()).collect();
    ev.limits().check_vars("endogenous variables in NESS search", model.endogenous().len())?;
    for extra in subsets_by_size(&others) {
        let rest = EventSet::from_map(extra.iter().map(|v| (*v, actual[v.index()])).collect());
        let s = rest.union_unchecked(&cause.to_event_set());
        if strong_sufficiency_failure(ev, context, &s, effect, u_set)?.is_some() {
            continue;
        }
        if let Some(cex) = strong_sufficiency_failure(ev, context, &rest, effect, nt3_set)? {
            return Ok(Some(NessWitness {
                event_set: s,
                insufficiency_context: cex.context,
                insufficiency_extension: cex.extension,
            }));
        }
    }
    Ok(None)
}

fn ness_verdict(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    u_set: &[Context],
    nt3_set: &[Context],
) -> Result<NessVerdict> {
    let model = ev.model();
    EventSet::from_events(model, cause.iter())?;
    effect.check(model)?;
    ev.limits().check_conjuncts(cause.len())?;
    if !cause.holds_at(&ev.solve(context, &vec![None; model.var_count()])?) {
        return Ok(NessVerdict::FailsNt1);
    }
    let Some(witness) = nt123(ev, context, cause, effect, u_set, nt3_set)? else {
        return Ok(NessVerdict::NoWitness);
    };
    for sub in proper_subsets(&cause.vars()) {
        let smaller = cause.restrict(&sub);
        if let Some(w) = nt123(ev, context, &smaller, effect, u_set, nt3_set)? {
            return Ok(NessVerdict::FailsNt4 { smaller, witness: w });
        }
    }
    Ok(NessVerdict::Cause(witness))
}

/// NT1-NT4 with respect to `u_set`.
pub fn is_ness_cause(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    u_set: &ContextSet,
) -> Result<NessVerdict> {
    u_set.check(ev.model())?;
    let cs = u_set.contexts(ev.model());
    ness_verdict(ev, context, cause, effect, &cs, &cs)
}

/// Contexts of `u_set` whose world is no less normal than the actual one.
fn normal_contexts(ext: &ExtendedCausalModel, context: &Context, contexts: &[Context]) -> Result<Vec<Context>> {
    let actual = ext.rank_of(&ext.world_of_context(context)?);
    let mut out = Vec::new();
    for c in contexts {
        if ext.rank_of(&ext.world_of_context(c)?) <= actual {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// As [`is_ness_cause`], except the NT3 failure must occur in a context
/// whose world ranks no higher than the actual world.
pub fn is_ness_cause_default_aware(
    ev: &Evaluator,
    ext: &ExtendedCausalModel,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    u_set: &ContextSet,
) -> Result<NessVerdict> {
    u_set.check(ev.model())?;
    let cs = u_set.contexts(ev.model());
    let gated = normal_contexts(ext, context, &cs)?;
    ness_verdict(ev, context, cause, effect, &cs, &gated)
}

/// Every NESS cause of `effect` up to the conjunction cap, smallest first.
pub fn enumerate_ness_causes(
    ev: &Evaluator,
    context: &Context,
    effect: &Formula,
    u_set: &ContextSet,
) -> Result<Vec<(CauseConjunct, NessWitness)>> {
    let model = ev.model();
    effect.check(model)?;
    u_set.check(model)?;
    let cs = u_set.contexts(model);
    enumerate_with(ev, context, effect, &cs, &cs)
}

pub fn enumerate_ness_causes_default_aware(
    ev: &Evaluator,
    ext: &ExtendedCausalModel,
    context: &Context,
    effect: &Formula,
    u_set: &ContextSet,
) -> Result<Vec<(CauseConjunct, NessWitness)>> {
    let model = ev.model();
    effect.check(model)?;
    u_set.check(model)?;
    let cs = u_set.contexts(model);
    let gated = normal_contexts(ext, context, &cs)?;
    enumerate_with(ev, context, effect, &cs, &gated)
}

fn enumerate_with(
    ev: &Evaluator,
    context: &Context,
    effect: &Formula,
    u_set: &[Context],
    nt3_set: &[Context],
) -> Result<Vec<(CauseConjunct, NessWitness)>> {
    let model = ev.model();
    let actual = ev.solve(context, &vec![None; model.var_count()])?;
    let candidates = cause_candidates(model, effect);
    let max = ev.limits().max_conjuncts.min(candidates.len());
    let mut found: Vec<(CauseConjunct, NessWitness)> = Vec::new();
    for k in 1..=max {
        for vars in itertools::Itertools::combinations(candidates.iter().copied(), k) {
            // NT4 rejects any conjunction containing a smaller cause.
            if found.iter().any(|(c, _)| c.iter().all(|(v, _)| vars.contains(&v))) {
                continue;
            }
            let cause = CauseConjunct::from_map(vars.iter().map(|v| (*v, actual[v.index()])).collect());
            if let Some(w) = nt123(ev, context, &cause, effect, u_set, nt3_set)? {
                found.push((cause, w));
            }
        }
    }
    Ok(found)
}

/// Result of auditing that every NESS cause is a single conjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub causes: Vec<CauseConjunct>,
    pub violations: Vec<CauseConjunct>,
}

pub fn single_conjunct_audit(
    ev: &Evaluator,
    context: &Context,
    effect: &Formula,
    u_set: &ContextSet,
) -> Result<AuditReport> {
    let causes: Vec<CauseConjunct> = enumerate_ness_causes(ev, context, effect, u_set)?
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    let violations = causes.iter().filter(|c| c.len() > 1).cloned().collect();
    Ok(AuditReport { causes, violations })
}

/// Partial settings over `pool`: every subset, every assignment to it.
fn partial_settings<'a>(model: &'a CausalModel, pool: &'a [VarId]) -> impl Iterator<Item = Vec<(VarId, usize)>> + 'a {
    subsets_by_size(pool).flat_map(move |vars| {
        let radices: Vec<usize> = vars.iter().map(|v| model.var(*v).range.len()).collect();
        Assignments::new(radices).map(move |vals| vars.iter().copied().zip(vals).collect::<Vec<_>>())
    })
}

fn settings_of(model: &CausalModel, vars: &[VarId]) -> impl Iterator<Item = Vec<(VarId, usize)>> {
    let radices: Vec<usize> = vars.iter().map(|v| model.var(*v).range.len()).collect();
    let vars = vars.to_vec();
    Assignments::new(radices).map(move |vals| vars.iter().copied().zip(vals).collect())
}

fn overrides_of(n: usize, groups: &[&[(VarId, usize)]]) -> Vec<Option<usize>> {
    let mut o = vec![None; n];
    for g in groups {
        for (v, x) in *g {
            o[v.index()] = Some(*x);
        }
    }
    o
}

fn single(cause: &CauseConjunct) -> Result<(VarId, usize)> {
    if cause.len() != 1 {
        return Err(Error::Precondition("bridge conditions apply to single-conjunct causes".into()));
    }
    Ok(cause.iter().next().expect("one conjunct"))
}

/// Which reading of the "T is independent" condition to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sh2Phrasing {
    /// Each `T` keeps its value whatever the other endogenous variables are set to.
    Body,
    /// `T` keeps its values under any intervention on variables outside `T`.
    Appendix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShPremise {
    pub t_set: Vec<VarId>,
    pub alt_context: Context,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShReport {
    pub sh1: bool,
    pub sh2: bool,
    pub sh3: bool,
    pub sh4: bool,
}

impl ShReport {
    pub fn all(&self) -> bool {
        self.sh1 && self.sh2 && self.sh3 && self.sh4
    }
}

/// Evaluates SH1-SH4 for a NESS cause `X=x` with witness `S`.
pub fn check_sh(
    ev: &Evaluator,
    context: &Context,
    premise: &ShPremise,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &NessWitness,
    phrasing: Sh2Phrasing,
) -> Result<ShReport> {
    sh_conditions(ev, context, premise, cause, effect, witness, phrasing, false)
}

/// With `stop_early`, conditions after the first failing one are reported false.
#[allow(clippy::too_many_arguments)]
fn sh_conditions(
    ev: &Evaluator,
    context: &Context,
    premise: &ShPremise,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &NessWitness,
    phrasing: Sh2Phrasing,
    stop_early: bool,
) -> Result<ShReport> {
    let model = ev.model();
    let n = model.var_count();
    let (x, xv) = single(cause)?;
    let s = &witness.event_set;
    if s.get(x) != Some(xv) {
        return Err(Error::Precondition("the event set does not contain the cause".into()));
    }
    model.context_from_indices(premise.alt_context.values())?;
    let t: BTreeSet<VarId> = premise.t_set.iter().copied().collect();
    let mentioned = effect.mentions();
    for v in &t {
        if !model.is_endogenous(*v) {
            return Err(Error::NotEndogenous(model.var(*v).name.clone()));
        }
        if mentioned.contains(v) || s.contains_var(*v) {
            return Err(Error::Precondition(format!(
                "T contains `{}`, which the effect or the event set mentions",
                model.var(*v).name
            )));
        }
    }
    let u = context;
    let u2 = &premise.alt_context;
    let none = vec![None; n];
    let s_minus: Vec<(VarId, usize)> = s.iter().filter(|(v, _)| *v != x).collect();

    let sh1 = !ev.eval_dense(u2, &overrides_of(n, &[&s_minus]), effect)?;
    let fail = ShReport { sh1, sh2: false, sh3: false, sh4: false };
    if stop_early && !sh1 {
        return Ok(fail);
    }

    let mut sh2 = true;
    'sh2: for ctx in [u, u2] {
        let actual = ev.solve(ctx, &none)?;
        match phrasing {
            Sh2Phrasing::Body => {
                for &tv in &t {
                    let rest: Vec<VarId> = model.endogenous().iter().copied().filter(|v| *v != tv).collect();
                    for w in settings_of(model, &rest) {
                        if ev.solve(ctx, &overrides_of(n, &[&w]))?[tv.index()] != actual[tv.index()] {
                            sh2 = false;
                            break 'sh2;
                        }
                    }
                }
            }
            Sh2Phrasing::Appendix => {
                let pool: Vec<VarId> = model.endogenous().iter().copied().filter(|v| !t.contains(v)).collect();
                for tp in partial_settings(model, &pool) {
                    let world = ev.solve(ctx, &overrides_of(n, &[&tp]))?;
                    if t.iter().any(|tv| world[tv.index()] != actual[tv.index()]) {
                        sh2 = false;
                        break 'sh2;
                    }
                }
            }
        }
    }

    if stop_early && !sh2 {
        return Ok(fail);
    }

    let mut sh3 = true;
    let pool: Vec<VarId> = model.endogenous().iter().copied().filter(|v| !t.contains(v) && *v != x).collect();
    'sh3: for tt in settings_of(model, &premise.t_set) {
        for tp in partial_settings(model, &pool) {
            for xp in 0..model.var(x).range.len() {
                let o = overrides_of(n, &[&tt, &tp, &[(x, xp)]]);
                if ev.eval_dense(u2, &o, effect)? != ev.eval_dense(u, &o, effect)? {
                    sh3 = false;
                    break 'sh3;
                }
            }
        }
    }

    if stop_early && !sh3 {
        return Ok(ShReport { sh2, ..fail });
    }

    let mut sh4 = true;
    let pool: Vec<VarId> = model.endogenous().iter().copied().filter(|v| !s.contains_var(*v)).collect();
    for tp in partial_settings(model, &pool) {
        let world = ev.solve(u, &overrides_of(n, &[&[(x, xv)], &tp]))?;
        if !s.holds_at(&world) {
            sh4 = false;
            break;
        }
    }

    Ok(ShReport { sh1, sh2, sh3, sh4 })
}

/// Variables eligible for `T`: endogenous, not in the effect or the event set.
fn sh_pool(model: &CausalModel, effect: &Formula, witness: &NessWitness) -> Vec<VarId> {
    let mentioned = effect.mentions();
    model
        .endogenous()
        .iter()
        .copied()
        .filter(|v| !mentioned.contains(v) && !witness.event_set.contains_var(*v))
        .collect()
}

/// Every SH premise (T by size then declaration order, contexts inside)
/// passing all four conditions.
pub fn sh_premises(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &NessWitness,
    phrasing: Sh2Phrasing,
    first_only: bool,
) -> Result<Vec<ShPremise>> {
    let model = ev.model();
    let pool = sh_pool(model, effect, witness);
    ev.limits().check_vars("candidate variables for T", pool.len())?;
    let mut out = Vec::new();
    for t_set in subsets_by_size(&pool) {
        for alt in model.enumerate_contexts() {
            let premise = ShPremise {
                t_set: t_set.clone(),
                alt_context: alt,
            };
            if sh_conditions(ev, context, &premise, cause, effect, witness, phrasing, true)?.all() {
                out.push(premise);
                if first_only {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

pub fn search_sh(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &NessWitness,
    phrasing: Sh2Phrasing,
) -> Result<Option<ShPremise>> {
    Ok(sh_premises(ev, context, cause, effect, witness, phrasing, true)?.into_iter().next())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnPremise {
    pub w_prime: Vec<VarId>,
    pub alt_context: Context,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnReport {
    pub sn1: bool,
    pub sn2: bool,
    pub sn3: bool,
}

impl SnReport {
    pub fn all(&self) -> bool {
        self.sn1 && self.sn2 && self.sn3
    }
}

/// Evaluates SN1-SN3 for an HP cause `X=x` with witness `(W, w, x')`.
pub fn check_sn(
    ev: &Evaluator,
    context: &Context,
    premise: &SnPremise,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &Witness,
) -> Result<SnReport> {
    sn_conditions(ev, context, premise, cause, effect, witness, false)
}

/// With `stop_early`, conditions after the first failing one are reported false.
fn sn_conditions(
    ev: &Evaluator,
    context: &Context,
    premise: &SnPremise,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &Witness,
    stop_early: bool,
) -> Result<SnReport> {
    let model = ev.model();
    let n = model.var_count();
    let (x, xv) = single(cause)?;
    if witness.x_prime.len() != 1 {
        return Err(Error::Precondition("witness does not match a single-conjunct cause".into()));
    }
    let xp = witness.x_prime[0];
    model.context_from_indices(premise.alt_context.values())?;
    let actual = ev.solve(context, &vec![None; n])?;
    let w_of = |v: VarId| witness.w_set.iter().position(|w| *w == v).map(|i| witness.w_vals[i]);
    let mut w1: Vec<(VarId, usize)> = Vec::new();
    for &v in &premise.w_prime {
        let Some(val) = w_of(v) else {
            return Err(Error::Precondition(format!("`{}` is not in W", model.var(v).name)));
        };
        if actual[v.index()] != val {
            return Err(Error::Precondition(format!(
                "`{}` does not already take its contingency value",
                model.var(v).name
            )));
        }
        w1.push((v, val));
    }
    let w2: Vec<(VarId, usize)> = witness
        .w_set
        .iter()
        .copied()
        .zip(witness.w_vals.iter().copied())
        .filter(|(v, _)| !premise.w_prime.contains(v))
        .collect();
    let w_all: Vec<(VarId, usize)> = witness.w_set.iter().copied().zip(witness.w_vals.iter().copied()).collect();
    let z_rest: Vec<VarId> = witness.z_set.iter().copied().filter(|v| *v != x).collect();
    let u = context;
    let u2 = &premise.alt_context;

    let world = ev.solve(u2, &overrides_of(n, &[&w1]))?;
    let sn1 = world[x.index()] == xp && w2.iter().all(|(v, val)| world[v.index()] == *val);
    if stop_early && !sn1 {
        return Ok(SnReport { sn1, sn2: false, sn3: false });
    }

    let mut sn2 = true;
    for zp in partial_settings(model, &z_rest) {
        let world = ev.solve(u2, &overrides_of(n, &[&[(x, xv)], &w1, &zp]))?;
        if w2.iter().any(|(v, val)| world[v.index()] != *val) {
            sn2 = false;
            break;
        }
    }

    if stop_early && !sn2 {
        return Ok(SnReport { sn1, sn2, sn3: false });
    }

    let mut sn3 = true;
    'sn3: for zp in partial_settings(model, &z_rest) {
        for xpp in 0..model.var(x).range.len() {
            let o = overrides_of(n, &[&[(x, xpp)], &w_all, &zp]);
            if ev.eval_dense(u2, &o, effect)? != ev.eval_dense(u, &o, effect)? {
                sn3 = false;
                break 'sn3;
            }
        }
    }

    Ok(SnReport { sn1, sn2, sn3 })
}

/// Every SN premise passing all three conditions: `W'` ranges over subsets
/// of `W` already at their contingency values, contexts inside.
pub fn sn_premises(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &Witness,
    first_only: bool,
) -> Result<Vec<SnPremise>> {
    let model = ev.model();
    single(cause)?;
    let actual = ev.solve(context, &vec![None; model.var_count()])?;
    let pool: Vec<VarId> = witness
        .w_set
        .iter()
        .zip(&witness.w_vals)
        .filter(|(v, val)| actual[v.index()] == **val)
        .map(|(v, _)| *v)
        .collect();
    ev.limits().check_vars("candidate variables for W'", pool.len())?;
    let mut out = Vec::new();
    for w_prime in subsets_by_size(&pool) {
        for alt in model.enumerate_contexts() {
            let premise = SnPremise {
                w_prime: w_prime.clone(),
                alt_context: alt,
            };
            if sn_conditions(ev, context, &premise, cause, effect, witness, true)?.all() {
                out.push(premise);
                if first_only {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

pub fn search_sn(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &Witness,
) -> Result<Option<SnPremise>> {
    Ok(sn_premises(ev, context, cause, effect, witness, true)?.into_iter().next())
}
