//! The HP definition of actual causation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, VarId};
use crate::search::{proper_subsets, subsets_by_size, Assignments};
use crate::semantics::{EventSet, Evaluator, Formula};

/// A conjunction `X1=x1 & ... & Xk=xk` over distinct endogenous variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CauseConjunct {
    assignments: BTreeMap<VarId, usize>,
}

impl CauseConjunct {
    pub fn new(model: &CausalModel, pairs: impl IntoIterator<Item = (VarId, usize)>) -> Result<Self> {
        let events = EventSet::from_events(model, pairs)?;
        if events.is_empty() {
            return Err(Error::Usage("a cause needs at least one conjunct".into()));
        }
        Ok(CauseConjunct {
            assignments: events.iter().collect(),
        })
    }

    pub(crate) fn from_map(assignments: BTreeMap<VarId, usize>) -> Self {
        debug_assert!(!assignments.is_empty());
        CauseConjunct { assignments }
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.assignments.keys().copied().collect()
    }

    pub fn values(&self) -> Vec<usize> {
        self.assignments.values().copied().collect()
    }

    pub fn get(&self, var: VarId) -> Option<usize> {
        self.assignments.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.assignments.iter().map(|(k, v)| (*k, *v))
    }

    /// The sub-conjunction on `vars`.
    pub fn restrict(&self, vars: &[VarId]) -> CauseConjunct {
        CauseConjunct::from_map(vars.iter().map(|v| (*v, self.assignments[v])).collect())
    }

    pub fn to_event_set(&self) -> EventSet {
        EventSet::from_map(self.assignments.clone())
    }

    pub fn holds_at(&self, values: &[usize]) -> bool {
        self.iter().all(|(v, x)| values[v.index()] == x)
    }

    pub fn render(&self, model: &CausalModel) -> String {
        self.iter().map(|(v, x)| model.event_string(v, x)).collect::<Vec<_>>().join(" & ")
    }
}

/// An AC2 certificate. `w_vals`, `x_prime` and `z_star` are aligned with
/// `w_set`, the cause's variables and `z_set` respectively.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub w_set: Vec<VarId>,
    pub z_set: Vec<VarId>,
    pub w_vals: Vec<usize>,
    pub x_prime: Vec<usize>,
    pub z_star: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ac2bVariant {
    /// AC2(b) for every `W' ⊆ W` and `Z' ⊆ Z`.
    Updated,
    /// AC2(b) for `W' = W` only, every `Z' ⊆ Z`.
    Original,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Cause(Witness),
    FailsAc1,
    FailsAc2,
    FailsAc3 { smaller: CauseConjunct, witness: Witness },
}

impl Verdict {
    pub fn is_cause(&self) -> bool {
        matches!(self, Verdict::Cause(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Cause(_) => "cause",
            Verdict::FailsAc1 => "fails_ac1",
            Verdict::FailsAc2 => "fails_ac2",
            Verdict::FailsAc3 { .. } => "fails_ac3",
        }
    }
}

/// Extra admissibility test on a candidate witness (the normality gate).
pub type Gate<'g> = dyn Fn(&CauseConjunct, &Witness) -> Result<bool> + 'g;

fn ranges(model: &CausalModel, vars: &[VarId]) -> Vec<usize> {
    vars.iter().map(|v| model.var(*v).range.len()).collect()
}

fn check_cause(model: &CausalModel, cause: &CauseConjunct, effect: &Formula) -> Result<()> {
    EventSet::from_events(model, cause.iter())?;
    effect.check(model)
}

/// AC1: the cause and the effect both hold in `(M, u)`.
pub fn check_ac1(ev: &Evaluator, context: &Context, cause: &CauseConjunct, effect: &Formula) -> Result<bool> {
    check_cause(ev.model(), cause, effect)?;
    let actual = ev.solve(context, &vec![None; ev.model().var_count()])?;
    Ok(cause.holds_at(&actual) && ev.eval(context, effect)?)
}

/// AC2(a) and AC2(b) for the given witness.
pub fn check_ac2(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &Witness,
    variant: Ac2bVariant,
) -> Result<bool> {
    check_cause(ev.model(), cause, effect)?;
    check_witness_shape(ev, context, cause, witness)?;
    Ok(ac2a(ev, context, cause, effect, witness)? && ac2b(ev, context, cause, effect, witness, variant)?)
}

fn check_witness_shape(ev: &Evaluator, context: &Context, cause: &CauseConjunct, witness: &Witness) -> Result<()> {
    let model = ev.model();
    let bad = |msg: &str| Err(Error::Precondition(format!("witness {msg}")));
    let w: BTreeSet<VarId> = witness.w_set.iter().copied().collect();
    let z: BTreeSet<VarId> = witness.z_set.iter().copied().collect();
    let endo: BTreeSet<VarId> = model.endogenous().iter().copied().collect();
    if w.len() != witness.w_set.len() || z.len() != witness.z_set.len() {
        return bad("repeats a variable");
    }
    if !w.is_disjoint(&z) || w.union(&z).copied().collect::<BTreeSet<_>>() != endo {
        return bad("does not partition the endogenous variables");
    }
    if !cause.vars().iter().all(|x| z.contains(x)) {
        return bad("puts a cause variable in W");
    }
    if witness.w_vals.len() != witness.w_set.len()
        || witness.x_prime.len() != cause.len()
        || witness.z_star.len() != witness.z_set.len()
    {
        return bad("has settings of the wrong length");
    }
    let in_range = |vars: &[VarId], vals: &[usize]| vars.iter().zip(vals).all(|(v, x)| *x < model.var(*v).range.len());
    if !in_range(&witness.w_set, &witness.w_vals) || !in_range(&cause.vars(), &witness.x_prime) {
        return bad("has a value outside a range");
    }
    let actual = ev.solve(context, &vec![None; model.var_count()])?;
    if witness.z_set.iter().zip(&witness.z_star).any(|(v, x)| actual[v.index()] != *x) {
        return bad("z_star differs from the actual world");
    }
    Ok(())
}

fn ac2a(ev: &Evaluator, context: &Context, cause: &CauseConjunct, effect: &Formula, witness: &Witness) -> Result<bool> {
    let mut o = vec![None; ev.model().var_count()];
    for (v, x) in cause.vars().iter().zip(&witness.x_prime) {
        o[v.index()] = Some(*x);
    }
    for (v, x) in witness.w_set.iter().zip(&witness.w_vals) {
        o[v.index()] = Some(*x);
    }
    Ok(!ev.eval_dense(context, &o, effect)?)
}

fn ac2b(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &Witness,
    variant: Ac2bVariant,
) -> Result<bool> {
    let n = ev.model().var_count();
    let z_rest: Vec<(VarId, usize)> = witness
        .z_set
        .iter()
        .zip(&witness.z_star)
        .filter(|(v, _)| cause.get(**v).is_none())
        .map(|(v, x)| (*v, *x))
        .collect();
    let w_pairs: Vec<(VarId, usize)> = witness.w_set.iter().copied().zip(witness.w_vals.iter().copied()).collect();
    let w_masks: Vec<u64> = match variant {
        Ac2bVariant::Updated => (0..1u64 << w_pairs.len()).rev().collect(),
        Ac2bVariant::Original => vec![(1u64 << w_pairs.len()) - 1],
    };
    for wm in w_masks {
        for zm in 0..1u64 << z_rest.len() {
            let mut o = vec![None; n];
            for (v, x) in cause.iter() {
                o[v.index()] = Some(x);
            }
            for (i, (v, x)) in w_pairs.iter().enumerate() {
                if wm >> i & 1 == 1 {
                    o[v.index()] = Some(*x);
                }
            }
            for (i, (v, x)) in z_rest.iter().enumerate() {
                if zm >> i & 1 == 1 {
                    o[v.index()] = Some(*x);
                }
            }
            if !ev.eval_dense(context, &o, effect)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The first witness in search order: `W` by size then declaration order,
/// then `x'` and `w` lexicographically. `None` when AC1 fails.
pub fn find_witness(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    variant: Ac2bVariant,
) -> Result<Option<Witness>> {
    find_witness_gated(ev, context, cause, effect, variant, None)
}

pub fn find_witness_gated(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    variant: Ac2bVariant,
    gate: Option<&Gate>,
) -> Result<Option<Witness>> {
    let model = ev.model();
    ev.limits().check_vars("endogenous variables in witness search", model.endogenous().len())?;
    if !check_ac1(ev, context, cause, effect)? {
        return Ok(None);
    }
    let actual = ev.solve(context, &vec![None; model.var_count()])?;
    let xs = cause.vars();
    let x_actual = cause.values();
    let others: Vec<VarId> = model.endogenous().iter().copied().filter(|v| cause.get(*v).is_none()).collect();
    for w_set in subsets_by_size(&others) {
        let z_set: Vec<VarId> = model.endogenous().iter().copied().filter(|v| !w_set.contains(v)).collect();
        let z_star: Vec<usize> = z_set.iter().map(|v| actual[v.index()]).collect();
        // AC2(b) does not depend on x', so remember it per setting of W.
        let mut ac2b_memo: HashMap<Vec<usize>, bool> = HashMap::new();
        for x_prime in Assignments::new(ranges(model, &xs)) {
            if x_prime == x_actual {
                continue;
            }
            for w_vals in Assignments::new(ranges(model, &w_set)) {
                let witness = Witness {
                    w_set: w_set.clone(),
                    z_set: z_set.clone(),
                    w_vals,
                    x_prime: x_prime.clone(),
                    z_star: z_star.clone(),
                };
                if let Some(gate) = gate {
                    if !gate(cause, &witness)? {
                        continue;
                    }
                }
                if !ac2a(ev, context, cause, effect, &witness)? {
                    continue;
                }
                let passes = match ac2b_memo.get(&witness.w_vals) {
                    Some(b) => *b,
                    None => {
                        let b = ac2b(ev, context, cause, effect, &witness, variant)?;
                        ac2b_memo.insert(witness.w_vals.clone(), b);
                        b
                    }
                };
                if passes {
                    return Ok(Some(witness));
                }
            }
        }
    }
    Ok(None)
}

/// AC1, AC2 and AC3.
pub fn is_actual_cause(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    variant: Ac2bVariant,
) -> Result<Verdict> {
    is_actual_cause_gated(ev, context, cause, effect, variant, None)
}

pub fn is_actual_cause_gated(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    variant: Ac2bVariant,
    gate: Option<&Gate>,
) -> Result<Verdict> {
    ev.limits().check_conjuncts(cause.len())?;
    if !check_ac1(ev, context, cause, effect)? {
        return Ok(Verdict::FailsAc1);
    }
    let Some(witness) = find_witness_gated(ev, context, cause, effect, variant, gate)? else {
        return Ok(Verdict::FailsAc2);
    };
    for sub in proper_subsets(&cause.vars()) {
        let smaller = cause.restrict(&sub);
        if let Some(w) = find_witness_gated(ev, context, &smaller, effect, variant, gate)? {
            return Ok(Verdict::FailsAc3 { smaller, witness: w });
        }
    }
    Ok(Verdict::Cause(witness))
}

/// AC1 and AC2 under the given witness, without minimality.
pub fn is_weak_cause(
    ev: &Evaluator,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    witness: &Witness,
    variant: Ac2bVariant,
) -> Result<bool> {
    Ok(check_ac1(ev, context, cause, effect)? && check_ac2(ev, context, cause, effect, witness, variant)?)
}

/// Variables a cause may range over for `effect`: endogenous variables the
/// effect does not mention, in declaration order.
pub fn cause_candidates(model: &CausalModel, effect: &Formula) -> Vec<VarId> {
    let mentioned = effect.mentions();
    model.endogenous().iter().copied().filter(|v| !mentioned.contains(v)).collect()
}

/// Every minimal cause of `effect` up to the conjunction cap, smallest
/// first, each with its first witness.
pub fn enumerate_causes(
    ev: &Evaluator,
    context: &Context,
    effect: &Formula,
    variant: Ac2bVariant,
) -> Result<Vec<(CauseConjunct, Witness)>> {
    enumerate_causes_gated(ev, context, effect, variant, None)
}

pub fn enumerate_causes_gated(
    ev: &Evaluator,
    context: &Context,
    effect: &Formula,
    variant: Ac2bVariant,
    gate: Option<&Gate>,
) -> Result<Vec<(CauseConjunct, Witness)>> {
    let model = ev.model();
    effect.check(model)?;
    ev.limits().check_vars("endogenous variables in witness search", model.endogenous().len())?;
    let mut found: Vec<(CauseConjunct, Witness)> = Vec::new();
    if !ev.eval(context, effect)? {
        return Ok(found);
    }
    let actual = ev.solve(context, &vec![None; model.var_count()])?;
    let candidates = cause_candidates(model, effect);
    let max = ev.limits().max_conjuncts.min(candidates.len());
    for k in 1..=max {
        for vars in itertools::Itertools::combinations(candidates.iter().copied(), k) {
            let cause = CauseConjunct::from_map(vars.iter().map(|v| (*v, actual[v.index()])).collect());
            // A superset of a cause has a weak sub-cause and so fails AC3.
            if found.iter().any(|(c, _)| c.iter().all(|(v, _)| vars.contains(&v))) {
                continue;
            }
            if let Some(w) = find_witness_gated(ev, context, &cause, effect, variant, gate)? {
                found.push((cause, w));
            }
        }
    }
    Ok(found)
}

/// Endogenous ancestors of `var` through the structural equations.
pub fn ancestors(model: &CausalModel, var: VarId) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![var];
    while let Some(v) = stack.pop() {
        if let Some(body) = model.equation(v) {
            for r in body.reads() {
                if model.is_endogenous(r) && out.insert(r) {
                    stack.push(r);
                }
            }
        }
    }
    out
}

/// Whether each cause variable keeps its actual value under every
/// intervention on the other endogenous variables.
pub fn check_independence_hypothesis(ev: &Evaluator, context: &Context, cause: &CauseConjunct) -> Result<bool> {
    let model = ev.model();
    EventSet::from_events(model, cause.iter())?;
    ev.limits().check_vars("endogenous variables in independence check", model.endogenous().len())?;
    let n = model.var_count();
    let actual = ev.solve(context, &vec![None; n])?;
    let others: Vec<VarId> = model.endogenous().iter().copied().filter(|v| cause.get(*v).is_none()).collect();
    for x in cause.vars() {
        let anc = ancestors(model, x);
        if others.iter().all(|o| !anc.contains(o)) {
            continue;
        }
        for ys in subsets_by_size(&others).skip(1) {
            for y_vals in Assignments::new(ranges(model, &ys)) {
                let mut o = vec![None; n];
                for (v, val) in ys.iter().zip(&y_vals) {
                    o[v.index()] = Some(*val);
                }
                if ev.solve(context, &o)?[x.index()] != actual[x.index()] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
