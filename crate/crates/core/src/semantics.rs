//! Causal formulas and their evaluation under stacked interventions.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::model::{CausalModel, Context, Intervention, VarId};
use crate::search::SearchLimits;

/// Boolean combinations of primitive events `X=x`, optionally under an
/// intervention prefix `[Y<-y] f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Event(VarId, usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Intervened(Intervention, Box<Formula>),
}

impl Formula {
    pub fn event(var: VarId, value: usize) -> Formula {
        Formula::Event(var, value)
    }

    pub fn negation(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn intervened(iv: Intervention, body: Formula) -> Formula {
        Formula::Intervened(iv, Box::new(body))
    }

    /// Left-nested conjunction; `True` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    pub fn is_intervention_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Event(..) => true,
            Formula::Not(f) => f.is_intervention_free(),
            Formula::And(a, b) | Formula::Or(a, b) => a.is_intervention_free() && b.is_intervention_free(),
            Formula::Intervened(..) => false,
        }
    }

    /// Variables appearing in events (not in intervention prefixes).
    pub fn mentions(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_mentions(&mut out);
        out
    }

    fn collect_mentions(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Event(v, _) => {
                out.insert(*v);
            }
            Formula::Not(f) => f.collect_mentions(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_mentions(out);
                b.collect_mentions(out);
            }
            Formula::Intervened(_, f) => f.collect_mentions(out),
        }
    }

    /// Checks every event and intervention against the model's signature.
    pub fn check(&self, model: &CausalModel) -> Result<()> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Event(v, x) => check_event(model, *v, *x),
            Formula::Not(f) => f.check(model),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.check(model)?;
                b.check(model)
            }
            Formula::Intervened(iv, f) => {
                model.check_intervention(iv)?;
                f.check(model)
            }
        }
    }

    /// Truth at a total valuation. Intervention prefixes need a model, so
    /// they are only accepted through [`Evaluator`].
    pub fn holds_at(&self, values: &[usize]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Event(v, x) => values[v.index()] == *x,
            Formula::Not(f) => !f.holds_at(values),
            Formula::And(a, b) => a.holds_at(values) && b.holds_at(values),
            Formula::Or(a, b) => a.holds_at(values) || b.holds_at(values),
            Formula::Intervened(..) => panic!("holds_at on a formula with an intervention prefix"),
        }
    }
}

fn check_event(model: &CausalModel, var: VarId, value: usize) -> Result<()> {
    let decl = model
        .variables()
        .get(var.index())
        .ok_or_else(|| Error::UnknownVariable(format!("#{}", var.index())))?;
    if !model.is_endogenous(var) {
        return Err(Error::NotEndogenous(decl.name.clone()));
    }
    if value >= decl.range.len() {
        return Err(Error::UnknownValue {
            variable: decl.name.clone(),
            value: format!("#{value}"),
        });
    }
    Ok(())
}

/// A consistent set of primitive events: at most one value per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventSet {
    events: BTreeMap<VarId, usize>,
}

impl EventSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set, rejecting `X=x` together with `X=x'`.
    pub fn from_events(model: &CausalModel, events: impl IntoIterator<Item = (VarId, usize)>) -> Result<Self> {
        let mut out = EventSet::new();
        for (v, x) in events {
            out.insert(model, v, x)?;
        }
        Ok(out)
    }

    pub fn insert(&mut self, model: &CausalModel, var: VarId, value: usize) -> Result<()> {
        check_event(model, var, value)?;
        match self.events.get(&var) {
            Some(&old) if old != value => Err(Error::Inconsistent {
                variable: model.var(var).name.clone(),
                first: model.value_name(var, old).to_string(),
                second: model.value_name(var, value).to_string(),
            }),
            _ => {
                self.events.insert(var, value);
                Ok(())
            }
        }
    }

    /// Union of two sets known to agree wherever they overlap.
    pub(crate) fn union_unchecked(&self, other: &EventSet) -> EventSet {
        let mut events = self.events.clone();
        events.extend(other.events.iter().map(|(k, v)| (*k, *v)));
        EventSet { events }
    }

    pub(crate) fn from_map(events: BTreeMap<VarId, usize>) -> EventSet {
        EventSet { events }
    }

    pub fn without(&self, vars: &BTreeSet<VarId>) -> EventSet {
        EventSet {
            events: self
                .events
                .iter()
                .filter(|(k, _)| !vars.contains(k))
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    pub fn get(&self, var: VarId) -> Option<usize> {
        self.events.get(&var).copied()
    }

    pub fn contains_var(&self, var: VarId) -> bool {
        self.events.contains_key(&var)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.events.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.events.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_intervention(&self) -> Intervention {
        Intervention::from_pairs(self.iter())
    }

    /// The events as a conjunction.
    pub fn to_formula(&self) -> Formula {
        Formula::conjunction(self.iter().map(|(v, x)| Formula::Event(v, x)))
    }

    pub fn holds_at(&self, values: &[usize]) -> bool {
        self.iter().all(|(v, x)| values[v.index()] == x)
    }

    pub fn render(&self, model: &CausalModel) -> String {
        let parts: Vec<String> = self.iter().map(|(v, x)| model.event_string(v, x)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

const CACHE_LIMIT: usize = 1 << 18;

type CacheKey = (Vec<usize>, Vec<Option<usize>>);

/// Evaluates formulas against one model, memoising solved worlds per
/// (context, intervention) and charging every fresh solve to a step budget.
#[derive(Debug)]
pub struct Evaluator<'m> {
    model: &'m CausalModel,
    limits: SearchLimits,
    cache: RefCell<HashMap<CacheKey, Rc<[usize]>>>,
    steps: Cell<u64>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m CausalModel) -> Self {
        Self::with_limits(model, SearchLimits::default())
    }

    pub fn with_limits(model: &'m CausalModel, limits: SearchLimits) -> Self {
        Evaluator {
            model,
            limits,
            cache: RefCell::new(HashMap::new()),
            steps: Cell::new(0),
        }
    }

    pub fn model(&self) -> &'m CausalModel {
        self.model
    }

    pub fn limits(&self) -> &SearchLimits {
        &self.limits
    }

    /// Fresh solves performed so far.
    pub fn steps(&self) -> u64 {
        self.steps.get()
    }

    /// Dense override vector for an intervention.
    pub fn overrides(&self, iv: &Intervention) -> Vec<Option<usize>> {
        let mut out = vec![None; self.model.var_count()];
        for (v, x) in iv.iter() {
            out[v.index()] = Some(x);
        }
        out
    }

    /// Solution of `M_{overrides}` in `context`.
    pub fn solve(&self, context: &Context, overrides: &[Option<usize>]) -> Result<Rc<[usize]>> {
        let key = (context.values().to_vec(), overrides.to_vec());
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let spent = self.steps.get() + 1;
        if spent > self.limits.max_steps {
            return Err(Error::SearchCap {
                what: "model solves".to_string(),
                limit: self.limits.max_steps,
                requested: spent,
            });
        }
        self.steps.set(spent);
        let mut values = vec![0usize; self.model.var_count()];
        self.model.solve_into(context, overrides, &mut values)?;
        let values: Rc<[usize]> = values.into();
        let mut cache = self.cache.borrow_mut();
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, values.clone());
        Ok(values)
    }

    pub fn eval(&self, context: &Context, f: &Formula) -> Result<bool> {
        self.eval_dense(context, &vec![None; self.model.var_count()], f)
    }

    /// `(M, u) |= [iv] f`.
    pub fn eval_under(&self, context: &Context, iv: &Intervention, f: &Formula) -> Result<bool> {
        self.eval_dense(context, &self.overrides(iv), f)
    }

    /// Evaluates `f` in the submodel fixed by `overrides`. Nested prefixes
    /// are applied on top, inner settings winning.
    pub fn eval_dense(&self, context: &Context, overrides: &[Option<usize>], f: &Formula) -> Result<bool> {
        if f.is_intervention_free() {
            if matches!(f, Formula::True) {
                return Ok(true);
            }
            if matches!(f, Formula::False) {
                return Ok(false);
            }
            let world = self.solve(context, overrides)?;
            return Ok(f.holds_at(&world));
        }
        match f {
            Formula::Not(g) => Ok(!self.eval_dense(context, overrides, g)?),
            Formula::And(a, b) => Ok(self.eval_dense(context, overrides, a)? && self.eval_dense(context, overrides, b)?),
            Formula::Or(a, b) => Ok(self.eval_dense(context, overrides, a)? || self.eval_dense(context, overrides, b)?),
            Formula::Intervened(iv, body) => {
                let mut inner = overrides.to_vec();
                for (v, x) in iv.iter() {
                    inner[v.index()] = Some(x);
                }
                self.eval_dense(context, &inner, body)
            }
            Formula::True | Formula::False | Formula::Event(..) => unreachable!("intervention-free case handled above"),
        }
    }
}

/// `(M, u) |= f`.
pub fn eval(model: &CausalModel, context: &Context, f: &Formula) -> Result<bool> {
    f.check(model)?;
    Evaluator::new(model).eval(context, f)
}

/// `M |= f`: `f` holds in every context.
pub fn holds_everywhere(model: &CausalModel, f: &Formula) -> Result<bool> {
    f.check(model)?;
    let ev = Evaluator::new(model);
    for ctx in model.enumerate_contexts() {
        if !ev.eval(&ctx, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(M, u) |= [S] f`.
pub fn apply_event_set(model: &CausalModel, context: &Context, s: &EventSet, f: &Formula) -> Result<bool> {
    f.check(model)?;
    Evaluator::new(model).eval_under(context, &s.to_intervention(), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::model::{ModelDef, StructuralEquation, VarKind, VariableDecl};

    fn forest_fire() -> CausalModel {
        let bin = |n: &str, k| VariableDecl::new(n, &["0", "1"], k);
        ModelDef {
            name: "ForestFire".into(),
            variables: vec![
                bin("U1", VarKind::Exogenous),
                bin("U2", VarKind::Exogenous),
                bin("L", VarKind::Endogenous),
                bin("M", VarKind::Endogenous),
                bin("FF", VarKind::Endogenous),
            ],
            equations: vec![
                StructuralEquation { target: VarId(2), body: Expr::Var(VarId(0)) },
                StructuralEquation { target: VarId(3), body: Expr::Var(VarId(1)) },
                StructuralEquation {
                    target: VarId(4),
                    body: Expr::Max(vec![Expr::Var(VarId(2)), Expr::Var(VarId(3))]),
                },
            ],
        }
        .build()
        .unwrap()
    }

    const L: VarId = VarId(2);
    const M: VarId = VarId(3);
    const FF: VarId = VarId(4);

    #[test]
    fn interventions_in_the_forest() {
        let m = forest_fire();
        let u = m.context(&[("U1", "1"), ("U2", "1")]).unwrap();
        let no_arson = Formula::intervened(Intervention::new().with(M, 0), Formula::event(FF, 1));
        assert!(eval(&m, &u, &no_arson).unwrap());
        let neither = Formula::intervened(Intervention::new().with(L, 0).with(M, 0), Formula::event(FF, 0));
        assert!(eval(&m, &u, &neither).unwrap());
        let f = Formula::event(L, 1);
        assert!(!eval(&m, &u, &Formula::and(f.clone(), Formula::negation(f))).unwrap());
    }

    #[test]
    fn validity_over_all_contexts() {
        let m = forest_fire();
        let lit = Formula::intervened(Intervention::new().with(L, 1), Formula::event(FF, 1));
        assert!(holds_everywhere(&m, &lit).unwrap());
        assert!(!holds_everywhere(&m, &Formula::event(FF, 1)).unwrap());
        let f = Formula::event(M, 0);
        assert!(holds_everywhere(&m, &Formula::or(f.clone(), Formula::negation(f))).unwrap());
    }

    #[test]
    fn event_sets_reject_conflicts() {
        let m = forest_fire();
        let err = EventSet::from_events(&m, [(L, 1), (L, 0)]).unwrap_err();
        assert!(matches!(err, Error::Inconsistent { .. }));
        let u = m.context(&[("U1", "0"), ("U2", "0")]).unwrap();
        let s = EventSet::new();
        assert_eq!(
            apply_event_set(&m, &u, &s, &Formula::event(FF, 0)).unwrap(),
            eval(&m, &u, &Formula::event(FF, 0)).unwrap()
        );
    }

    #[test]
    fn exogenous_events_are_rejected() {
        let m = forest_fire();
        let u = m.context(&[("U1", "0"), ("U2", "0")]).unwrap();
        assert_eq!(
            eval(&m, &u, &Formula::event(VarId(0), 1)).unwrap_err(),
            Error::NotEndogenous("U1".into())
        );
    }

    #[test]
    fn budget_is_enforced() {
        let m = forest_fire();
        let limits = SearchLimits { max_steps: 2, ..SearchLimits::default() };
        let ev = Evaluator::with_limits(&m, limits);
        let mut err = None;
        for ctx in m.enumerate_contexts() {
            if let Err(e) = ev.eval(&ctx, &Formula::event(FF, 1)) {
                err = Some(e);
                break;
            }
        }
        assert!(err.unwrap().is_resource());
    }
}
