//! Finite acyclic structural causal models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::search::Assignments;

/// Position of a variable in its model's signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Exogenous,
    Endogenous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    /// Ordered value symbols; arithmetic sees each value's position here.
    pub range: Vec<String>,
    pub kind: VarKind,
}

impl VariableDecl {
    pub fn new(name: impl Into<String>, range: &[&str], kind: VarKind) -> Self {
        VariableDecl {
            name: name.into(),
            range: range.iter().map(|s| s.to_string()).collect(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralEquation {
    pub target: VarId,
    pub body: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    EmptyRange,
    DuplicateVariable,
    DuplicateValue,
    MissingEquation,
    DuplicateEquation,
    EquationForExogenous,
    UnknownReference,
    SelfReference,
    Cycle,
    NonTotalBody,
}

/// One violated model invariant, naming the offending variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub variable: String,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at `{}`: {}", self.kind, self.variable, self.detail)
    }
}

/// Parent valuations beyond this many are not checked for totality.
const TOTALITY_CHECK_LIMIT: u64 = 1 << 16;

/// An unchecked model as written; [`ModelDef::build`] validates it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDef {
    pub name: String,
    pub variables: Vec<VariableDecl>,
    pub equations: Vec<StructuralEquation>,
}

impl ModelDef {
    /// Returns every violated invariant; empty iff the model is well formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let diag = |kind, variable: &str, detail: String| Diagnostic {
            kind,
            variable: variable.to_string(),
            detail,
        };

        let mut seen = BTreeSet::new();
        for decl in &self.variables {
            if !seen.insert(decl.name.as_str()) {
                out.push(diag(DiagnosticKind::DuplicateVariable, &decl.name, "declared twice".into()));
            }
            if decl.range.is_empty() {
                out.push(diag(DiagnosticKind::EmptyRange, &decl.name, "range has no values".into()));
            }
            let mut values = BTreeSet::new();
            for value in &decl.range {
                if !values.insert(value.as_str()) {
                    out.push(diag(
                        DiagnosticKind::DuplicateValue,
                        &decl.name,
                        format!("value `{value}` listed twice"),
                    ));
                }
            }
        }

        let n = self.variables.len();
        let name_of = |id: VarId| {
            self.variables
                .get(id.index())
                .map(|d| d.name.clone())
                .unwrap_or_else(|| format!("#{}", id.index()))
        };
        let mut eq_of: Vec<Option<usize>> = vec![None; n];
        for (i, eq) in self.equations.iter().enumerate() {
            let Some(decl) = self.variables.get(eq.target.index()) else {
                out.push(diag(
                    DiagnosticKind::UnknownReference,
                    &name_of(eq.target),
                    "equation target is not declared".into(),
                ));
                continue;
            };
            if decl.kind == VarKind::Exogenous {
                out.push(diag(
                    DiagnosticKind::EquationForExogenous,
                    &decl.name,
                    "exogenous variables are set by the context".into(),
                ));
                continue;
            }
            if eq_of[eq.target.index()].is_some() {
                out.push(diag(DiagnosticKind::DuplicateEquation, &decl.name, "more than one equation".into()));
                continue;
            }
            eq_of[eq.target.index()] = Some(i);
            for read in eq.body.reads() {
                if read.index() >= n {
                    out.push(diag(
                        DiagnosticKind::UnknownReference,
                        &decl.name,
                        format!("body reads undeclared variable #{}", read.index()),
                    ));
                } else if read == eq.target {
                    out.push(diag(DiagnosticKind::SelfReference, &decl.name, "body reads its own target".into()));
                }
            }
        }
        for (i, decl) in self.variables.iter().enumerate() {
            if decl.kind == VarKind::Endogenous && eq_of[i].is_none() {
                out.push(diag(DiagnosticKind::MissingEquation, &decl.name, "endogenous variable has no equation".into()));
            }
        }
        if !out.is_empty() {
            return out;
        }

        let deps: Vec<BTreeSet<VarId>> = (0..n)
            .map(|i| match eq_of[i] {
                Some(e) => self.equations[e]
                    .body
                    .reads()
                    .into_iter()
                    .filter(|r| self.variables[r.index()].kind == VarKind::Endogenous)
                    .collect(),
                None => BTreeSet::new(),
            })
            .collect();
        if let Err(cycle) = topo_sort(&self.endogenous_ids(), &deps) {
            let names: Vec<String> = cycle.iter().map(|v| self.variables[v.index()].name.clone()).collect();
            out.push(diag(
                DiagnosticKind::Cycle,
                &names[0],
                format!("dependency cycle through {}", names.join(" -> ")),
            ));
            return out;
        }

        for eq in &self.equations {
            let target = &self.variables[eq.target.index()];
            let parents: Vec<VarId> = eq.body.reads().into_iter().collect();
            let radices: Vec<usize> = parents.iter().map(|p| self.variables[p.index()].range.len()).collect();
            if Assignments::count(&radices) > TOTALITY_CHECK_LIMIT {
                continue;
            }
            let mut values = vec![0usize; n];
            for combo in Assignments::new(radices) {
                for (p, v) in parents.iter().zip(&combo) {
                    values[p.index()] = *v;
                }
                let produced = eq.body.eval(&values);
                if produced < 0 || produced as usize >= target.range.len() {
                    let at: Vec<String> = parents
                        .iter()
                        .zip(&combo)
                        .map(|(p, v)| format!("{}={}", self.variables[p.index()].name, self.variables[p.index()].range[*v]))
                        .collect();
                    out.push(diag(
                        DiagnosticKind::NonTotalBody,
                        &target.name,
                        format!("produces {produced} at {{{}}}", at.join(", ")),
                    ));
                    break;
                }
            }
        }
        out
    }

    fn endogenous_ids(&self) -> Vec<VarId> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == VarKind::Endogenous)
            .map(|(i, _)| VarId(i))
            .collect()
    }

    pub fn build(self) -> Result<CausalModel> {
        let diagnostics = self.validate();
        if !diagnostics.is_empty() {
            return Err(Error::InvalidModel {
                model: self.name,
                diagnostics,
            });
        }
        let n = self.variables.len();
        let mut equations = vec![None; n];
        for eq in self.equations {
            equations[eq.target.index()] = Some(eq.body);
        }
        let mut model = CausalModel {
            name: self.name,
            variables: self.variables,
            equations,
            fixed: vec![None; n],
            exogenous: Vec::new(),
            endogenous: Vec::new(),
            order: Vec::new(),
        };
        model.refresh();
        Ok(model)
    }
}

/// Kahn's algorithm, always releasing the earliest-declared ready variable.
/// On failure returns the variables left on some cycle.
fn topo_sort(nodes: &[VarId], deps: &[BTreeSet<VarId>]) -> std::result::Result<Vec<VarId>, Vec<VarId>> {
    let members: BTreeSet<VarId> = nodes.iter().copied().collect();
    let mut placed = BTreeSet::new();
    let mut order = Vec::with_capacity(nodes.len());
    while order.len() < nodes.len() {
        let ready = nodes.iter().copied().find(|v| {
            !placed.contains(v)
                && deps[v.index()]
                    .iter()
                    .all(|d| placed.contains(d) || !members.contains(d))
        });
        match ready {
            Some(v) => {
                placed.insert(v);
                order.push(v);
            }
            None => {
                let rest: Vec<VarId> = nodes.iter().copied().filter(|v| !placed.contains(v)).collect();
                return Err(find_cycle(&rest, deps));
            }
        }
    }
    Ok(order)
}

fn find_cycle(rest: &[VarId], deps: &[BTreeSet<VarId>]) -> Vec<VarId> {
    let pending: BTreeSet<VarId> = rest.iter().copied().collect();
    // Every pending node has a pending dependency, so walking them must revisit one.
    let mut path = vec![rest[0]];
    loop {
        let last = *path.last().expect("non-empty path");
        let next = deps[last.index()]
            .iter()
            .copied()
            .find(|d| pending.contains(d))
            .expect("pending node with no pending dependency");
        if let Some(pos) = path.iter().position(|&p| p == next) {
            let mut cycle = path.split_off(pos);
            cycle.reverse();
            return cycle;
        }
        path.push(next);
    }
}

/// A validated model, possibly a submodel produced by [`CausalModel::intervene`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalModel {
    name: String,
    variables: Vec<VariableDecl>,
    equations: Vec<Option<Expr>>,
    /// Values pinned by interventions; those variables have no equation.
    fixed: Vec<Option<usize>>,
    exogenous: Vec<VarId>,
    endogenous: Vec<VarId>,
    order: Vec<VarId>,
}

impl CausalModel {
    fn refresh(&mut self) {
        self.exogenous = (0..self.variables.len())
            .filter(|&i| self.variables[i].kind == VarKind::Exogenous)
            .map(VarId)
            .collect();
        self.endogenous = (0..self.variables.len())
            .filter(|&i| self.variables[i].kind == VarKind::Endogenous && self.fixed[i].is_none())
            .map(VarId)
            .collect();
        let deps: Vec<BTreeSet<VarId>> = self
            .equations
            .iter()
            .map(|e| e.as_ref().map(|b| b.reads()).unwrap_or_default())
            .collect();
        self.order = topo_sort(&self.endogenous, &deps).expect("validated models are acyclic");
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variables(&self) -> &[VariableDecl] {
        &self.variables
    }

    pub fn var(&self, id: VarId) -> &VariableDecl {
        &self.variables[id.index()]
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn exogenous(&self) -> &[VarId] {
        &self.exogenous
    }

    /// Endogenous variables of this (sub)model, in declaration order.
    /// Variables pinned by an intervention are excluded.
    pub fn endogenous(&self) -> &[VarId] {
        &self.endogenous
    }

    pub fn equation(&self, id: VarId) -> Option<&Expr> {
        self.equations[id.index()].as_ref()
    }

    pub fn fixed_value(&self, id: VarId) -> Option<usize> {
        self.fixed[id.index()]
    }

    pub fn is_endogenous(&self, id: VarId) -> bool {
        self.variables[id.index()].kind == VarKind::Endogenous
    }

    pub fn lookup(&self, name: &str) -> Result<VarId> {
        self.variables
            .iter()
            .position(|d| d.name == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn value_index(&self, var: VarId, value: &str) -> Result<usize> {
        let decl = self.var(var);
        decl.range
            .iter()
            .position(|v| v == value)
            .ok_or_else(|| Error::UnknownValue {
                variable: decl.name.clone(),
                value: value.to_string(),
            })
    }

    pub fn value_name(&self, var: VarId, value: usize) -> &str {
        &self.var(var).range[value]
    }

    /// Renders `X=x` with the model's symbols.
    pub fn event_string(&self, var: VarId, value: usize) -> String {
        format!("{}={}", self.var(var).name, self.value_name(var, value))
    }

    /// Endogenous variables ordered so each follows everything its equation
    /// reads; ties go to declaration order.
    pub fn topological_order(&self) -> &[VarId] {
        &self.order
    }

    pub fn context(&self, assignments: &[(&str, &str)]) -> Result<Context> {
        let mut values = vec![None; self.exogenous.len()];
        for (name, value) in assignments {
            let id = self.lookup(name)?;
            let pos = self
                .exogenous
                .iter()
                .position(|&e| e == id)
                .ok_or_else(|| Error::UnexpectedContextValue(name.to_string()))?;
            values[pos] = Some(self.value_index(id, value)?);
        }
        let values = values
            .into_iter()
            .zip(&self.exogenous)
            .map(|(v, id)| v.ok_or_else(|| Error::MissingContextValue(self.var(*id).name.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Context { values })
    }

    /// Builds a context from value indices in exogenous declaration order.
    pub fn context_from_indices(&self, values: &[usize]) -> Result<Context> {
        if values.len() != self.exogenous.len() {
            let missing = self
                .exogenous
                .get(values.len())
                .map(|id| self.var(*id).name.clone())
                .unwrap_or_default();
            return Err(if values.len() < self.exogenous.len() {
                Error::MissingContextValue(missing)
            } else {
                Error::Usage(format!(
                    "context has {} values but `{}` has {} exogenous variables",
                    values.len(),
                    self.name,
                    self.exogenous.len()
                ))
            });
        }
        for (id, &v) in self.exogenous.iter().zip(values) {
            if v >= self.var(*id).range.len() {
                return Err(Error::UnknownValue {
                    variable: self.var(*id).name.clone(),
                    value: format!("#{v}"),
                });
            }
        }
        Ok(Context { values: values.to_vec() })
    }

    /// Every context, lexicographic in declaration and range order.
    pub fn enumerate_contexts(&self) -> impl Iterator<Item = Context> + '_ {
        let radices: Vec<usize> = self.exogenous.iter().map(|id| self.var(*id).range.len()).collect();
        Assignments::new(radices).map(|values| Context { values })
    }

    pub fn context_count(&self) -> u64 {
        let radices: Vec<usize> = self.exogenous.iter().map(|id| self.var(*id).range.len()).collect();
        Assignments::count(&radices)
    }

    pub fn check_intervention(&self, iv: &Intervention) -> Result<()> {
        for (&var, &value) in &iv.settings {
            let decl = self
                .variables
                .get(var.index())
                .ok_or_else(|| Error::UnknownVariable(format!("#{}", var.index())))?;
            if decl.kind != VarKind::Endogenous {
                return Err(Error::NotEndogenous(decl.name.clone()));
            }
            if value >= decl.range.len() {
                return Err(Error::UnknownValue {
                    variable: decl.name.clone(),
                    value: format!("#{value}"),
                });
            }
        }
        Ok(())
    }

    /// The unique solution in `context`.
    pub fn solve(&self, context: &Context) -> Result<World> {
        self.solve_with(context, &Intervention::default())
    }

    /// Solution of the submodel `M_{iv}` in `context`, computed without
    /// materialising the submodel. Agrees with `intervene(iv).solve(context)`.
    pub fn solve_with(&self, context: &Context, iv: &Intervention) -> Result<World> {
        let overrides = iv.dense(self.variables.len());
        let mut values = vec![0usize; self.variables.len()];
        self.solve_into(context, &overrides, &mut values)?;
        Ok(World { values })
    }

    /// Solves into `values` with `overrides[i]` pinning variable `i` when set.
    pub(crate) fn solve_into(&self, context: &Context, overrides: &[Option<usize>], values: &mut [usize]) -> Result<()> {
        debug_assert_eq!(context.values.len(), self.exogenous.len());
        for (id, &v) in self.exogenous.iter().zip(&context.values) {
            values[id.index()] = v;
        }
        for (i, f) in self.fixed.iter().enumerate() {
            if let Some(v) = f {
                values[i] = overrides[i].unwrap_or(*v);
            }
        }
        for &id in &self.order {
            let i = id.index();
            if let Some(v) = overrides[i] {
                values[i] = v;
                continue;
            }
            let body = self.equations[i].as_ref().expect("endogenous variable with equation");
            let produced = body.eval(values);
            let len = self.variables[i].range.len();
            if produced < 0 || produced as usize >= len {
                return Err(Error::OutOfRange {
                    variable: self.variables[i].name.clone(),
                    produced,
                    range_len: len,
                });
            }
            values[i] = produced as usize;
        }
        Ok(())
    }

    /// The submodel `M_{iv}`: pinned variables lose their equations. Later
    /// interventions on a pinned variable still reach its children.
    pub fn intervene(&self, iv: &Intervention) -> Result<CausalModel> {
        self.check_intervention(iv)?;
        let mut out = self.clone();
        for (&var, &value) in &iv.settings {
            out.fixed[var.index()] = Some(value);
            out.equations[var.index()] = None;
        }
        out.refresh();
        Ok(out)
    }

    /// Renders a context as `{U1=1, U2=0}`.
    pub fn context_string(&self, context: &Context) -> String {
        let parts: Vec<String> = self
            .exogenous
            .iter()
            .zip(&context.values)
            .map(|(id, v)| self.event_string(*id, *v))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn context_map(&self, context: &Context) -> BTreeMap<String, String> {
        self.exogenous
            .iter()
            .zip(&context.values)
            .map(|(id, v)| (self.var(*id).name.clone(), self.value_name(*id, *v).to_string()))
            .collect()
    }

    /// Endogenous part of a world, keyed by name.
    pub fn world_map(&self, world: &World) -> BTreeMap<String, String> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind == VarKind::Endogenous)
            .map(|(i, d)| (d.name.clone(), d.range[world.values[i]].clone()))
            .collect()
    }
}

/// A total assignment to the exogenous variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    values: Vec<usize>,
}

impl Context {
    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

/// Values of every variable, indexed by [`VarId`]. For a solved world the
/// exogenous slots hold the context; callers compare worlds on the
/// endogenous slots only.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct World {
    pub(crate) values: Vec<usize>,
}

impl World {
    pub fn from_values(values: Vec<usize>) -> Self {
        World { values }
    }

    pub fn get(&self, var: VarId) -> usize {
        self.values[var.index()]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// The restriction of this world to `vars`.
    pub fn restrict(&self, vars: &[VarId]) -> Vec<(VarId, usize)> {
        vars.iter().map(|&v| (v, self.get(v))).collect()
    }
}

/// Settings `X←x` for a set of endogenous variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Intervention {
    settings: BTreeMap<VarId, usize>,
}

impl Intervention {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, usize)>) -> Self {
        Intervention {
            settings: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, var: VarId, value: usize) -> &mut Self {
        self.settings.insert(var, value);
        self
    }

    pub fn with(mut self, var: VarId, value: usize) -> Self {
        self.settings.insert(var, value);
        self
    }

    pub fn get(&self, var: VarId) -> Option<usize> {
        self.settings.get(&var).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.settings.iter().map(|(k, v)| (*k, *v))
    }

    /// Applies `inner` on top of `self`; the inner settings win.
    pub fn compose(&self, inner: &Intervention) -> Intervention {
        let mut settings = self.settings.clone();
        settings.extend(inner.settings.iter().map(|(k, v)| (*k, *v)));
        Intervention { settings }
    }

    pub(crate) fn dense(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (k, v) in &self.settings {
            out[k.index()] = Some(*v);
        }
        out
    }
}
