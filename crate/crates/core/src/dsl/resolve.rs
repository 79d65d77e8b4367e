//! Binds syntax trees to models: names become variable ids, value symbols
//! become range indices.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::{CmpOp, Expr};
use crate::hp::CauseConjunct;
use crate::model::{CausalModel, Context, Intervention, ModelDef, StructuralEquation, VarId, VarKind, VariableDecl};
use crate::normality::{Rank, RankingFunction};
use crate::query::{Definition, Query};
use crate::semantics::Formula;

use super::ast::*;
use super::printer::{print_context_ref, print_formula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedRanking {
    pub model: String,
    pub ranking: RankingFunction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedContext {
    pub name: String,
    pub model: String,
    pub context: Context,
}

/// "If premise then typically conclusion", checked against a ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typicality {
    pub ranking: String,
    pub premise: Formula,
    pub conclusion: Formula,
    pub text: String,
}

/// A parsed and resolved source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub source: SourceFile,
    pub models: Vec<CausalModel>,
    pub rankings: Vec<NamedRanking>,
    pub contexts: Vec<NamedContext>,
    pub typicality: Vec<Typicality>,
    pub queries: Vec<Query>,
}

impl Document {
    pub fn model(&self, name: &str) -> Option<&CausalModel> {
        self.models.iter().find(|m| m.name() == name)
    }

    pub fn ranking(&self, name: &str) -> Option<&NamedRanking> {
        self.rankings.iter().find(|r| r.ranking.name == name)
    }

    pub fn context(&self, name: &str) -> Option<&NamedContext> {
        self.contexts.iter().find(|c| c.name == name)
    }

    pub fn query(&self, name: &str) -> Option<&Query> {
        self.queries.iter().find(|q| q.name == name)
    }

    fn require_model(&self, name: &Ident) -> Result<&CausalModel> {
        self.model(&name.text)
            .ok_or_else(|| at(name.span, format!("unknown model `{name}`")))
    }
}

fn at(span: Span, message: String) -> Error {
    Error::Resolve {
        line: span.line,
        column: span.column,
        message,
    }
}

pub fn resolve(source: SourceFile) -> Result<Document> {
    let mut doc = Document {
        source: SourceFile { items: vec![] },
        models: vec![],
        rankings: vec![],
        contexts: vec![],
        typicality: vec![],
        queries: vec![],
    };
    let mut names: BTreeSet<(u8, String)> = BTreeSet::new();
    let mut claim = |kind: u8, id: &Ident| {
        if names.insert((kind, id.text.clone())) {
            Ok(())
        } else {
            Err(at(id.span, format!("`{id}` is defined twice")))
        }
    };
    for item in &source.items {
        match item {
            Item::Model(m) => {
                claim(0, &m.name)?;
                doc.models.push(resolve_model(m)?);
            }
            Item::Ranking(r) => {
                claim(1, &r.name)?;
                let model = doc.require_model(&r.model)?;
                let mut clauses = Vec::new();
                for (cond, rank) in &r.clauses {
                    let f = resolve_formula(model, cond)?;
                    if !f.is_intervention_free() {
                        return Err(at(r.name.span, format!("ranking `{}` has a clause with an intervention prefix", r.name)));
                    }
                    clauses.push((f, rank_of(*rank)));
                }
                let ranking = RankingFunction {
                    name: r.name.text.clone(),
                    clauses,
                    default: rank_of(r.default),
                };
                doc.rankings.push(NamedRanking {
                    model: r.model.text.clone(),
                    ranking,
                });
            }
            Item::Context(c) => {
                claim(2, &c.name)?;
                let model = doc.require_model(&c.model)?;
                let pairs: Vec<(&str, &str)> = c.settings.iter().map(|(v, x)| (v.text.as_str(), x.text.as_str())).collect();
                let context = model.context(&pairs).map_err(|e| at(c.name.span, e.to_string()))?;
                doc.contexts.push(NamedContext {
                    name: c.name.text.clone(),
                    model: c.model.text.clone(),
                    context,
                });
            }
            Item::Typically(t) => {
                let r = doc
                    .ranking(&t.ranking.text)
                    .ok_or_else(|| at(t.ranking.span, format!("unknown ranking `{}`", t.ranking)))?;
                let model = doc.model(&r.model).expect("ranking model resolved");
                let premise = resolve_formula(model, &t.premise)?;
                let conclusion = resolve_formula(model, &t.conclusion)?;
                if !premise.is_intervention_free() || !conclusion.is_intervention_free() {
                    return Err(at(t.ranking.span, "typicality statements cannot contain interventions".into()));
                }
                doc.typicality.push(Typicality {
                    ranking: t.ranking.text.clone(),
                    premise,
                    conclusion,
                    text: format!("{} -> {}", print_formula(&t.premise), print_formula(&t.conclusion)),
                });
            }
            Item::Query(q) => {
                claim(3, &q.name)?;
                let query = resolve_query(&doc, q)?;
                doc.queries.push(query);
            }
        }
    }
    doc.source = source;
    Ok(doc)
}

fn rank_of(r: RankSyn) -> Rank {
    match r {
        RankSyn::Finite(n) => Rank::Finite(n),
        RankSyn::Infinite => Rank::Infinite,
    }
}

fn resolve_model(m: &ModelSyn) -> Result<CausalModel> {
    let mut variables: Vec<VariableDecl> = Vec::new();
    for stmt in &m.stmts {
        if let ModelStmt::Decl { kind, names, range } = stmt {
            for name in names {
                variables.push(VariableDecl {
                    name: name.text.clone(),
                    range: range.iter().map(|v| v.text.clone()).collect(),
                    kind: match kind {
                        DeclKind::Exogenous => VarKind::Exogenous,
                        DeclKind::Endogenous => VarKind::Endogenous,
                    },
                });
            }
        }
    }
    let scope = Scope { vars: &variables };
    let mut equations = Vec::new();
    for stmt in &m.stmts {
        if let ModelStmt::Equation { target, body } = stmt {
            let id = scope
                .lookup(&target.text)
                .ok_or_else(|| at(target.span, format!("equation for undeclared variable `{target}`")))?;
            let body = scope.expr(body, Some(id))?;
            equations.push(StructuralEquation { target: id, body });
        }
    }
    ModelDef {
        name: m.name.text.clone(),
        variables,
        equations,
    }
    .build()
}

struct Scope<'a> {
    vars: &'a [VariableDecl],
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|d| d.name == name).map(VarId)
    }

    fn var_atom(&self, e: &ExprSyn) -> Option<VarId> {
        match e {
            ExprSyn::Atom(id) => self.lookup(&id.text),
            _ => None,
        }
    }

    /// Resolves `e`; bare symbols are looked up in `expected`'s range.
    fn expr(&self, e: &ExprSyn, expected: Option<VarId>) -> Result<Expr> {
        Ok(match e {
            ExprSyn::Atom(id) => {
                if let Some(v) = self.lookup(&id.text) {
                    Expr::Var(v)
                } else if let Some(i) = expected.and_then(|v| self.vars[v.index()].range.iter().position(|s| *s == id.text)) {
                    Expr::Const(i as i64)
                } else if let Ok(n) = id.text.parse::<i64>() {
                    Expr::Const(n)
                } else {
                    let hint = expected
                        .map(|v| format!(" (not a variable or a value of `{}`)", self.vars[v.index()].name))
                        .unwrap_or_default();
                    return Err(at(id.span, format!("unknown name `{id}`{hint}")));
                }
            }
            ExprSyn::Not(x) => Expr::Not(Box::new(self.expr(x, None)?)),
            ExprSyn::Binary(op, l, r) => {
                let (le, re) = if op.is_comparison() {
                    (self.expr(l, self.var_atom(r))?, self.expr(r, self.var_atom(l))?)
                } else {
                    (self.expr(l, None)?, self.expr(r, None)?)
                };
                let (l, r) = (Box::new(le), Box::new(re));
                match op {
                    BinOp::Or => Expr::Or(l, r),
                    BinOp::And => Expr::And(l, r),
                    BinOp::Eq => Expr::Cmp(CmpOp::Eq, l, r),
                    BinOp::Ne => Expr::Cmp(CmpOp::Ne, l, r),
                    BinOp::Lt => Expr::Cmp(CmpOp::Lt, l, r),
                    BinOp::Le => Expr::Cmp(CmpOp::Le, l, r),
                    BinOp::Gt => Expr::Cmp(CmpOp::Gt, l, r),
                    BinOp::Ge => Expr::Cmp(CmpOp::Ge, l, r),
                    BinOp::Add => Expr::Add(l, r),
                    BinOp::Sub => Expr::Sub(l, r),
                }
            }
            ExprSyn::Min(args) => Expr::Min(args.iter().map(|a| self.expr(a, expected)).collect::<Result<_>>()?),
            ExprSyn::Max(args) => Expr::Max(args.iter().map(|a| self.expr(a, expected)).collect::<Result<_>>()?),
            ExprSyn::Case(arms, fallback) => Expr::Case(
                arms.iter()
                    .map(|(c, v)| Ok((self.expr(c, None)?, self.expr(v, expected)?)))
                    .collect::<Result<_>>()?,
                Box::new(self.expr(fallback, expected)?),
            ),
        })
    }
}

fn event(model: &CausalModel, var: &Ident, value: &Ident) -> Result<(VarId, usize)> {
    let id = model
        .lookup(&var.text)
        .map_err(|_| at(var.span, format!("unknown variable `{var}` in model `{}`", model.name())))?;
    if !model.is_endogenous(id) {
        return Err(at(var.span, format!("`{var}` is exogenous; events and interventions need endogenous variables")));
    }
    let x = model
        .value_index(id, &value.text)
        .map_err(|_| at(value.span, format!("`{value}` is not a value of `{var}`")))?;
    Ok((id, x))
}

pub fn resolve_formula(model: &CausalModel, f: &FormulaSyn) -> Result<Formula> {
    Ok(match f {
        FormulaSyn::True => Formula::True,
        FormulaSyn::False => Formula::False,
        FormulaSyn::Eq(v, x) => {
            let (id, x) = event(model, v, x)?;
            Formula::Event(id, x)
        }
        FormulaSyn::Ne(v, x) => {
            let (id, x) = event(model, v, x)?;
            Formula::negation(Formula::Event(id, x))
        }
        FormulaSyn::Not(g) => Formula::negation(resolve_formula(model, g)?),
        FormulaSyn::And(a, b) => Formula::and(resolve_formula(model, a)?, resolve_formula(model, b)?),
        FormulaSyn::Or(a, b) => Formula::or(resolve_formula(model, a)?, resolve_formula(model, b)?),
        FormulaSyn::Intervened(settings, body) => {
            let mut iv = Intervention::new();
            for s in settings {
                let (id, x) = event(model, &s.var, &s.value)?;
                if iv.get(id).is_some_and(|old| old != x) {
                    return Err(at(s.var.span, format!("`{}` is set twice in one intervention", s.var)));
                }
                iv.set(id, x);
            }
            Formula::intervened(iv, resolve_formula(model, body)?)
        }
    })
}

pub fn resolve_cause(model: &CausalModel, events: &[(Ident, Ident)]) -> Result<CauseConjunct> {
    let mut pairs = Vec::new();
    for (v, x) in events {
        let e = event(model, v, x)?;
        if pairs.iter().any(|(id, _)| *id == e.0) {
            return Err(at(v.span, format!("`{v}` appears twice in the cause")));
        }
        pairs.push(e);
    }
    CauseConjunct::new(model, pairs)
}

/// A named context of the document or a tuple in exogenous declaration order.
pub fn resolve_context_ref(doc: &Document, model: &CausalModel, c: &ContextRef) -> Result<Context> {
    match c {
        ContextRef::Named(n) => {
            let named = doc
                .context(&n.text)
                .ok_or_else(|| at(n.span, format!("unknown context `{n}`")))?;
            if named.model != model.name() {
                return Err(at(n.span, format!("context `{n}` belongs to model `{}`", named.model)));
            }
            Ok(named.context.clone())
        }
        ContextRef::Tuple(vals) => {
            let exo = model.exogenous();
            if vals.len() != exo.len() {
                let span = vals.first().map(|v| v.span).unwrap_or_default();
                return Err(at(
                    span,
                    format!("context tuple has {} values but `{}` has {} exogenous variables", vals.len(), model.name(), exo.len()),
                ));
            }
            let mut idx = Vec::new();
            for (v, x) in exo.iter().zip(vals) {
                idx.push(
                    model
                        .value_index(*v, &x.text)
                        .map_err(|_| at(x.span, format!("`{x}` is not a value of `{}`", model.var(*v).name)))?,
                );
            }
            model.context_from_indices(&idx)
        }
    }
}

fn resolve_query(doc: &Document, q: &QuerySyn) -> Result<Query> {
    let mut model_name = None;
    let mut context = None;
    let mut cause = None;
    let mut effect = None;
    let mut definitions: Option<Vec<String>> = None;
    let mut ranking = None;
    let mut contexts = None;
    let mut strict = false;
    let mut expect = None;
    for f in &q.fields {
        match f {
            QueryField::Model(m) => model_name = Some(m),
            QueryField::Context(c) => context = Some(c),
            QueryField::Cause(c) => cause = Some(c),
            QueryField::Effect(e) => effect = Some(e),
            QueryField::Definition(d) => definitions = Some(d.clone()),
            QueryField::Ranking(r) => ranking = Some(r),
            QueryField::Contexts(cs) => contexts = Some(cs),
            QueryField::Strict => strict = true,
            QueryField::Expect(b) => expect = Some(*b),
        }
    }
    let missing = |what: &str| at(q.name.span, format!("query `{}` has no {what}", q.name));
    let model_name = model_name.ok_or_else(|| missing("model"))?;
    let model = doc.require_model(model_name)?;
    let context_ref = context.ok_or_else(|| missing("context"))?;
    let context_value = resolve_context_ref(doc, model, context_ref)?;
    let cause = resolve_cause(model, cause.ok_or_else(|| missing("cause"))?)?;
    let effect_syn = effect.ok_or_else(|| missing("effect"))?;
    let effect = resolve_formula(model, effect_syn)?;
    let definitions: Vec<Definition> = definitions
        .unwrap_or_else(|| vec!["hp-updated".into()])
        .iter()
        .map(|t| Definition::from_tag(t).expect("parser admits known tags only"))
        .collect();
    let ranking = match ranking {
        Some(r) => {
            let named = doc
                .ranking(&r.text)
                .ok_or_else(|| at(r.span, format!("unknown ranking `{r}`")))?;
            if named.model != model.name() {
                return Err(at(r.span, format!("ranking `{r}` belongs to model `{}`", named.model)));
            }
            Some(r.text.clone())
        }
        None => None,
    };
    let contexts = match contexts {
        Some(refs) => Some(
            refs.iter()
                .map(|c| Ok((print_context_ref(c), resolve_context_ref(doc, model, c)?)))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    for d in &definitions {
        if d.needs_ranking() && ranking.is_none() {
            return Err(at(q.name.span, format!("definition `{}` needs a ranking", d.tag())));
        }
        if *d == Definition::NessRestricted && contexts.is_none() {
            return Err(at(q.name.span, "definition `ness-restricted` needs a contexts list".into()));
        }
    }
    Ok(Query {
        name: q.name.text.clone(),
        model: model.name().to_string(),
        context: context_value,
        context_label: print_context_ref(context_ref),
        cause: Some(cause),
        effect,
        effect_text: print_formula(effect_syn),
        definitions,
        ranking,
        contexts,
        strict,
        expect,
    })
}
