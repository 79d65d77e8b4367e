//! Machine-readable reports. Certificates name variables and values as
//! written in the model, so they can be checked without this crate's ids.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::dsl::Document;
use crate::error::{Error, Result};
use crate::hp::{self, Ac2bVariant, CauseConjunct, Verdict, Witness};
use crate::model::{CausalModel, Context, VarId};
use crate::ness::{self, NessVerdict, NessWitness};
use crate::normality;
use crate::query::{Definition, Found, Outcome, Query, Run, Setup};
use crate::search::{proper_subsets, SearchLimits};
use crate::semantics::{Evaluator, EventSet};

pub const SCHEMA: u32 = 1;

/// Variable name to value name.
pub type Assignment = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEcho {
    pub name: String,
    pub model: String,
    pub context: String,
    pub context_values: Assignment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause: Option<String>,
    pub effect: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<String>>,
    pub strict: bool,
}

impl QueryEcho {
    pub fn new(model: &CausalModel, q: &Query) -> Self {
        QueryEcho {
            name: q.name.clone(),
            model: q.model.clone(),
            context: q.context_label.clone(),
            context_values: model.context_map(&q.context),
            cause: q.cause.as_ref().map(|c| c.render(model)),
            effect: q.effect_text.clone(),
            ranking: q.ranking.clone(),
            contexts: q.contexts.as_ref().map(|cs| cs.iter().map(|(l, _)| l.clone()).collect()),
            strict: q.strict,
        }
    }
}

/// The AC2 partition and settings: `W=w`, the alternative `x'`, and the
/// actual values `z*` of `Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HpCertificate {
    pub cause: Assignment,
    pub variant: Ac2bVariant,
    pub w: Assignment,
    pub x_prime: Assignment,
    pub z_star: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NessCertificate {
    pub cause: Assignment,
    pub event_set: Assignment,
    pub insufficiency_context: Assignment,
    pub insufficiency_extension: Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Hp(HpCertificate),
    Ness(NessCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryReport {
    pub schema: u32,
    pub query: QueryEcho,
    pub definition: Definition,
    /// `cause` or `not-cause`.
    pub verdict: String,
    /// Which condition decided the verdict.
    pub reason: String,
    /// For a cause, its own certificate; for a minimality failure, the
    /// certificate of the smaller cause.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matches_expectation: Option<bool>,
    pub stats: Stats,
    pub timing: Timing,
}

fn assignment(model: &CausalModel, pairs: impl IntoIterator<Item = (VarId, usize)>) -> Assignment {
    pairs
        .into_iter()
        .map(|(v, x)| (model.var(v).name.clone(), model.value_name(v, x).to_string()))
        .collect()
}

fn context_assignment(model: &CausalModel, c: &Context) -> Assignment {
    model.context_map(c)
}

pub fn hp_certificate(model: &CausalModel, cause: &CauseConjunct, w: &Witness, variant: Ac2bVariant) -> Certificate {
    Certificate::Hp(HpCertificate {
        cause: assignment(model, cause.iter()),
        variant,
        w: assignment(model, w.w_set.iter().copied().zip(w.w_vals.iter().copied())),
        x_prime: assignment(model, cause.vars().into_iter().zip(w.x_prime.iter().copied())),
        z_star: assignment(model, w.z_set.iter().copied().zip(w.z_star.iter().copied())),
    })
}

pub fn ness_certificate(model: &CausalModel, cause: &CauseConjunct, w: &NessWitness) -> Certificate {
    Certificate::Ness(NessCertificate {
        cause: assignment(model, cause.iter()),
        event_set: assignment(model, w.event_set.iter()),
        insufficiency_context: context_assignment(model, &w.insufficiency_context),
        insufficiency_extension: assignment(model, w.insufficiency_extension.iter()),
    })
}

fn outcome_certificate(model: &CausalModel, cause: &CauseConjunct, outcome: &Outcome) -> Option<Certificate> {
    match outcome {
        Outcome::Hp { variant, verdict } => match verdict {
            Verdict::Cause(w) => Some(hp_certificate(model, cause, w, *variant)),
            Verdict::FailsAc3 { smaller, witness } => Some(hp_certificate(model, smaller, witness, *variant)),
            _ => None,
        },
        Outcome::Ness(v) => match v {
            NessVerdict::Cause(w) => Some(ness_certificate(model, cause, w)),
            NessVerdict::FailsNt4 { smaller, witness } => Some(ness_certificate(model, smaller, witness)),
            _ => None,
        },
    }
}

fn verdict_word(is_cause: bool) -> String {
    if is_cause { "cause" } else { "not-cause" }.to_string()
}

pub fn query_report(doc: &Document, q: &Query, run: &Run) -> Result<QueryReport> {
    let model = doc
        .model(&q.model)
        .ok_or_else(|| Error::Usage(format!("unknown model `{}`", q.model)))?;
    let cause = q
        .cause
        .as_ref()
        .ok_or_else(|| Error::Usage(format!("query `{}` has no cause", q.name)))?;
    let is_cause = run.outcome.is_cause();
    Ok(QueryReport {
        schema: SCHEMA,
        query: QueryEcho::new(model, q),
        definition: run.definition,
        verdict: verdict_word(is_cause),
        reason: run.outcome.tag().to_string(),
        certificate: outcome_certificate(model, cause, &run.outcome),
        expected: q.expect,
        matches_expectation: q.expect.map(|e| e == is_cause),
        stats: Stats { steps: run.steps },
        timing: Timing {
            elapsed_us: run.elapsed.as_micros() as u64,
        },
    })
}

fn pairs(model: &CausalModel, a: &Assignment) -> Result<Vec<(VarId, usize)>> {
    let mut out = Vec::new();
    for (name, value) in a {
        let v = model.lookup(name)?;
        out.push((v, model.value_index(v, value)?));
    }
    out.sort();
    Ok(out)
}

fn to_conjunct(model: &CausalModel, a: &Assignment) -> Result<CauseConjunct> {
    CauseConjunct::new(model, pairs(model, a)?)
}

fn to_witness(model: &CausalModel, c: &HpCertificate) -> Result<(CauseConjunct, Witness)> {
    let cause = to_conjunct(model, &c.cause)?;
    let w = pairs(model, &c.w)?;
    let z = pairs(model, &c.z_star)?;
    let x: BTreeMap<VarId, usize> = pairs(model, &c.x_prime)?.into_iter().collect();
    let x_prime = cause
        .vars()
        .iter()
        .map(|v| x.get(v).copied())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Precondition("certificate x_prime does not cover the cause".into()))?;
    if x.len() != cause.len() {
        return Err(Error::Precondition("certificate x_prime sets a non-cause variable".into()));
    }
    let witness = Witness {
        w_set: w.iter().map(|p| p.0).collect(),
        w_vals: w.iter().map(|p| p.1).collect(),
        z_set: z.iter().map(|p| p.0).collect(),
        z_star: z.iter().map(|p| p.1).collect(),
        x_prime,
    };
    Ok((cause, witness))
}

fn to_ness_witness(model: &CausalModel, c: &NessCertificate) -> Result<(CauseConjunct, NessWitness)> {
    let cause = to_conjunct(model, &c.cause)?;
    let ctx_pairs: Vec<(&str, &str)> = c
        .insufficiency_context
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    let witness = NessWitness {
        event_set: EventSet::from_events(model, pairs(model, &c.event_set)?)?,
        insufficiency_context: model.context(&ctx_pairs)?,
        insufficiency_extension: EventSet::from_events(model, pairs(model, &c.insufficiency_extension)?)?,
    };
    Ok((cause, witness))
}

/// Checks an HP certificate: AC1, AC2 under its witness and, for the
/// extended definition, the normality gate.
fn hp_certificate_valid(setup: &Setup, ev: &Evaluator, def: Definition, q: &Query, c: &HpCertificate) -> Result<bool> {
    let (cause, witness) = to_witness(setup.model, c)?;
    if !hp::check_ac1(ev, &q.context, &cause, &q.effect)? {
        return Ok(false);
    }
    if !hp::check_ac2(ev, &q.context, &cause, &q.effect, &witness, c.variant)? {
        return Ok(false);
    }
    if def == Definition::HpExtended {
        let ext = setup.ext.as_ref().expect("ranking resolved");
        return normality::witness_admitted(ev, ext, &q.context, &cause, &witness, setup.gate);
    }
    Ok(true)
}

/// Checks a NESS certificate: NT1, NT2 and the NT3 failure it records.
fn ness_certificate_valid(setup: &Setup, ev: &Evaluator, def: Definition, q: &Query, c: &NessCertificate) -> Result<bool> {
    let model = setup.model;
    let (cause, w) = to_ness_witness(model, c)?;
    let none = vec![None; model.var_count()];
    let actual = ev.solve(&q.context, &none)?;
    let s = &w.event_set;
    if !cause.iter().all(|(v, x)| s.get(v) == Some(x)) || !s.holds_at(&actual) || !ev.eval(&q.context, &q.effect)? {
        return Ok(false);
    }
    let (strong, _) = ness::is_strongly_sufficient(ev, &q.context, s, &q.effect, &setup.u_set)?;
    if !strong {
        return Ok(false);
    }
    let rest = s.without(&cause.vars().into_iter().collect());
    let ext = &w.insufficiency_extension;
    if !ext.holds_at(&actual) || ext.iter().any(|(v, _)| rest.contains_var(v)) {
        return Ok(false);
    }
    let u_alt = &w.insufficiency_context;
    if !setup.u_set.contexts(model).contains(u_alt) {
        return Ok(false);
    }
    if def == Definition::NessDefault {
        let e = setup.ext.as_ref().expect("ranking resolved");
        if e.rank_of(&e.world_of_context(u_alt)?) > e.rank_of(&e.world_of_context(&q.context)?) {
            return Ok(false);
        }
    }
    let mut iv = rest.to_intervention();
    for (v, x) in ext.iter() {
        iv.set(v, x);
    }
    Ok(!ev.eval_under(u_alt, &iv, &q.effect)?)
}

/// Re-derives a report's verdict from its certificate. Positive verdicts
/// are checked against the certificate and minimality is re-searched;
/// minimality failures are checked through the smaller cause's
/// certificate; the remaining negative verdicts are recomputed.
pub fn recheck(doc: &Document, q: &Query, report: &QueryReport, limits: SearchLimits) -> Result<bool> {
    let def = report.definition;
    let setup = Setup::new(doc, q, def)?;
    let ev = Evaluator::with_limits(setup.model, limits);
    let cause = q
        .cause
        .as_ref()
        .ok_or_else(|| Error::Usage(format!("query `{}` has no cause", q.name)))?;
    let cert_valid = |c: &Certificate| -> Result<bool> {
        match c {
            Certificate::Hp(h) => hp_certificate_valid(&setup, &ev, def, q, h),
            Certificate::Ness(n) => ness_certificate_valid(&setup, &ev, def, q, n),
        }
    };
    let cert_cause = |c: &Certificate| -> Result<CauseConjunct> {
        match c {
            Certificate::Hp(h) => to_conjunct(setup.model, &h.cause),
            Certificate::Ness(n) => to_conjunct(setup.model, &n.cause),
        }
    };
    match report.reason.as_str() {
        "cause" => {
            let Some(c) = &report.certificate else { return Ok(false) };
            if cert_cause(c)? != *cause || !cert_valid(c)? {
                return Ok(false);
            }
            for sub in proper_subsets(&cause.vars()) {
                let smaller = cause.restrict(&sub);
                if setup.verdict(&ev, def, &q.context, &smaller, &q.effect)?.is_cause() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        "fails_ac3" | "fails_nt4" => {
            let Some(c) = &report.certificate else { return Ok(false) };
            let smaller = cert_cause(c)?;
            let proper = smaller.len() < cause.len() && smaller.iter().all(|(v, x)| cause.get(v) == Some(x));
            Ok(proper && cert_valid(c)?)
        }
        other => {
            let outcome = setup.verdict(&ev, def, &q.context, cause, &q.effect)?;
            Ok(outcome.tag() == other)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundCause {
    pub cause: String,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausesReport {
    pub schema: u32,
    pub query: QueryEcho,
    pub definition: Definition,
    pub causes: Vec<FoundCause>,
    pub stats: Stats,
}

pub fn causes_report(model: &CausalModel, q: &Query, def: Definition, found: &[Found], steps: u64) -> CausesReport {
    let variant = if def == Definition::HpOriginal {
        Ac2bVariant::Original
    } else {
        Ac2bVariant::Updated
    };
    CausesReport {
        schema: SCHEMA,
        query: QueryEcho::new(model, q),
        definition: def,
        causes: found
            .iter()
            .map(|f| match f {
                Found::Hp(c, w) => FoundCause {
                    cause: c.render(model),
                    certificate: hp_certificate(model, c, w, variant),
                },
                Found::Ness(c, w) => FoundCause {
                    cause: c.render(model),
                    certificate: ness_certificate(model, c, w),
                },
            })
            .collect(),
        stats: Stats { steps },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRow {
    pub definition: Definition,
    pub causes: Vec<String>,
}

/// Causes by definition for one effect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: u32,
    pub query: QueryEcho,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn new(model: &CausalModel, q: &Query, rows: &[(Definition, Vec<CauseConjunct>)]) -> Self {
        CompareReport {
            schema: SCHEMA,
            query: QueryEcho::new(model, q),
            rows: rows
                .iter()
                .map(|(d, cs)| CompareRow {
                    definition: *d,
                    causes: cs.iter().map(|c| c.render(model)).collect(),
                })
                .collect(),
        }
    }

    /// Every cause found by some definition, in first-seen order.
    pub fn all_causes(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for row in &self.rows {
            for c in &row.causes {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
        }
        out
    }

    /// A causes-by-definition table with `x` where a definition finds the cause.
    pub fn render_table(&self) -> String {
        let causes = self.all_causes();
        let head = "cause";
        let width = causes.iter().map(|c| c.len()).chain([head.len()]).max().unwrap_or(0);
        let mut out = format!("{head:<width$}");
        for row in &self.rows {
            let _ = write!(out, "  {}", row.definition);
        }
        out.push('\n');
        for c in &causes {
            let _ = write!(out, "{c:<width$}");
            for row in &self.rows {
                let mark = if row.causes.contains(c) { "x" } else { "." };
                let tag_width = row.definition.tag().len();
                let _ = write!(out, "  {mark:^tag_width$}");
            }
            out.push('\n');
        }
        if causes.is_empty() {
            out.push_str("(no causes under any definition)\n");
        }
        out
    }
}

fn render_assignment(a: &Assignment) -> String {
    a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
}

/// Human-readable form of a report.
pub fn render_text(r: &QueryReport) -> String {
    let mut out = String::new();
    let q = &r.query;
    let _ = writeln!(
        out,
        "{}: {} of {} in {} at {} [{}]: {} ({})",
        q.name,
        q.cause.as_deref().unwrap_or("?"),
        q.effect,
        q.model,
        q.context,
        r.definition,
        r.verdict,
        r.reason
    );
    match &r.certificate {
        Some(Certificate::Hp(c)) => {
            let _ = writeln!(
                out,
                "  witness for {}: W={{{}}} x'={{{}}} Z*={{{}}}",
                render_assignment(&c.cause),
                render_assignment(&c.w),
                render_assignment(&c.x_prime),
                render_assignment(&c.z_star)
            );
        }
        Some(Certificate::Ness(c)) => {
            let _ = writeln!(
                out,
                "  witness for {}: S={{{}}}; without the cause it fails at ({}) when adding {{{}}}",
                render_assignment(&c.cause),
                render_assignment(&c.event_set),
                render_assignment(&c.insufficiency_context),
                render_assignment(&c.insufficiency_extension)
            );
        }
        None => {}
    }
    if let Some(ok) = r.matches_expectation {
        let _ = writeln!(out, "  expectation: {}", if ok { "met" } else { "MISMATCH" });
    }
    out
}

/// Report with timing zeroed, for byte-for-byte comparison of runs.
pub fn without_timing(mut r: QueryReport) -> QueryReport {
    r.timing.elapsed_us = 0;
    r
}
