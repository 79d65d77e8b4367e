//! Dispatch from a resolved query to the engine a definition selects.

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::dsl::Document;
use crate::error::{Error, Result};
use crate::hp::{self, Ac2bVariant, CauseConjunct, Verdict, Witness};
use crate::model::{CausalModel, Context};
use crate::ness::{self, ContextSet, NessVerdict, NessWitness};
use crate::normality::{self, ExtendedCausalModel, NormalityGate};
use crate::search::SearchLimits;
use crate::semantics::{Evaluator, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definition {
    HpUpdated,
    HpOriginal,
    HpExtended,
    Ness,
    NessDefault,
    NessRestricted,
}

impl Definition {
    pub const ALL: [Definition; 6] = [
        Definition::HpUpdated,
        Definition::HpOriginal,
        Definition::HpExtended,
        Definition::Ness,
        Definition::NessDefault,
        Definition::NessRestricted,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Definition::HpUpdated => "hp-updated",
            Definition::HpOriginal => "hp-original",
            Definition::HpExtended => "hp-extended",
            Definition::Ness => "ness",
            Definition::NessDefault => "ness-default",
            Definition::NessRestricted => "ness-restricted",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Definition> {
        Self::ALL.into_iter().find(|d| d.tag() == tag)
    }

    /// As [`Definition::from_tag`], with a usage error naming the known tags.
    pub fn parse(tag: &str) -> Result<Definition> {
        Self::from_tag(tag).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|d| d.tag()).collect();
            Error::Usage(format!("unknown definition `{tag}` (expected one of: {})", known.join(", ")))
        })
    }

    pub fn needs_ranking(self) -> bool {
        matches!(self, Definition::HpExtended | Definition::NessDefault)
    }

    pub fn is_hp(self) -> bool {
        matches!(self, Definition::HpUpdated | Definition::HpOriginal | Definition::HpExtended)
    }
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A resolved causal question about one model and context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub name: String,
    pub model: String,
    pub context: Context,
    /// The context as written: a name or a value tuple.
    pub context_label: String,
    /// Absent for enumeration and comparison requests.
    pub cause: Option<CauseConjunct>,
    pub effect: Formula,
    pub effect_text: String,
    pub definitions: Vec<Definition>,
    pub ranking: Option<String>,
    /// Restricted context set, labelled as written.
    pub contexts: Option<Vec<(String, Context)>>,
    pub strict: bool,
    pub expect: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Hp { variant: Ac2bVariant, verdict: Verdict },
    Ness(NessVerdict),
}

impl Outcome {
    pub fn is_cause(&self) -> bool {
        match self {
            Outcome::Hp { verdict, .. } => verdict.is_cause(),
            Outcome::Ness(v) => v.is_cause(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Outcome::Hp { verdict, .. } => verdict.tag(),
            Outcome::Ness(v) => v.tag(),
        }
    }
}

/// One definition applied to one query.
#[derive(Debug, Clone)]
pub struct Run {
    pub definition: Definition,
    pub outcome: Outcome,
    pub steps: u64,
    pub elapsed: Duration,
}

/// A cause found by enumeration, with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Found {
    Hp(CauseConjunct, Witness),
    Ness(CauseConjunct, NessWitness),
}

impl Found {
    pub fn cause(&self) -> &CauseConjunct {
        match self {
            Found::Hp(c, _) | Found::Ness(c, _) => c,
        }
    }
}

/// Everything a definition needs besides the evaluator.
pub struct Setup<'d> {
    pub model: &'d CausalModel,
    pub ext: Option<ExtendedCausalModel>,
    pub u_set: ContextSet,
    pub gate: NormalityGate,
}

impl<'d> Setup<'d> {
    pub fn new(doc: &'d Document, q: &Query, def: Definition) -> Result<Self> {
        let model = doc
            .model(&q.model)
            .ok_or_else(|| Error::Usage(format!("unknown model `{}`", q.model)))?;
        let ext = if def.needs_ranking() {
            let name = q
                .ranking
                .as_deref()
                .ok_or_else(|| Error::Usage(format!("definition `{def}` needs a ranking")))?;
            let named = doc
                .ranking(name)
                .ok_or_else(|| Error::Usage(format!("unknown ranking `{name}`")))?;
            if named.model != q.model {
                return Err(Error::Usage(format!("ranking `{name}` belongs to model `{}`", named.model)));
            }
            Some(ExtendedCausalModel::new(model.clone(), named.ranking.clone())?)
        } else {
            None
        };
        let listed = q.contexts.as_ref().map(|cs| ContextSet::Listed(cs.iter().map(|(_, c)| c.clone()).collect()));
        let u_set = match def {
            Definition::NessRestricted => {
                listed.ok_or_else(|| Error::Usage("definition `ness-restricted` needs a contexts list".into()))?
            }
            Definition::NessDefault => listed.unwrap_or(ContextSet::All),
            _ => ContextSet::All,
        };
        let gate = if q.strict {
            NormalityGate::Strict
        } else {
            NormalityGate::AtMost
        };
        Ok(Setup { model, ext, u_set, gate })
    }

    fn variant(def: Definition) -> Ac2bVariant {
        match def {
            Definition::HpOriginal => Ac2bVariant::Original,
            _ => Ac2bVariant::Updated,
        }
    }

    pub fn verdict(&self, ev: &Evaluator, def: Definition, context: &Context, cause: &CauseConjunct, effect: &Formula) -> Result<Outcome> {
        let variant = Self::variant(def);
        Ok(match def {
            Definition::HpUpdated | Definition::HpOriginal => Outcome::Hp {
                variant,
                verdict: hp::is_actual_cause(ev, context, cause, effect, variant)?,
            },
            Definition::HpExtended => Outcome::Hp {
                variant,
                verdict: normality::is_cause_extended(ev, self.ext(), context, cause, effect, variant, self.gate)?,
            },
            Definition::Ness | Definition::NessRestricted => {
                Outcome::Ness(ness::is_ness_cause(ev, context, cause, effect, &self.u_set)?)
            }
            Definition::NessDefault => Outcome::Ness(ness::is_ness_cause_default_aware(
                ev,
                self.ext(),
                context,
                cause,
                effect,
                &self.u_set,
            )?),
        })
    }

    pub fn enumerate(&self, ev: &Evaluator, def: Definition, context: &Context, effect: &Formula) -> Result<Vec<Found>> {
        let variant = Self::variant(def);
        let hp_found = |v: Vec<(CauseConjunct, Witness)>| v.into_iter().map(|(c, w)| Found::Hp(c, w)).collect();
        let ness_found = |v: Vec<(CauseConjunct, NessWitness)>| v.into_iter().map(|(c, w)| Found::Ness(c, w)).collect();
        Ok(match def {
            Definition::HpUpdated | Definition::HpOriginal => hp_found(hp::enumerate_causes(ev, context, effect, variant)?),
            Definition::HpExtended => hp_found(normality::enumerate_causes_extended(
                ev,
                self.ext(),
                context,
                effect,
                variant,
                self.gate,
            )?),
            Definition::Ness | Definition::NessRestricted => {
                ness_found(ness::enumerate_ness_causes(ev, context, effect, &self.u_set)?)
            }
            Definition::NessDefault => ness_found(ness::enumerate_ness_causes_default_aware(
                ev,
                self.ext(),
                context,
                effect,
                &self.u_set,
            )?),
        })
    }

    fn ext(&self) -> &ExtendedCausalModel {
        self.ext.as_ref().expect("ranking resolved in Setup::new")
    }
}

/// Runs one definition on a query with a cause.
pub fn run_query(doc: &Document, q: &Query, def: Definition, limits: SearchLimits) -> Result<Run> {
    let cause = q
        .cause
        .as_ref()
        .ok_or_else(|| Error::Usage(format!("query `{}` has no cause", q.name)))?;
    let setup = Setup::new(doc, q, def)?;
    let ev = Evaluator::with_limits(setup.model, limits);
    let start = Instant::now();
    let outcome = setup.verdict(&ev, def, &q.context, cause, &q.effect)?;
    Ok(Run {
        definition: def,
        outcome,
        steps: ev.steps(),
        elapsed: start.elapsed(),
    })
}

/// Every definition listed by the query, in order.
pub fn run_all(doc: &Document, q: &Query, limits: SearchLimits) -> Result<Vec<Run>> {
    q.definitions.iter().map(|d| run_query(doc, q, *d, limits)).collect()
}

/// All causes of the query's effect under `def`; the query's cause is ignored.
pub fn enumerate(doc: &Document, q: &Query, def: Definition, limits: SearchLimits) -> Result<(Vec<Found>, u64)> {
    let setup = Setup::new(doc, q, def)?;
    let ev = Evaluator::with_limits(setup.model, limits);
    let found = setup.enumerate(&ev, def, &q.context, &q.effect)?;
    Ok((found, ev.steps()))
}

/// Definitions a query can be run under: rankings and context lists unlock
/// the definitions that need them.
pub fn applicable_definitions(q: &Query) -> Vec<Definition> {
    Definition::ALL
        .into_iter()
        .filter(|d| !d.needs_ranking() || q.ranking.is_some())
        .filter(|d| *d != Definition::NessRestricted || q.contexts.is_some())
        .collect()
}

/// Causes of the effect under each applicable definition.
pub fn compare(doc: &Document, q: &Query, limits: SearchLimits) -> Result<Vec<(Definition, Vec<CauseConjunct>)>> {
    applicable_definitions(q)
        .into_iter()
        .map(|d| {
            let (found, _) = enumerate(doc, q, d, limits)?;
            Ok((d, found.iter().map(|f| f.cause().clone()).collect()))
        })
        .collect()
}
