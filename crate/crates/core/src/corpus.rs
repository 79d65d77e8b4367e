//! The built-in example corpus, shipped as DSL text.

use serde::{Deserialize, Serialize};

use crate::dsl::{self, Document};
use crate::error::{Error, Result};
use crate::normality::{check_typicality, ExtendedCausalModel};
use crate::query::run_query;
use crate::report::{query_report, QueryReport, SCHEMA};
use crate::search::SearchLimits;

/// `(name, source)` for every corpus file, in a fixed order.
pub const FILES: [(&str, &str); 10] = [
    ("forest_fire", include_str!("../corpus/forest_fire.cm")),
    ("prisoner", include_str!("../corpus/prisoner.cm")),
    ("scanners", include_str!("../corpus/scanners.cm")),
    ("doctors", include_str!("../corpus/doctors.cm")),
    ("assassin", include_str!("../corpus/assassin.cm")),
    ("assistant_buddy", include_str!("../corpus/assistant_buddy.cm")),
    ("suzy_billy", include_str!("../corpus/suzy_billy.cm")),
    ("victoria", include_str!("../corpus/victoria.cm")),
    ("voting", include_str!("../corpus/voting.cm")),
    ("weather_vote", include_str!("../corpus/weather_vote.cm")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<Document> {
    let src = source(name).ok_or_else(|| {
        Error::Usage(format!(
            "no corpus file `{name}` (available: {})",
            names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    dsl::parse(src)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypicalityResult {
    pub file: String,
    pub ranking: String,
    pub statement: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub file: String,
    pub report: QueryReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub schema: u32,
    pub entries: Vec<CorpusEntry>,
    pub typicality: Vec<TypicalityResult>,
}

impl CorpusReport {
    /// Entries whose verdict contradicts the pinned expectation.
    pub fn mismatches(&self) -> Vec<&CorpusEntry> {
        self.entries
            .iter()
            .filter(|e| e.report.matches_expectation == Some(false))
            .collect()
    }

    pub fn failed_typicality(&self) -> Vec<&TypicalityResult> {
        self.typicality.iter().filter(|t| !t.holds).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.mismatches().is_empty() && self.failed_typicality().is_empty()
    }
}

/// Typicality statements of a document, each checked against its ranking.
pub fn check_document_typicality(file: &str, doc: &Document) -> Result<Vec<TypicalityResult>> {
    let mut out = Vec::new();
    for t in &doc.typicality {
        let named = doc.ranking(&t.ranking).expect("resolved ranking");
        let model = doc.model(&named.model).expect("resolved model");
        let ext = ExtendedCausalModel::new(model.clone(), named.ranking.clone())?;
        out.push(TypicalityResult {
            file: file.to_string(),
            ranking: t.ranking.clone(),
            statement: t.text.clone(),
            holds: check_typicality(&ext, &t.premise, &t.conclusion)?,
        });
    }
    Ok(out)
}

/// Runs every query of a document under each of its definitions.
pub fn run_document(file: &str, doc: &Document, limits: SearchLimits) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for q in &doc.queries {
        for def in &q.definitions {
            let run = run_query(doc, q, *def, limits)?;
            out.push(CorpusEntry {
                file: file.to_string(),
                report: query_report(doc, q, &run)?,
            });
        }
    }
    Ok(out)
}

/// Runs the corpus files whose name contains `only` (all when `None`).
pub fn run(only: Option<&str>, limits: SearchLimits) -> Result<CorpusReport> {
    let mut report = CorpusReport {
        schema: SCHEMA,
        entries: vec![],
        typicality: vec![],
    };
    for name in names().filter(|n| only.is_none_or(|f| n.contains(f))) {
        let doc = load(name)?;
        report.entries.extend(run_document(name, &doc, limits)?);
        report.typicality.extend(check_document_typicality(name, &doc)?);
    }
    Ok(report)
}
