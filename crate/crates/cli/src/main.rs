use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use actual_cause::corpus;
use actual_cause::dsl::{self, resolve, Document};
use actual_cause::query::{self, Definition, Query};
use actual_cause::report::{self, CausesReport, CompareReport, QueryReport};
use actual_cause::{Error, Result, SearchLimits};

const EXIT_USAGE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Decide actual causes in structural causal models.
#[derive(Parser, Debug)]
#[command(name = "causal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a conjunction of events is a cause of an effect.
    Check {
        /// A `.cm` file, or `corpus:NAME` for a built-in example.
        file: String,
        /// Run this named query instead of an inline one.
        #[arg(long)]
        query: Option<String>,
        #[arg(long)]
        cause: Option<String>,
        #[command(flatten)]
        scenario: Scenario,
    },
    /// Enumerate every cause of an effect.
    Causes {
        file: String,
        #[command(flatten)]
        scenario: Scenario,
    },
    /// Tabulate the causes each definition finds.
    Compare {
        file: String,
        #[command(flatten)]
        scenario: Scenario,
    },
    /// Run the built-in corpus and its pinned verdicts.
    Corpus {
        /// List the corpus files instead of running them.
        #[arg(long)]
        list: bool,
        /// Run only files whose name contains this text.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        caps: Caps,
    },
    /// Parse a file and print it in canonical form.
    Parse { file: String },
}

#[derive(Args, Debug)]
struct Scenario {
    #[arg(long)]
    model: Option<String>,
    /// A named context or a tuple of exogenous values such as `(1, 0)`.
    #[arg(long)]
    context: Option<String>,
    #[arg(long)]
    effect: Option<String>,
    /// Definition tag; may be repeated.
    #[arg(long = "definition")]
    definitions: Vec<String>,
    /// Restricted context set, e.g. `Fair1, (fair, 0, 1, 0)`.
    #[arg(long)]
    contexts: Option<String>,
    #[arg(long)]
    ranking: Option<String>,
    /// Require strictly more normal contingencies (for contrast only).
    #[arg(long)]
    strict_normality: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args, Debug)]
struct Caps {
    #[arg(long)]
    max_vars: Option<usize>,
    #[arg(long)]
    max_conjuncts: Option<usize>,
}

impl Caps {
    fn limits(&self) -> Result<SearchLimits> {
        let mut limits = SearchLimits::from_env()?;
        if let Some(n) = self.max_vars {
            limits.max_vars = n;
        }
        if let Some(n) = self.max_conjuncts {
            limits.max_conjuncts = n;
        }
        Ok(limits)
    }
}

fn load(file: &str) -> Result<Document> {
    match file.strip_prefix("corpus:") {
        Some(name) => corpus::load(name),
        None => {
            let src = fs::read_to_string(file).map_err(|e| Error::Usage(format!("cannot read `{file}`: {e}")))?;
            dsl::parse(&src)
        }
    }
}

/// Splits on commas outside parentheses and braces.
fn split_top_level(s: &str) -> Vec<String> {
    let (mut out, mut cur, mut depth) = (Vec::new(), String::new(), 0i32);
    for c in s.trim().trim_start_matches('{').trim_end_matches('}').chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out.into_iter().map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn build_query(doc: &Document, sc: &Scenario, cause: Option<&str>) -> Result<Query> {
    let model = match &sc.model {
        Some(name) => doc
            .model(name)
            .ok_or_else(|| Error::Usage(format!("unknown model `{name}`")))?,
        None if doc.models.len() == 1 => &doc.models[0],
        None => return Err(Error::Usage("the document has several models; pass --model".into())),
    };
    let context_text = sc.context.as_deref().ok_or_else(|| Error::Usage("--context is required".into()))?;
    let context_ref = dsl::parse_context_ref(context_text)?;
    let context = resolve::resolve_context_ref(doc, model, &context_ref)?;
    let effect_text = sc.effect.as_deref().ok_or_else(|| Error::Usage("--effect is required".into()))?;
    if effect_text.trim().is_empty() {
        return Err(Error::Usage("--effect must not be empty".into()));
    }
    let effect_syn = dsl::parse_formula(effect_text)?;
    let effect = resolve::resolve_formula(model, &effect_syn)?;
    let cause = match cause {
        Some(c) => Some(resolve::resolve_cause(model, &dsl::parse_events(c)?)?),
        None => None,
    };
    let definitions = if sc.definitions.is_empty() {
        vec![Definition::HpUpdated]
    } else {
        sc.definitions.iter().map(|t| Definition::parse(t)).collect::<Result<_>>()?
    };
    if let Some(r) = &sc.ranking {
        let named = doc.ranking(r).ok_or_else(|| Error::Usage(format!("unknown ranking `{r}`")))?;
        if named.model != model.name() {
            return Err(Error::Usage(format!("ranking `{r}` belongs to model `{}`", named.model)));
        }
    }
    let contexts = match &sc.contexts {
        Some(list) => {
            let mut out = Vec::new();
            for part in split_top_level(list) {
                let r = dsl::parse_context_ref(&part)?;
                out.push((dsl::print_context_ref(&r), resolve::resolve_context_ref(doc, model, &r)?));
            }
            Some(out)
        }
        None => None,
    };
    Ok(Query {
        name: "inline".into(),
        model: model.name().to_string(),
        context,
        context_label: dsl::print_context_ref(&context_ref),
        cause,
        effect,
        effect_text: dsl::print_formula(&effect_syn),
        definitions,
        ranking: sc.ranking.clone(),
        contexts,
        strict: sc.strict_normality,
        expect: None,
    })
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn check(file: &str, query_name: Option<&str>, cause: Option<&str>, sc: &Scenario) -> Result<u8> {
    let doc = load(file)?;
    let limits = sc.caps.limits()?;
    let queries: Vec<Query> = match (query_name, cause) {
        (Some(name), _) => {
            let mut q = doc
                .query(name)
                .cloned()
                .ok_or_else(|| Error::Usage(format!("unknown query `{name}`")))?;
            if !sc.definitions.is_empty() {
                q.definitions = sc.definitions.iter().map(|t| Definition::parse(t)).collect::<Result<_>>()?;
            }
            q.strict |= sc.strict_normality;
            vec![q]
        }
        (None, Some(c)) => vec![build_query(&doc, sc, Some(c))?],
        (None, None) if !doc.queries.is_empty() => doc.queries.clone(),
        (None, None) => return Err(Error::Usage("pass --cause or --query, or a file with queries".into())),
    };
    let mut reports: Vec<QueryReport> = Vec::new();
    for q in &queries {
        for def in &q.definitions {
            let run = query::run_query(&doc, q, *def, limits)?;
            reports.push(report::query_report(&doc, q, &run)?);
        }
    }
    if sc.json {
        println!("{}", json(&reports));
    } else {
        for r in &reports {
            print!("{}", report::render_text(r));
        }
    }
    let mismatch = reports.iter().any(|r| r.matches_expectation == Some(false));
    Ok(if mismatch { EXIT_MISMATCH } else { 0 })
}

fn causes(file: &str, sc: &Scenario) -> Result<u8> {
    let doc = load(file)?;
    let limits = sc.caps.limits()?;
    let q = build_query(&doc, sc, None)?;
    let model = doc.model(&q.model).expect("resolved");
    let mut reports: Vec<CausesReport> = Vec::new();
    for def in &q.definitions {
        let (found, steps) = query::enumerate(&doc, &q, *def, limits)?;
        reports.push(report::causes_report(model, &q, *def, &found, steps));
    }
    if sc.json {
        println!("{}", json(&reports));
    } else {
        for r in &reports {
            let list: Vec<&str> = r.causes.iter().map(|c| c.cause.as_str()).collect();
            println!("{} [{}]: {}", r.query.effect, r.definition, if list.is_empty() { "no causes".into() } else { list.join("; ") });
        }
    }
    Ok(0)
}

fn compare(file: &str, sc: &Scenario) -> Result<u8> {
    let doc = load(file)?;
    let limits = sc.caps.limits()?;
    let q = build_query(&doc, sc, None)?;
    let model = doc.model(&q.model).expect("resolved");
    let rows = query::compare(&doc, &q, limits)?;
    let r = CompareReport::new(model, &q, &rows);
    if sc.json {
        println!("{}", json(&r));
    } else {
        print!("{}", r.render_table());
    }
    Ok(0)
}

fn run_corpus(list: bool, only: Option<&str>, as_json: bool, caps: &Caps) -> Result<u8> {
    if list {
        for name in corpus::names() {
            let doc = corpus::load(name)?;
            println!("{name}: {} models, {} queries", doc.models.len(), doc.queries.len());
        }
        return Ok(0);
    }
    let r = corpus::run(only, caps.limits()?)?;
    if r.entries.is_empty() {
        eprintln!("warning: no corpus file matches `{}`", only.unwrap_or(""));
    }
    if as_json {
        println!("{}", json(&r));
    } else {
        for e in &r.entries {
            let status = match e.report.matches_expectation {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "INFO",
            };
            println!(
                "{status} {}/{} [{}]: {} ({})",
                e.file, e.report.query.name, e.report.definition, e.report.verdict, e.report.reason
            );
        }
        for t in &r.typicality {
            println!("{} {}/typically {} under {}", if t.holds { "PASS" } else { "FAIL" }, t.file, t.statement, t.ranking);
        }
        let failed = r.mismatches().len() + r.failed_typicality().len();
        println!("{} checks, {failed} failed", r.entries.iter().filter(|e| e.report.expected.is_some()).count() + r.typicality.len());
    }
    Ok(if r.all_pass() { 0 } else { EXIT_MISMATCH })
}

fn parse(file: &str) -> Result<u8> {
    let doc = load(file)?;
    print!("{}", dsl::print(&doc));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Check { file, query, cause, scenario } => check(file, query.as_deref(), cause.as_deref(), scenario),
        Command::Causes { file, scenario } => causes(file, scenario),
        Command::Compare { file, scenario } => compare(file, scenario),
        Command::Corpus { list, only, json, caps } => run_corpus(*list, only.as_deref(), *json, caps),
        Command::Parse { file } => parse(file),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource() { EXIT_RESOURCE } else { EXIT_USAGE })
        }
    }
}
