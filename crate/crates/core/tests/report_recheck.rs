use actual_cause::query::{self, applicable_definitions};
use actual_cause::report::{self, Certificate, QueryReport};
use actual_cause::{corpus, dsl, SearchLimits};

const SMALL: [&str; 8] = [
    "forest_fire",
    "prisoner",
    "scanners",
    "doctors",
    "assassin",
    "assistant_buddy",
    "suzy_billy",
    "victoria",
];

#[test]
fn corpus_reports_recheck_under_every_definition() {
    let limits = SearchLimits::default();
    for name in corpus::names() {
        let doc = corpus::load(name).unwrap();
        for q in &doc.queries {
            let defs = if SMALL.contains(&name) { applicable_definitions(q) } else { q.definitions.clone() };
            for def in defs {
                let run = query::run_query(&doc, q, def, limits).unwrap();
                let r = report::query_report(&doc, q, &run).unwrap();
                assert!(report::recheck(&doc, q, &r, limits).unwrap(), "{name}/{} [{def}]", q.name);
            }
        }
    }
}

#[test]
fn enumerated_causes_recheck() {
    let limits = SearchLimits::default();
    for name in SMALL {
        let doc = corpus::load(name).unwrap();
        for q in &doc.queries {
            for def in applicable_definitions(q) {
                let (found, _) = query::enumerate(&doc, q, def, limits).unwrap();
                for f in found {
                    let mut q2 = q.clone();
                    q2.cause = Some(f.cause().clone());
                    let run = query::run_query(&doc, &q2, def, limits).unwrap();
                    assert!(run.outcome.is_cause(), "{name}/{} [{def}]", q.name);
                    let r = report::query_report(&doc, &q2, &run).unwrap();
                    assert!(report::recheck(&doc, &q2, &r, limits).unwrap(), "{name}/{} [{def}]", q.name);
                }
            }
        }
    }
}

#[test]
fn tampered_certificates_fail_recheck() {
    let limits = SearchLimits::default();
    let doc = corpus::load("forest_fire").unwrap();
    let q = doc.query("DisjLightning").unwrap();
    let run = query::run_query(&doc, q, q.definitions[0], limits).unwrap();
    let mut r = report::query_report(&doc, q, &run).unwrap();
    assert_eq!(r.verdict, "cause");
    let Some(Certificate::Hp(c)) = &mut r.certificate else { panic!("expected an hp certificate") };
    assert!(!c.w.is_empty());
    for (var, _) in std::mem::take(&mut c.w) {
        c.z_star.insert(var, "1".into());
    }
    assert!(!report::recheck(&doc, q, &r, limits).unwrap());

    let mut flipped = report::query_report(&doc, q, &run).unwrap();
    flipped.verdict = "not-cause".into();
    flipped.certificate = None;
    assert!(!report::recheck(&doc, q, &flipped, limits).unwrap());
}

#[test]
fn reports_survive_json() {
    let limits = SearchLimits::default();
    let doc = dsl::parse(corpus::source("victoria").unwrap()).unwrap();
    for q in &doc.queries {
        for run in query::run_all(&doc, q, limits).unwrap() {
            let r = report::query_report(&doc, q, &run).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            let back: QueryReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
            assert!(text.contains("\"schema\":1"));
        }
    }
}
