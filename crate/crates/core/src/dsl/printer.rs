//! Canonical text for syntax trees; inserts only the parentheses the
//! grammar needs.

use std::fmt::Write;

use super::ast::*;

pub fn print_source(file: &SourceFile) -> String {
    let blocks: Vec<String> = file.items.iter().map(print_item).collect();
    let mut out = blocks.join("\n");
    if !out.is_empty() && !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

fn print_item(item: &Item) -> String {
    match item {
        Item::Model(m) => print_model(m),
        Item::Ranking(r) => print_ranking(r),
        Item::Context(c) => print_context(c),
        Item::Typically(t) => format!(
            "typically {} -> {} under {};\n",
            print_formula(&t.premise),
            print_formula(&t.conclusion),
            t.ranking
        ),
        Item::Query(q) => print_query(q),
    }
}

fn join(ids: &[Ident]) -> String {
    ids.iter().map(|i| i.text.as_str()).collect::<Vec<_>>().join(", ")
}

fn print_model(m: &ModelSyn) -> String {
    let mut out = format!("model {} {{\n", m.name);
    for stmt in &m.stmts {
        match stmt {
            ModelStmt::Decl { kind, names, range } => {
                let kw = match kind {
                    DeclKind::Exogenous => "exogenous",
                    DeclKind::Endogenous => "endogenous",
                };
                let _ = writeln!(out, "  {kw} {} : {{{}}};", join(names), join(range));
            }
            ModelStmt::Equation { target, body } => {
                let _ = writeln!(out, "  {target} := {};", print_expr(body));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn print_rank(r: RankSyn) -> String {
    match r {
        RankSyn::Finite(n) => n.to_string(),
        RankSyn::Infinite => "inf".into(),
    }
}

fn print_ranking(r: &RankingSyn) -> String {
    let mut out = format!("ranking {} for {} {{\n", r.name, r.model);
    for (cond, rank) in &r.clauses {
        let _ = writeln!(out, "  when {} rank {};", print_formula(cond), print_rank(*rank));
    }
    let _ = writeln!(out, "  default rank {};", print_rank(r.default));
    out.push_str("}\n");
    out
}

fn events(pairs: &[(Ident, Ident)], sep: &str) -> String {
    pairs.iter().map(|(v, x)| format!("{v}={x}")).collect::<Vec<_>>().join(sep)
}

fn print_context(c: &ContextSyn) -> String {
    if c.settings.is_empty() {
        format!("context {} for {} {{ }}\n", c.name, c.model)
    } else {
        format!("context {} for {} {{ {} }}\n", c.name, c.model, events(&c.settings, ", "))
    }
}

pub fn print_context_ref(c: &ContextRef) -> String {
    match c {
        ContextRef::Named(n) => n.text.clone(),
        ContextRef::Tuple(vals) => format!("({})", join(vals)),
    }
}

fn print_query(q: &QuerySyn) -> String {
    let mut out = format!("query {} {{\n", q.name);
    for f in &q.fields {
        let line = match f {
            QueryField::Model(m) => format!("model {m}"),
            QueryField::Context(c) => format!("context {}", print_context_ref(c)),
            QueryField::Cause(evs) => format!("cause {}", events(evs, " & ")),
            QueryField::Effect(f) => format!("effect {}", print_formula(f)),
            QueryField::Definition(tags) => format!("definition {}", tags.join(", ")),
            QueryField::Ranking(r) => format!("ranking {r}"),
            QueryField::Contexts(cs) => format!(
                "contexts {{{}}}",
                cs.iter().map(print_context_ref).collect::<Vec<_>>().join(", ")
            ),
            QueryField::Strict => "strict".into(),
            QueryField::Expect(true) => "expect cause".into(),
            QueryField::Expect(false) => "expect not-cause".into(),
        };
        let _ = writeln!(out, "  {line};");
    }
    out.push_str("}\n");
    out
}

pub fn print_expr(e: &ExprSyn) -> String {
    expr_at(e, 0)
}

const NOT_PREC: u8 = 3;

fn expr_at(e: &ExprSyn, min: u8) -> String {
    let (text, prec) = match e {
        ExprSyn::Atom(i) => (i.text.clone(), u8::MAX),
        ExprSyn::Not(x) => (format!("!{}", expr_at(x, NOT_PREC)), NOT_PREC),
        ExprSyn::Binary(op, l, r) => {
            let p = op.precedence();
            let left_min = if op.is_comparison() { p + 1 } else { p };
            (
                format!("{} {} {}", expr_at(l, left_min), op.symbol(), expr_at(r, p + 1)),
                p,
            )
        }
        ExprSyn::Min(args) | ExprSyn::Max(args) => {
            let name = if matches!(e, ExprSyn::Min(_)) { "min" } else { "max" };
            let args: Vec<String> = args.iter().map(|a| expr_at(a, 0)).collect();
            (format!("{name}({})", args.join(", ")), u8::MAX)
        }
        ExprSyn::Case(arms, fallback) => {
            let mut s = String::from("case { ");
            for (c, v) in arms {
                let _ = write!(s, "{} -> {}; ", expr_at(c, 0), expr_at(v, 0));
            }
            let _ = write!(s, "else -> {} }}", expr_at(fallback, 0));
            (s, u8::MAX)
        }
    };
    if prec < min {
        format!("({text})")
    } else {
        text
    }
}

pub fn print_formula(f: &FormulaSyn) -> String {
    formula_at(f, 0)
}

fn formula_at(f: &FormulaSyn, min: u8) -> String {
    let (text, prec) = match f {
        FormulaSyn::True => ("true".to_string(), 4),
        FormulaSyn::False => ("false".to_string(), 4),
        FormulaSyn::Eq(v, x) => (format!("{v}={x}"), 4),
        FormulaSyn::Ne(v, x) => (format!("{v}!={x}"), 4),
        FormulaSyn::Not(g) => (format!("!{}", formula_at(g, 3)), 3),
        FormulaSyn::Intervened(settings, g) => {
            let s: Vec<String> = settings.iter().map(|s| format!("{}<-{}", s.var, s.value)).collect();
            (format!("[{}] {}", s.join(", "), formula_at(g, 3)), 3)
        }
        FormulaSyn::And(a, b) => (format!("{} & {}", formula_at(a, 2), formula_at(b, 3)), 2),
        FormulaSyn::Or(a, b) => (format!("{} | {}", formula_at(a, 1), formula_at(b, 2)), 1),
    };
    if prec < min {
        format!("({text})")
    } else {
        text
    }
}
