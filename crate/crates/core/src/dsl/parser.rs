//! Recursive-descent parser producing [`super::ast`] trees.

use crate::error::{Error, Result};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};

pub const DEFINITION_TAGS: [&str; 6] = [
    "hp-updated",
    "hp-original",
    "hp-extended",
    "ness",
    "ness-default",
    "ness-restricted",
];

pub fn parse_source(source: &str) -> Result<SourceFile> {
    let mut p = Parser::new(source)?;
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        items.push(p.item()?);
    }
    Ok(SourceFile { items })
}

/// Parses a standalone causal formula, as given on the command line.
pub fn parse_formula(source: &str) -> Result<FormulaSyn> {
    let mut p = Parser::new(source)?;
    let f = p.formula()?;
    p.expect(Tok::Eof)?;
    Ok(f)
}

/// Parses `X=1 & Y=0` as a list of events.
pub fn parse_events(source: &str) -> Result<Vec<(Ident, Ident)>> {
    let mut p = Parser::new(source)?;
    let events = p.events(Tok::Amp)?;
    p.expect(Tok::Eof)?;
    Ok(events)
}

/// Parses a context reference: a name or `(v1, v2, ...)`.
pub fn parse_context_ref(source: &str) -> Result<ContextRef> {
    let mut p = Parser::new(source)?;
    let c = p.context_ref()?;
    p.expect(Tok::Eof)?;
    Ok(c)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn keyword(s: &str) -> Tok {
    Tok::Ident(s.to_string())
}

impl Parser {
    fn new(source: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(source)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Error {
        let t = &self.toks[self.pos];
        Error::Syntax {
            line: t.span.line,
            column: t.span.column,
            message: format!("unexpected `{}`", t.tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token> {
        if self.peek() == &tok {
            Ok(self.bump())
        } else {
            Err(self.error(&[&tok.describe()]))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        self.peek() == &keyword(kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[kw]))
        }
    }

    fn ident(&mut self) -> Result<Ident> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let span = self.bump().span;
                Ok(Ident { text, span })
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// A value symbol: identifier or number.
    fn value(&mut self) -> Result<Ident> {
        match self.peek().clone() {
            Tok::Ident(text) | Tok::Number(text) => {
                let span = self.bump().span;
                Ok(Ident { text, span })
            }
            _ => Err(self.error(&["value"])),
        }
    }

    fn item(&mut self) -> Result<Item> {
        match self.peek() {
            Tok::Ident(k) if k == "model" => Ok(Item::Model(self.model()?)),
            Tok::Ident(k) if k == "ranking" => Ok(Item::Ranking(self.ranking()?)),
            Tok::Ident(k) if k == "context" => Ok(Item::Context(self.context()?)),
            Tok::Ident(k) if k == "typically" => Ok(Item::Typically(self.typically()?)),
            Tok::Ident(k) if k == "query" => Ok(Item::Query(self.query()?)),
            _ => Err(self.error(&["model", "ranking", "context", "typically", "query"])),
        }
    }

    fn model(&mut self) -> Result<ModelSyn> {
        self.expect_keyword("model")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let kind = if self.is_keyword("exogenous") && matches!(self.peek_at(1), Tok::Ident(_)) {
                Some(DeclKind::Exogenous)
            } else if self.is_keyword("endogenous") && matches!(self.peek_at(1), Tok::Ident(_)) {
                Some(DeclKind::Endogenous)
            } else {
                None
            };
            if let Some(kind) = kind {
                self.bump();
                let mut names = vec![self.ident()?];
                while self.eat(&Tok::Comma) {
                    names.push(self.ident()?);
                }
                self.expect(Tok::Colon)?;
                self.expect(Tok::LBrace)?;
                let mut range = Vec::new();
                if self.peek() != &Tok::RBrace {
                    range.push(self.value()?);
                    while self.eat(&Tok::Comma) {
                        range.push(self.value()?);
                    }
                }
                self.expect(Tok::RBrace)?;
                self.expect(Tok::Semi)?;
                stmts.push(ModelStmt::Decl { kind, names, range });
            } else if matches!(self.peek(), Tok::Ident(_)) {
                let target = self.ident()?;
                self.expect(Tok::Assign)?;
                let body = self.expr()?;
                self.expect(Tok::Semi)?;
                stmts.push(ModelStmt::Equation { target, body });
            } else {
                return Err(self.error(&["exogenous", "endogenous", "identifier", "}"]));
            }
        }
        Ok(ModelSyn { name, stmts })
    }

    fn expr(&mut self) -> Result<ExprSyn> {
        self.expr_bin(1)
    }

    fn bin_op(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Pipe => BinOp::Or,
            Tok::Amp => BinOp::And,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            _ => return None,
        })
    }

    /// Precedence climbing; comparisons do not chain.
    fn expr_bin(&mut self, min: u8) -> Result<ExprSyn> {
        let mut lhs = if min <= 3 && self.peek() == &Tok::Bang {
            self.bump();
            ExprSyn::Not(Box::new(self.expr_bin(3)?))
        } else {
            self.expr_atom()?
        };
        while let Some(op) = self.bin_op() {
            let prec = op.precedence();
            if prec < min {
                break;
            }
            self.bump();
            let rhs = self.expr_bin(prec + 1)?;
            lhs = ExprSyn::Binary(op, Box::new(lhs), Box::new(rhs));
            if op.is_comparison() && self.bin_op().is_some_and(|o| o.is_comparison()) {
                return Err(self.error(&["operator other than a comparison"]));
            }
        }
        Ok(lhs)
    }

    fn expr_atom(&mut self) -> Result<ExprSyn> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Bang => {
                self.bump();
                Ok(ExprSyn::Not(Box::new(self.expr_bin(3)?)))
            }
            Tok::Ident(k) if (k == "min" || k == "max") && self.peek_at(1) == &Tok::LParen => {
                self.bump();
                self.bump();
                let mut args = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                Ok(if k == "min" { ExprSyn::Min(args) } else { ExprSyn::Max(args) })
            }
            Tok::Ident(k) if k == "case" && self.peek_at(1) == &Tok::LBrace => {
                self.bump();
                self.bump();
                let mut arms = Vec::new();
                loop {
                    if self.is_keyword("else") && self.peek_at(1) == &Tok::RightArrow {
                        self.bump();
                        self.bump();
                        let fallback = self.expr()?;
                        self.eat(&Tok::Semi);
                        self.expect(Tok::RBrace)?;
                        return Ok(ExprSyn::Case(arms, Box::new(fallback)));
                    }
                    let cond = self.expr()?;
                    self.expect(Tok::RightArrow)?;
                    let value = self.expr()?;
                    self.expect(Tok::Semi)?;
                    arms.push((cond, value));
                }
            }
            Tok::Ident(_) | Tok::Number(_) => Ok(ExprSyn::Atom(self.value()?)),
            _ => Err(self.error(&["expression"])),
        }
    }

    pub fn formula(&mut self) -> Result<FormulaSyn> {
        let mut lhs = self.formula_and()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.formula_and()?;
            lhs = FormulaSyn::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_and(&mut self) -> Result<FormulaSyn> {
        let mut lhs = self.formula_unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.formula_unary()?;
            lhs = FormulaSyn::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_unary(&mut self) -> Result<FormulaSyn> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(FormulaSyn::Not(Box::new(self.formula_unary()?)))
            }
            Tok::LBracket => {
                self.bump();
                let mut settings = Vec::new();
                loop {
                    let var = self.ident()?;
                    self.expect(Tok::LeftArrow)?;
                    let value = self.value()?;
                    settings.push(Setting { var, value });
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(FormulaSyn::Intervened(settings, Box::new(self.formula_unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(k) if k == "true" && !matches!(self.peek_at(1), Tok::Eq | Tok::Ne) => {
                self.bump();
                Ok(FormulaSyn::True)
            }
            Tok::Ident(k) if k == "false" && !matches!(self.peek_at(1), Tok::Eq | Tok::Ne) => {
                self.bump();
                Ok(FormulaSyn::False)
            }
            Tok::Ident(_) => {
                let var = self.ident()?;
                if self.eat(&Tok::Eq) {
                    Ok(FormulaSyn::Eq(var, self.value()?))
                } else if self.eat(&Tok::Ne) {
                    Ok(FormulaSyn::Ne(var, self.value()?))
                } else {
                    Err(self.error(&["=", "!="]))
                }
            }
            _ => Err(self.error(&["event", "!", "[", "(", "true", "false"])),
        }
    }

    fn rank(&mut self) -> Result<RankSyn> {
        match self.peek().clone() {
            Tok::Number(n) => {
                let t = self.bump();
                n.parse().map(RankSyn::Finite).map_err(|_| Error::Syntax {
                    line: t.span.line,
                    column: t.span.column,
                    message: format!("rank `{n}` is too large"),
                    expected: vec!["natural number".into()],
                })
            }
            Tok::Ident(k) if k == "inf" => {
                self.bump();
                Ok(RankSyn::Infinite)
            }
            _ => Err(self.error(&["natural number", "inf"])),
        }
    }

    fn ranking(&mut self) -> Result<RankingSyn> {
        self.expect_keyword("ranking")?;
        let name = self.ident()?;
        self.expect_keyword("for")?;
        let model = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut clauses = Vec::new();
        loop {
            if self.is_keyword("when") {
                self.bump();
                let cond = self.formula()?;
                self.expect_keyword("rank")?;
                let r = self.rank()?;
                self.expect(Tok::Semi)?;
                clauses.push((cond, r));
            } else if self.is_keyword("default") {
                self.bump();
                self.expect_keyword("rank")?;
                let default = self.rank()?;
                self.expect(Tok::Semi)?;
                self.expect(Tok::RBrace)?;
                return Ok(RankingSyn {
                    name,
                    model,
                    clauses,
                    default,
                });
            } else {
                return Err(self.error(&["when", "default"]));
            }
        }
    }

    fn events(&mut self, sep: Tok) -> Result<Vec<(Ident, Ident)>> {
        let mut out = Vec::new();
        loop {
            let var = self.ident()?;
            self.expect(Tok::Eq)?;
            out.push((var, self.value()?));
            if !self.eat(&sep) {
                return Ok(out);
            }
        }
    }

    fn context(&mut self) -> Result<ContextSyn> {
        self.expect_keyword("context")?;
        let name = self.ident()?;
        self.expect_keyword("for")?;
        let model = self.ident()?;
        self.expect(Tok::LBrace)?;
        let settings = if self.peek() == &Tok::RBrace {
            Vec::new()
        } else {
            self.events(Tok::Comma)?
        };
        self.expect(Tok::RBrace)?;
        Ok(ContextSyn { name, model, settings })
    }

    fn typically(&mut self) -> Result<TypicallySyn> {
        self.expect_keyword("typically")?;
        let premise = self.formula()?;
        self.expect(Tok::RightArrow)?;
        let conclusion = self.formula()?;
        self.expect_keyword("under")?;
        let ranking = self.ident()?;
        self.expect(Tok::Semi)?;
        Ok(TypicallySyn {
            premise,
            conclusion,
            ranking,
        })
    }

    fn context_ref(&mut self) -> Result<ContextRef> {
        if self.eat(&Tok::LParen) {
            let mut vals = Vec::new();
            if self.peek() != &Tok::RParen {
                vals.push(self.value()?);
                while self.eat(&Tok::Comma) {
                    vals.push(self.value()?);
                }
            }
            self.expect(Tok::RParen)?;
            Ok(ContextRef::Tuple(vals))
        } else {
            Ok(ContextRef::Named(self.ident()?))
        }
    }

    /// A dash-joined tag such as `hp-updated`.
    fn tag(&mut self) -> Result<String> {
        let mut s = self.ident()?.text;
        while self.peek() == &Tok::Minus && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            s.push('-');
            s.push_str(&self.ident()?.text);
        }
        Ok(s)
    }

    fn query(&mut self) -> Result<QuerySyn> {
        self.expect_keyword("query")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let field = match self.peek() {
                Tok::Ident(k) => k.clone(),
                _ => String::new(),
            };
            let f = match field.as_str() {
                "model" => {
                    self.bump();
                    QueryField::Model(self.ident()?)
                }
                "context" => {
                    self.bump();
                    QueryField::Context(self.context_ref()?)
                }
                "cause" => {
                    self.bump();
                    QueryField::Cause(self.events(Tok::Amp)?)
                }
                "effect" => {
                    self.bump();
                    QueryField::Effect(self.formula()?)
                }
                "definition" => {
                    self.bump();
                    let mut tags = Vec::new();
                    loop {
                        let at = self.toks[self.pos].span;
                        let tag = self.tag()?;
                        if !DEFINITION_TAGS.contains(&tag.as_str()) {
                            return Err(Error::Syntax {
                                line: at.line,
                                column: at.column,
                                message: format!("unknown definition `{tag}`"),
                                expected: DEFINITION_TAGS.iter().map(|s| s.to_string()).collect(),
                            });
                        }
                        tags.push(tag);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    QueryField::Definition(tags)
                }
                "ranking" => {
                    self.bump();
                    QueryField::Ranking(self.ident()?)
                }
                "contexts" => {
                    self.bump();
                    self.expect(Tok::LBrace)?;
                    let mut refs = vec![self.context_ref()?];
                    while self.eat(&Tok::Comma) {
                        refs.push(self.context_ref()?);
                    }
                    self.expect(Tok::RBrace)?;
                    QueryField::Contexts(refs)
                }
                "strict" => {
                    self.bump();
                    QueryField::Strict
                }
                "expect" => {
                    self.bump();
                    let at = self.toks[self.pos].span;
                    match self.tag()?.as_str() {
                        "cause" => QueryField::Expect(true),
                        "not-cause" => QueryField::Expect(false),
                        other => {
                            return Err(Error::Syntax {
                                line: at.line,
                                column: at.column,
                                message: format!("unexpected `{other}`"),
                                expected: vec!["cause".into(), "not-cause".into()],
                            })
                        }
                    }
                }
                _ => {
                    return Err(self.error(&[
                        "model",
                        "context",
                        "cause",
                        "effect",
                        "definition",
                        "ranking",
                        "contexts",
                        "strict",
                        "expect",
                        "}",
                    ]))
                }
            };
            self.expect(Tok::Semi)?;
            fields.push(f);
        }
        Ok(QuerySyn { name, fields })
    }
}
