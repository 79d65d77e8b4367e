//! Unresolved syntax trees. Names are kept as written; [`super::resolve`]
//! binds them to a model.

use std::fmt;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

/// A name or value symbol with its position. Equality ignores the position.
#[derive(Debug, Clone)]
pub struct Ident {
    pub text: String,
    pub span: Span,
}

impl Ident {
    pub fn new(text: impl Into<String>) -> Self {
        Ident {
            text: text.into(),
            span: Span::default(),
        }
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Ident {}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Model(ModelSyn),
    Ranking(RankingSyn),
    Context(ContextSyn),
    Typically(TypicallySyn),
    Query(QuerySyn),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Exogenous,
    Endogenous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelStmt {
    /// `exogenous A, B : {0, 1};`
    Decl {
        kind: DeclKind,
        names: Vec<Ident>,
        range: Vec<Ident>,
    },
    /// `X := expr;`
    Equation { target: Ident, body: ExprSyn },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSyn {
    pub name: Ident,
    pub stmts: Vec<ModelStmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "|",
            BinOp::And => "&",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

/// Structural-equation body as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprSyn {
    /// A variable, a value symbol or a number; decided at resolution.
    Atom(Ident),
    Not(Box<ExprSyn>),
    Binary(BinOp, Box<ExprSyn>, Box<ExprSyn>),
    Min(Vec<ExprSyn>),
    Max(Vec<ExprSyn>),
    Case(Vec<(ExprSyn, ExprSyn)>, Box<ExprSyn>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    pub var: Ident,
    pub value: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaSyn {
    True,
    False,
    Eq(Ident, Ident),
    Ne(Ident, Ident),
    Not(Box<FormulaSyn>),
    And(Box<FormulaSyn>, Box<FormulaSyn>),
    Or(Box<FormulaSyn>, Box<FormulaSyn>),
    Intervened(Vec<Setting>, Box<FormulaSyn>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSyn {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingSyn {
    pub name: Ident,
    pub model: Ident,
    pub clauses: Vec<(FormulaSyn, RankSyn)>,
    pub default: RankSyn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSyn {
    pub name: Ident,
    pub model: Ident,
    pub settings: Vec<(Ident, Ident)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypicallySyn {
    pub premise: FormulaSyn,
    pub conclusion: FormulaSyn,
    pub ranking: Ident,
}

/// A context given by name or as a tuple of exogenous values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextRef {
    Named(Ident),
    Tuple(Vec<Ident>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryField {
    Model(Ident),
    Context(ContextRef),
    Cause(Vec<(Ident, Ident)>),
    Effect(FormulaSyn),
    Definition(Vec<String>),
    Ranking(Ident),
    Contexts(Vec<ContextRef>),
    Strict,
    Expect(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySyn {
    pub name: Ident,
    pub fields: Vec<QueryField>,
}
