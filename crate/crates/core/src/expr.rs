//! Resolved structural-equation bodies.
//!
//! Every expression evaluates to an integer. Variables contribute the ordinal
//! index of their current value; comparisons and connectives yield `0` or `1`.
//! The result of a whole body is read as an index into the target's range.

use std::collections::BTreeSet;

use crate::model::VarId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn apply(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(VarId),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    /// Guarded arms tried in order; the fallback applies when none fires.
    Case(Vec<(Expr, Expr)>, Box<Expr>),
}

impl Expr {
    /// Evaluates against a valuation indexed by variable id.
    pub fn eval(&self, values: &[usize]) -> i64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => values[v.index()] as i64,
            Expr::Not(e) => (e.eval(values) == 0) as i64,
            Expr::And(a, b) => (a.eval(values) != 0 && b.eval(values) != 0) as i64,
            Expr::Or(a, b) => (a.eval(values) != 0 || b.eval(values) != 0) as i64,
            Expr::Cmp(op, a, b) => op.apply(a.eval(values), b.eval(values)) as i64,
            Expr::Add(a, b) => a.eval(values) + b.eval(values),
            Expr::Sub(a, b) => a.eval(values) - b.eval(values),
            Expr::Min(args) => args.iter().map(|e| e.eval(values)).min().unwrap_or(0),
            Expr::Max(args) => args.iter().map(|e| e.eval(values)).max().unwrap_or(0),
            Expr::Case(arms, fallback) => arms
                .iter()
                .find(|(cond, _)| cond.eval(values) != 0)
                .map(|(_, e)| e.eval(values))
                .unwrap_or_else(|| fallback.eval(values)),
        }
    }

    /// Variables read anywhere in the expression.
    pub fn reads(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_reads(&mut out);
        out
    }

    fn collect_reads(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Not(e) => e.collect_reads(out),
            Expr::And(a, b)
            | Expr::Or(a, b)
            | Expr::Cmp(_, a, b)
            | Expr::Add(a, b)
            | Expr::Sub(a, b) => {
                a.collect_reads(out);
                b.collect_reads(out);
            }
            Expr::Min(args) | Expr::Max(args) => args.iter().for_each(|e| e.collect_reads(out)),
            Expr::Case(arms, fallback) => {
                for (c, e) in arms {
                    c.collect_reads(out);
                    e.collect_reads(out);
                }
                fallback.collect_reads(out);
            }
        }
    }

    /// Replaces every read of `var` by the constant `value`.
    pub fn substitute(&self, var: VarId, value: usize) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(var, value));
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(v) if *v == var => Expr::Const(value as i64),
            Expr::Var(v) => Expr::Var(*v),
            Expr::Not(e) => Expr::Not(sub(e)),
            Expr::And(a, b) => Expr::And(sub(a), sub(b)),
            Expr::Or(a, b) => Expr::Or(sub(a), sub(b)),
            Expr::Cmp(op, a, b) => Expr::Cmp(*op, sub(a), sub(b)),
            Expr::Add(a, b) => Expr::Add(sub(a), sub(b)),
            Expr::Sub(a, b) => Expr::Sub(sub(a), sub(b)),
            Expr::Min(args) => Expr::Min(args.iter().map(|e| e.substitute(var, value)).collect()),
            Expr::Max(args) => Expr::Max(args.iter().map(|e| e.substitute(var, value)).collect()),
            Expr::Case(arms, fallback) => Expr::Case(
                arms.iter()
                    .map(|(c, e)| (c.substitute(var, value), e.substitute(var, value)))
                    .collect(),
                sub(fallback),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> Box<Expr> {
        Box::new(Expr::Var(VarId(i)))
    }

    #[test]
    fn max_min_and_case() {
        let max = Expr::Max(vec![Expr::Var(VarId(0)), Expr::Var(VarId(1))]);
        assert_eq!(max.eval(&[0, 1]), 1);
        assert_eq!(max.eval(&[0, 0]), 0);
        let min = Expr::Min(vec![Expr::Var(VarId(0)), Expr::Var(VarId(1))]);
        assert_eq!(min.eval(&[1, 0]), 0);
        let case = Expr::Case(
            vec![(
                Expr::Cmp(CmpOp::Ge, Box::new(Expr::Add(v(0), v(1))), Box::new(Expr::Const(2))),
                Expr::Const(1),
            )],
            Box::new(Expr::Const(0)),
        );
        assert_eq!(case.eval(&[1, 1]), 1);
        assert_eq!(case.eval(&[1, 0]), 0);
    }

    #[test]
    fn substitution_removes_reads() {
        let e = Expr::Max(vec![Expr::Var(VarId(0)), Expr::Var(VarId(1))]);
        let s = e.substitute(VarId(1), 0);
        assert_eq!(s.reads().into_iter().collect::<Vec<_>>(), vec![VarId(0)]);
        assert_eq!(s.eval(&[1, 1]), 1);
        assert_eq!(s.eval(&[0, 1]), 0);
    }
}
