//! Extended causal models: ranking functions over worlds and the normality
//! gate on AC2(a) contingencies.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{self, Ac2bVariant, CauseConjunct, Verdict, Witness};
use crate::model::{CausalModel, Context, VarId, World};
use crate::search::Assignments;
use crate::semantics::{Evaluator, Formula};

/// A natural number or infinity; lower is more normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Infinite => f.write_str("inf"),
        }
    }
}

/// First-match clauses `when <condition> rank r`, then a default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingFunction {
    pub name: String,
    pub clauses: Vec<(Formula, Rank)>,
    pub default: Rank,
}

impl RankingFunction {
    pub fn constant(name: impl Into<String>, rank: Rank) -> Self {
        RankingFunction {
            name: name.into(),
            clauses: Vec::new(),
            default: rank,
        }
    }

    pub fn check(&self, model: &CausalModel) -> Result<()> {
        for (cond, _) in &self.clauses {
            if !cond.is_intervention_free() {
                return Err(Error::Precondition(format!(
                    "ranking `{}` has a condition with an intervention prefix",
                    self.name
                )));
            }
            cond.check(model)?;
        }
        Ok(())
    }

    /// Rank of a total valuation (only endogenous slots are read).
    pub fn rank(&self, values: &[usize]) -> Rank {
        self.clauses
            .iter()
            .find(|(cond, _)| cond.holds_at(values))
            .map(|(_, r)| *r)
            .unwrap_or(self.default)
    }
}

/// A causal model together with a ranking of its endogenous worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedCausalModel {
    base: CausalModel,
    ranking: RankingFunction,
}

impl ExtendedCausalModel {
    pub fn new(base: CausalModel, ranking: RankingFunction) -> Result<Self> {
        ranking.check(&base)?;
        Ok(ExtendedCausalModel { base, ranking })
    }

    pub fn base(&self) -> &CausalModel {
        &self.base
    }

    pub fn ranking(&self) -> &RankingFunction {
        &self.ranking
    }

    pub fn rank_of(&self, world: &World) -> Rank {
        self.ranking.rank(world.values())
    }

    /// `s_u`, the world a context determines.
    pub fn world_of_context(&self, context: &Context) -> Result<World> {
        self.base.solve(context)
    }

    fn world_count(&self) -> u64 {
        let radices: Vec<usize> = self.base.endogenous().iter().map(|v| self.base.var(*v).range.len()).collect();
        Assignments::count(&radices)
    }

    /// Every total endogenous assignment, exogenous slots left at zero.
    fn worlds(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let endo = self.base.endogenous().to_vec();
        let radices: Vec<usize> = endo.iter().map(|v| self.base.var(*v).range.len()).collect();
        let n = self.base.var_count();
        Assignments::new(radices).map(move |vals| {
            let mut values = vec![0usize; n];
            for (v, x) in endo.iter().zip(vals) {
                values[v.index()] = x;
            }
            values
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalityGate {
    /// Contingency worlds may be as normal as the actual one.
    AtMost,
    /// Contingency worlds must be strictly more normal.
    Strict,
}

impl NormalityGate {
    pub fn admits(self, candidate: Rank, actual: Rank) -> bool {
        match self {
            NormalityGate::AtMost => candidate <= actual,
            NormalityGate::Strict => candidate < actual,
        }
    }
}

type RankMemo = RefCell<HashMap<Vec<(VarId, usize)>, Option<Rank>>>;

/// Worlds sorted by rank, answering "least rank of a world extending this
/// partial assignment".
struct RankIndex {
    width: usize,
    endo: Vec<VarId>,
    ranks: Vec<Rank>,
    cells: Vec<u16>,
    memo: RankMemo,
}

impl RankIndex {
    fn build(ext: &ExtendedCausalModel, ev: &Evaluator) -> Result<Self> {
        ev.limits().check_worlds(ext.world_count())?;
        let endo = ext.base.endogenous().to_vec();
        let mut rows: Vec<(Rank, Vec<u16>)> = ext
            .worlds()
            .map(|values| {
                let rank = ext.ranking.rank(&values);
                (rank, endo.iter().map(|v| values[v.index()] as u16).collect())
            })
            .collect();
        rows.sort_by_key(|(r, _)| *r);
        let width = endo.len();
        let mut ranks = Vec::with_capacity(rows.len());
        let mut cells = Vec::with_capacity(rows.len() * width);
        for (r, row) in rows {
            ranks.push(r);
            cells.extend(row);
        }
        Ok(RankIndex {
            width,
            endo,
            ranks,
            cells,
            memo: RefCell::new(HashMap::new()),
        })
    }

    fn least_rank(&self, partial: Vec<(VarId, usize)>) -> Option<Rank> {
        if let Some(hit) = self.memo.borrow().get(&partial) {
            return *hit;
        }
        let cols: Vec<(usize, u16)> = partial
            .iter()
            .map(|(v, x)| (self.endo.iter().position(|e| e == v).expect("endogenous"), *x as u16))
            .collect();
        let found = (0..self.ranks.len())
            .find(|&i| {
                let row = &self.cells[i * self.width..(i + 1) * self.width];
                cols.iter().all(|(c, x)| row[*c] == *x)
            })
            .map(|i| self.ranks[i]);
        self.memo.borrow_mut().insert(partial, found);
        found
    }
}

/// Builds the normality gate for `ext` in `context`: a witness is admissible
/// when some world satisfying `X=x' & W=w` has an admitted rank.
fn with_gate<T>(
    ev: &Evaluator,
    ext: &ExtendedCausalModel,
    context: &Context,
    gate: NormalityGate,
    run: impl FnOnce(&hp::Gate) -> Result<T>,
) -> Result<T> {
    let actual = ext.rank_of(&ext.world_of_context(context)?);
    let index: RefCell<Option<RankIndex>> = RefCell::new(None);
    let admissible = |cause: &CauseConjunct, w: &Witness| -> Result<bool> {
        if index.borrow().is_none() {
            *index.borrow_mut() = Some(RankIndex::build(ext, ev)?);
        }
        // Ranks are sorted, so the first world is the most normal one.
        let most_normal = index.borrow().as_ref().expect("built").ranks.first().copied();
        if !most_normal.is_some_and(|r| gate.admits(r, actual)) {
            return Ok(false);
        }
        let mut partial: Vec<(VarId, usize)> = cause.vars().into_iter().zip(w.x_prime.iter().copied()).collect();
        partial.extend(w.w_set.iter().copied().zip(w.w_vals.iter().copied()));
        partial.sort();
        let least = index.borrow().as_ref().expect("built").least_rank(partial);
        Ok(least.is_some_and(|r| gate.admits(r, actual)))
    };
    run(&admissible)
}

/// The HP verdict with AC2(a) restricted to normal-enough contingencies.
pub fn is_cause_extended(
    ev: &Evaluator,
    ext: &ExtendedCausalModel,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    variant: Ac2bVariant,
    gate: NormalityGate,
) -> Result<Verdict> {
    with_gate(ev, ext, context, gate, |g| {
        hp::is_actual_cause_gated(ev, context, cause, effect, variant, Some(g))
    })
}

pub fn find_witness_extended(
    ev: &Evaluator,
    ext: &ExtendedCausalModel,
    context: &Context,
    cause: &CauseConjunct,
    effect: &Formula,
    variant: Ac2bVariant,
    gate: NormalityGate,
) -> Result<Option<Witness>> {
    with_gate(ev, ext, context, gate, |g| {
        hp::find_witness_gated(ev, context, cause, effect, variant, Some(g))
    })
}

pub fn enumerate_causes_extended(
    ev: &Evaluator,
    ext: &ExtendedCausalModel,
    context: &Context,
    effect: &Formula,
    variant: Ac2bVariant,
    gate: NormalityGate,
) -> Result<Vec<(CauseConjunct, Witness)>> {
    with_gate(ev, ext, context, gate, |g| {
        hp::enumerate_causes_gated(ev, context, effect, variant, Some(g))
    })
}

/// Whether `witness` passes the normality gate for `cause` in `context`.
pub fn witness_admitted(
    ev: &Evaluator,
    ext: &ExtendedCausalModel,
    context: &Context,
    cause: &CauseConjunct,
    witness: &Witness,
    gate: NormalityGate,
) -> Result<bool> {
    with_gate(ev, ext, context, gate, |g| g(cause, witness))
}

/// "If p then typically q": q holds at every least-rank world satisfying p.
/// Vacuously true when no world satisfies p.
pub fn check_typicality(ext: &ExtendedCausalModel, p: &Formula, q: &Formula) -> Result<bool> {
    for f in [p, q] {
        if !f.is_intervention_free() {
            return Err(Error::Precondition("typicality statements cannot contain interventions".into()));
        }
        f.check(&ext.base)?;
    }
    let mut least: Option<Rank> = None;
    let mut ok = true;
    for values in ext.worlds() {
        if !p.holds_at(&values) {
            continue;
        }
        let r = ext.ranking.rank(&values);
        match least {
            Some(l) if r > l => continue,
            Some(l) if r == l => ok &= q.holds_at(&values),
            _ => {
                least = Some(r);
                ok = q.holds_at(&values);
            }
        }
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::model::{ModelDef, StructuralEquation, VarKind, VariableDecl};

    const A: VarId = VarId(2);
    const B: VarId = VarId(3);
    const VS: VarId = VarId(4);

    /// A = "assassin does not poison", B = "bodyguard adds antidote".
    fn assassin() -> CausalModel {
        let bin = |n: &str, k| VariableDecl::new(n, &["0", "1"], k);
        ModelDef {
            name: "Assassin".into(),
            variables: vec![
                bin("UA", VarKind::Exogenous),
                bin("UB", VarKind::Exogenous),
                bin("A", VarKind::Endogenous),
                bin("B", VarKind::Endogenous),
                bin("VS", VarKind::Endogenous),
            ],
            equations: vec![
                StructuralEquation { target: A, body: Expr::Var(VarId(0)) },
                StructuralEquation { target: B, body: Expr::Var(VarId(1)) },
                StructuralEquation { target: VS, body: Expr::Max(vec![Expr::Var(A), Expr::Var(B)]) },
            ],
        }
        .build()
        .unwrap()
    }

    fn ev(a: usize, b: usize) -> Formula {
        Formula::and(Formula::event(A, a), Formula::event(B, b))
    }

    fn normal_ranking() -> RankingFunction {
        RankingFunction {
            name: "Normal".into(),
            clauses: vec![
                (ev(1, 0), Rank::Finite(0)),
                (Formula::or(ev(0, 0), ev(1, 1)), Rank::Finite(1)),
                (ev(0, 1), Rank::Finite(2)),
            ],
            default: Rank::Infinite,
        }
    }

    #[test]
    fn ranks_follow_first_match() {
        let ext = ExtendedCausalModel::new(assassin(), normal_ranking()).unwrap();
        let world = |a, b, vs| World::from_values(vec![0, 0, a, b, vs]);
        assert_eq!(ext.rank_of(&world(1, 0, 1)), Rank::Finite(0));
        assert_eq!(ext.rank_of(&world(0, 1, 1)), Rank::Finite(2));
        let flat = ExtendedCausalModel::new(assassin(), RankingFunction::constant("Flat", Rank::Finite(0))).unwrap();
        assert_eq!(flat.rank_of(&world(0, 1, 0)), Rank::Finite(0));
        assert!(Rank::Infinite <= Rank::Infinite);
        assert!(!NormalityGate::Strict.admits(Rank::Infinite, Rank::Infinite));
    }

    #[test]
    fn typicality_of_untouched_coffee() {
        let ext = ExtendedCausalModel::new(assassin(), normal_ranking()).unwrap();
        assert!(check_typicality(&ext, &Formula::True, &ev(1, 0)).unwrap());
        assert!(!check_typicality(&ext, &Formula::True, &Formula::event(B, 1)).unwrap());
        let never = Formula::and(Formula::event(A, 0), Formula::event(A, 1));
        assert!(check_typicality(&ext, &never, &Formula::False).unwrap());
    }

    #[test]
    fn flat_ranking_reduces_to_plain_hp() {
        let m = assassin();
        let ext = ExtendedCausalModel::new(m.clone(), RankingFunction::constant("Flat", Rank::Finite(0))).unwrap();
        let e = Evaluator::new(&m);
        let u = m.context(&[("UA", "1"), ("UB", "1")]).unwrap();
        let b = CauseConjunct::new(&m, [(B, 1)]).unwrap();
        let lives = Formula::event(VS, 1);
        let plain = hp::is_actual_cause(&e, &u, &b, &lives, Ac2bVariant::Updated).unwrap();
        let ext_v = is_cause_extended(&e, &ext, &u, &b, &lives, Ac2bVariant::Updated, NormalityGate::AtMost).unwrap();
        assert!(plain.is_cause());
        assert_eq!(plain, ext_v);
        let strict = is_cause_extended(&e, &ext, &u, &b, &lives, Ac2bVariant::Updated, NormalityGate::Strict).unwrap();
        assert_eq!(strict, Verdict::FailsAc2);
    }

    #[test]
    fn intervention_prefix_in_ranking_is_rejected() {
        let mut r = normal_ranking();
        r.clauses.push((
            Formula::intervened(crate::model::Intervention::new().with(A, 1), Formula::True),
            Rank::Finite(3),
        ));
        assert!(matches!(ExtendedCausalModel::new(assassin(), r), Err(Error::Precondition(_))));
    }
}
