//! Finite-domain actual causality.
//!
//! Structural causal models over finite ranges, causal formulas, the HP
//! actual-cause definition in its updated and original forms, extended models
//! with ranking functions, and the causal NESS test with its bridge-condition
//! checkers. Models are written in a small DSL (see [`dsl`]) and a corpus of
//! standard examples ships with the crate (see [`corpus`]).

pub mod corpus;
pub mod dsl;
pub mod error;
pub mod expr;
pub mod hp;
pub mod model;
pub mod ness;
pub mod normality;
pub mod query;
pub mod report;
pub mod search;
pub mod semantics;

pub use error::{Error, Result};
pub use expr::{CmpOp, Expr};
pub use hp::{Ac2bVariant, CauseConjunct, Verdict, Witness};
pub use model::{CausalModel, Context, Intervention, ModelDef, VarId, VarKind, VariableDecl, World};
pub use ness::{ContextSet, EventSet, NessVerdict, NessWitness};
pub use normality::{ExtendedCausalModel, NormalityGate, Rank, RankingFunction};
pub use search::SearchLimits;
pub use semantics::{Evaluator, Formula};
