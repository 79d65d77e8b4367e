//! Enumeration helpers and search budgets shared by the engines.

use std::env;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_VARS: usize = 12;
pub const DEFAULT_MAX_CONJUNCTS: usize = 3;
pub const DEFAULT_MAX_STEPS: u64 = 200_000_000;
pub const DEFAULT_MAX_WORLDS: u64 = 1 << 20;

/// Name of the environment variable that overrides the default caps.
pub const CAP_ENV_VAR: &str = "CAUSAL_SEARCH_CAP";

/// Caps on exhaustive searches. Exceeding one is reported as
/// [`Error::SearchCap`]; nothing is ever silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Most endogenous variables a witness search will partition.
    pub max_vars: usize,
    /// Largest conjunction considered when enumerating causes.
    pub max_conjuncts: usize,
    /// Budget of model solves per query.
    pub max_steps: u64,
    /// Most worlds enumerated when scanning a ranking.
    pub max_worlds: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_vars: DEFAULT_MAX_VARS,
            max_conjuncts: DEFAULT_MAX_CONJUNCTS,
            max_steps: DEFAULT_MAX_STEPS,
            max_worlds: DEFAULT_MAX_WORLDS,
        }
    }
}

impl SearchLimits {
    /// Defaults, overridden by `CAUSAL_SEARCH_CAP` when it is set.
    pub fn from_env() -> Result<Self> {
        match env::var(CAP_ENV_VAR) {
            Ok(spec) => Self::default().with_overrides(&spec),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Applies a cap specification: either a bare number (the variable cap)
    /// or comma-separated `key=value` pairs with keys `vars`, `conjuncts`,
    /// `steps` and `worlds`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("malformed {CAP_ENV_VAR} value `{spec}`"));
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<usize>() {
            self.max_vars = n;
            return Ok(self);
        }
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            let n: u64 = value.trim().parse().map_err(|_| bad())?;
            match key.trim() {
                "vars" => self.max_vars = n as usize,
                "conjuncts" => self.max_conjuncts = n as usize,
                "steps" => self.max_steps = n,
                "worlds" => self.max_worlds = n,
                _ => return Err(bad()),
            }
        }
        Ok(self)
    }

    pub fn check_vars(&self, what: &str, count: usize) -> Result<()> {
        if count > self.max_vars {
            return Err(Error::SearchCap {
                what: what.to_string(),
                limit: self.max_vars as u64,
                requested: count as u64,
            });
        }
        Ok(())
    }

    pub fn check_conjuncts(&self, count: usize) -> Result<()> {
        if count > self.max_conjuncts {
            return Err(Error::SearchCap {
                what: "conjunction size".to_string(),
                limit: self.max_conjuncts as u64,
                requested: count as u64,
            });
        }
        Ok(())
    }

    pub fn check_worlds(&self, count: u64) -> Result<()> {
        if count > self.max_worlds {
            return Err(Error::SearchCap {
                what: "world enumeration".to_string(),
                limit: self.max_worlds,
                requested: count,
            });
        }
        Ok(())
    }
}

/// Lexicographic odometer over the product of `0..radix` for each position;
/// the last position varies fastest. Zero positions yield one empty tuple.
#[derive(Debug, Clone)]
pub struct Assignments {
    radices: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Assignments {
    pub fn new(radices: Vec<usize>) -> Self {
        let next = if radices.contains(&0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        Assignments { radices, next }
    }

    /// Number of tuples the odometer will produce, saturating at `u64::MAX`.
    pub fn count(radices: &[usize]) -> u64 {
        radices
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
            .unwrap_or(u64::MAX)
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.radices[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

/// Subsets of `items` ordered by size, then lexicographically by position.
pub fn subsets_by_size<T: Clone>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0..=items.len()).flat_map(move |k| items.iter().cloned().combinations(k))
}

/// Strict, non-empty subsets of `items`, smallest first.
pub fn proper_subsets<T: Clone>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (1..items.len()).flat_map(move |k| items.iter().cloned().combinations(k))
}

/// Every subset as a membership mask; order is irrelevant to callers.
pub fn all_masks(n: usize) -> impl Iterator<Item = u64> {
    assert!(n < 64, "mask enumeration over {n} items");
    0..(1u64 << n)
}
