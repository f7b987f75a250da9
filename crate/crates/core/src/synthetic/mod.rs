//! Parametric tasks with analytically known structure.
//!
//! Trees encode a state as the child-index path from the root, packed as
//! `(depth, index)` with `index = sum c_j * b^(depth-1-j)`, so no two distinct
//! paths ever produce the same state.

mod exact;
mod tree;
mod uhr_chain;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngStream;

pub use exact::{census, exact_reach_prob, exact_success_prob, Census, DEFAULT_NODE_CAP};
pub use tree::{DeadLeafTreeSpec, StarTaskSpec, TreeState, TreeTask, TreeTaskSpec};
pub use uhr_chain::{UhrChainSpec, UhrChainTask, UhrHeuristic, UhrLevel, UhrState};

/// Largest number of states a synthetic task may have.
pub const MAX_STATES: u128 = 1 << 62;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("{0} must be at least 1")]
    TooSmall(&'static str),
    #[error("goal count {g} exceeds the {available} states at depth {depth}")]
    TooManyGoals { g: u64, available: u128, depth: u32 },
    #[error("only {reachable} depth-{depth} states are reachable but {g} goals were requested")]
    UnreachableGoals { g: u64, reachable: u64, depth: u32 },
    #[error("state count exceeds 2^62")]
    TooLarge,
    #[error("dead-end probability {0} is outside [0, 1)")]
    BadProbability(f64),
    #[error("deep goals require deeper_levels > 0")]
    DeepGoalsWithoutLevels,
    #[error("UHR chain has {levels} level descriptions for k = {k}; give 1 or k")]
    LevelCount { k: u32, levels: usize },
    #[error("exit count {x} of UHR {level} exceeds its {available} frontier states")]
    TooManyExits { level: usize, x: u64, available: u128 },
    #[error("enumeration exceeded the node cap of {cap}; estimate by Monte-Carlo instead")]
    NodeCap { cap: u64 },
}

/// Any synthetic task description, as it appears in experiment manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskSpec {
    Tree(TreeTaskSpec),
    Star(StarTaskSpec),
    DeadLeafTree(DeadLeafTreeSpec),
    UhrChain(UhrChainSpec),
}

impl TaskSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            TaskSpec::Tree(s) => s.validate(),
            TaskSpec::Star(s) => s.as_tree().validate(),
            TaskSpec::DeadLeafTree(s) => s.validate(),
            TaskSpec::UhrChain(s) => s.validate(),
        }
    }

    /// Goal-placement seed used in fixed-instance mode.
    pub fn goal_seed(&self) -> u64 {
        match self {
            TaskSpec::Tree(s) => s.goal_seed,
            TaskSpec::Star(s) => s.goal_seed,
            TaskSpec::DeadLeafTree(s) => s.goal_seed,
            TaskSpec::UhrChain(s) => s.seed,
        }
    }
}

/// Uniformly random `count`-subset of `0..n`, sorted, by a partial
/// Fisher-Yates shuffle over a sparse virtual array.
pub fn sample_distinct(n: u64, count: u64, rng: &mut RngStream) -> Vec<u64> {
    assert!(count <= n, "cannot draw {count} of {n}");
    let mut moved = std::collections::HashMap::new();
    let mut out = Vec::with_capacity(count as usize);
    for i in 0..count {
        let j = i + rng.below(n - i);
        let at_j = *moved.get(&j).unwrap_or(&j);
        let at_i = *moved.get(&i).unwrap_or(&i);
        moved.insert(j, at_i);
        out.push(at_j);
    }
    out.sort_unstable();
    out
}

pub(crate) fn checked_pow(b: u64, e: u32) -> Result<u128, SpecError> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(b as u128).ok_or(SpecError::TooLarge)?;
        if acc > MAX_STATES {
            return Err(SpecError::TooLarge);
        }
    }
    Ok(acc)
}
