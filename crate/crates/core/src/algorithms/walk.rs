use std::num::NonZeroU64;

use serde::{Deserialize, Serialize};

use super::{luby, nonzero, Budget, Outcome, PolicyError};
use crate::rng::RngStream;
use crate::search::{Path, RunStats, SearchTask};

/// Depth limit of the `i`-th walk (1-based) of a restarting random walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepthPolicy {
    Constant(NonZeroU64),
    /// `multiplier * luby(i)`.
    Luby(NonZeroU64),
}

impl DepthPolicy {
    pub fn constant(len: u64) -> Result<Self, PolicyError> {
        Ok(DepthPolicy::Constant(nonzero(len, PolicyError::ZeroLength)?))
    }

    pub fn luby(multiplier: u64) -> Result<Self, PolicyError> {
        Ok(DepthPolicy::Luby(nonzero(
            multiplier,
            PolicyError::ZeroMultiplier,
        )?))
    }

    pub fn next_depth(&self, walk_index: u64) -> u64 {
        match self {
            DepthPolicy::Constant(len) => len.get(),
            DepthPolicy::Luby(m) => {
                let term = luby(walk_index.max(1)).expect("index is positive");
                m.get().saturating_mul(term)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkEnd {
    Success,
    /// The last state has no successors.
    DeadEnd,
    DepthExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkResult<S> {
    pub path: Path<S>,
    pub end: WalkEnd,
}

/// A single unbiased random walk of at most `max_depth` steps from the initial
/// state. Every sampled state is goal-tested; the initial state is not.
pub fn random_walk<T: SearchTask>(
    task: &T,
    max_depth: u64,
    rng: &mut RngStream,
    stats: &mut RunStats,
) -> WalkResult<T::State> {
    let mut states = vec![task.initial_state()];
    let mut buf = Vec::new();
    let end = walk(task, max_depth, rng, stats, None, &mut states, &mut buf)
        .expect("walk without a generation cap always ends");
    WalkResult {
        path: Path::new(states).expect("walk starts at the initial state"),
        end,
    }
}

/// Walks from `states[0]`, appending sampled states. Returns `None` when the
/// generation cap is hit.
fn walk<T: SearchTask>(
    task: &T,
    max_depth: u64,
    rng: &mut RngStream,
    stats: &mut RunStats,
    budget: Option<&Budget>,
    states: &mut Vec<T::State>,
    buf: &mut Vec<T::State>,
) -> Option<WalkEnd> {
    for _ in 0..max_depth {
        buf.clear();
        task.successors(states.last().expect("non-empty walk"), buf);
        if buf.is_empty() {
            return Some(WalkEnd::DeadEnd);
        }
        if budget.is_some_and(|b| b.generations_spent(stats)) {
            return None;
        }
        let pick = rng.index(buf.len());
        let next = buf.swap_remove(pick);
        stats.generations += 1;
        stats.goal_tests += 1;
        let is_goal = task.is_goal(&next);
        states.push(next);
        if is_goal {
            return Some(WalkEnd::Success);
        }
    }
    Some(WalkEnd::DepthExhausted)
}

/// Restarting random walks: the initial state is tested once, then walks with
/// depth limits drawn from `policy` are started from it until one reaches a
/// goal or the budget runs out. No duplicate detection is performed.
///
/// With an unlimited budget this does not return on tasks where no walk can
/// succeed.
pub fn rrw<T: SearchTask>(
    task: &T,
    policy: DepthPolicy,
    rng: &mut RngStream,
    budget: &Budget,
    stats: &mut RunStats,
) -> Outcome<T::State> {
    let root = task.initial_state();
    stats.goal_tests += 1;
    if task.is_goal(&root) {
        return Outcome::Solved(Path::single(root)).record(stats);
    }
    rrw_from(task, root, policy, rng, budget, stats).record(stats)
}

pub(crate) fn rrw_from<T: SearchTask>(
    task: &T,
    root: T::State,
    policy: DepthPolicy,
    rng: &mut RngStream,
    budget: &Budget,
    stats: &mut RunStats,
) -> Outcome<T::State> {
    let mut states = Vec::new();
    let mut buf = Vec::new();
    let mut walk_index = 0u64;
    loop {
        if budget.walks_spent(stats) || budget.generations_spent(stats) {
            return Outcome::BudgetExceeded;
        }
        walk_index += 1;
        stats.walks_started += 1;
        let depth = policy.next_depth(walk_index);
        states.clear();
        states.push(root.clone());
        match walk(task, depth, rng, stats, Some(budget), &mut states, &mut buf) {
            None => return Outcome::BudgetExceeded,
            Some(WalkEnd::Success) => {
                let path = Path::new(std::mem::take(&mut states)).expect("non-empty walk");
                return Outcome::Solved(path);
            }
            Some(WalkEnd::DeadEnd | WalkEnd::DepthExhausted) => {}
        }
    }
}
