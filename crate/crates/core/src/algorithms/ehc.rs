use serde::{Deserialize, Serialize};

use super::{brfs_from, rrw_from, Budget, DepthPolicy, Outcome, PolicyError};
use crate::rng::RngStream;
use crate::search::{
    escape_task_from_scored, Heuristic, Junction, Path, RunStats, Scored, SearchTask,
};

/// Search used by enforced hill-climbing to leave each heuristic region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EscapeStrategy {
    Brfs,
    Rrw(DepthPolicy),
}

impl EscapeStrategy {
    pub fn constant_rrw(len: u64) -> Result<Self, PolicyError> {
        Ok(EscapeStrategy::Rrw(DepthPolicy::constant(len)?))
    }

    pub fn luby_rrw(multiplier: u64) -> Result<Self, PolicyError> {
        Ok(EscapeStrategy::Rrw(DepthPolicy::luby(multiplier)?))
    }
}

/// Enforced hill-climbing.
///
/// Starting from the initial state, repeatedly solves the escape task rooted at
/// the current state (goal: a real goal or a strictly lower heuristic value),
/// commits to the first escape found and appends its path, until the committed
/// state is a goal. Each BrFS escape uses fresh open and closed lists. The
/// budget applies to the run as a whole.
///
/// Returns `NoSolution` when `h(s_I)` is infinite or a BrFS escape exhausts its
/// region; random-walk strategies only fail with `BudgetExceeded`.
pub fn ehc<T, H>(
    task: &T,
    heuristic: &H,
    strategy: EscapeStrategy,
    rng: &mut RngStream,
    budget: &Budget,
    stats: &mut RunStats,
) -> Outcome<T::State>
where
    T: SearchTask,
    H: Heuristic<T::State>,
{
    let root = task.initial_state();
    stats.goal_tests += 1;
    if task.is_goal(&root) {
        return Outcome::Solved(Path::single(root)).record(stats);
    }
    stats.heuristic_evals += 1;
    let h = heuristic.evaluate(&root);
    let mut entry = Scored { state: root, h };
    let mut path = Path::single(entry.state.clone());

    loop {
        let Ok(escape) = escape_task_from_scored(task, heuristic, entry) else {
            return Outcome::NoSolution.record(stats);
        };
        stats.escape_searches += 1;
        let start = escape.initial_state();
        let found = match strategy {
            EscapeStrategy::Brfs => brfs_from(&escape, start, rng, budget, stats),
            EscapeStrategy::Rrw(policy) => rrw_from(&escape, start, policy, rng, budget, stats),
        };
        stats.heuristic_evals += escape.heuristic_evals();

        let segment = match found {
            Outcome::Solved(p) => p,
            Outcome::NoSolution => return Outcome::NoSolution.record(stats),
            Outcome::BudgetExceeded => return Outcome::BudgetExceeded.record(stats),
        };
        entry = segment.last().clone();
        // The escape goal test already evaluated the real goal test on this state.
        let reached_goal = task.is_goal(&entry.state);
        path = path
            .concat(segment.map(|s| s.state), Junction::Shared)
            .expect("escape paths start at the committed state");
        if reached_goal {
            return Outcome::Solved(path).record(stats);
        }
    }
}
