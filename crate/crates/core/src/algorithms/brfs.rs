use rustc_hash::FxHashMap;

use super::{Budget, Outcome};
use crate::rng::RngStream;
use crate::search::{Path, RunStats, SearchTask};

/// Breadth-first search with goal test at generation and uniformly random
/// tie-breaking among states of equal depth.
///
/// Two queues hold the current and the next depth layer. States are drawn from
/// the current queue uniformly without replacement and their new successors are
/// pushed onto the next queue; the queues swap when the current one empties.
/// The open and closed lists are the set of states seen so far, so every state
/// is goal-tested at most once.
pub fn brfs<T: SearchTask>(
    task: &T,
    rng: &mut RngStream,
    budget: &Budget,
    stats: &mut RunStats,
) -> Outcome<T::State> {
    let root = task.initial_state();
    stats.goal_tests += 1;
    if task.is_goal(&root) {
        return Outcome::Solved(Path::single(root)).record(stats);
    }
    brfs_from(task, root, rng, budget, stats).record(stats)
}

/// BrFS below a root already known not to be a goal.
pub(crate) fn brfs_from<T: SearchTask>(
    task: &T,
    root: T::State,
    rng: &mut RngStream,
    budget: &Budget,
    stats: &mut RunStats,
) -> Outcome<T::State> {
    // Node arena: state and parent index. `seen` maps states to arena slots.
    let mut nodes: Vec<(T::State, u32)> = vec![(root.clone(), u32::MAX)];
    let mut seen: FxHashMap<T::State, u32> = FxHashMap::default();
    seen.insert(root, 0);

    let mut current: Vec<u32> = vec![0];
    let mut next: Vec<u32> = Vec::new();
    let mut buf = Vec::new();

    loop {
        if current.is_empty() {
            if next.is_empty() {
                return Outcome::NoSolution;
            }
            std::mem::swap(&mut current, &mut next);
        }
        let pick = rng.index(current.len());
        let parent = current.swap_remove(pick);

        buf.clear();
        task.successors(&nodes[parent as usize].0, &mut buf);
        for succ in buf.drain(..) {
            if seen.contains_key(&succ) {
                continue;
            }
            if budget.generations_spent(stats) {
                return Outcome::BudgetExceeded;
            }
            stats.generations += 1;
            stats.goal_tests += 1;
            let is_goal = task.is_goal(&succ);
            let slot = u32::try_from(nodes.len()).expect("more than 2^32 states in one search");
            seen.insert(succ.clone(), slot);
            nodes.push((succ, parent));
            if is_goal {
                return Outcome::Solved(trace(&nodes, slot));
            }
            next.push(slot);
        }
    }
}

fn trace<S: Clone>(nodes: &[(S, u32)], mut slot: u32) -> Path<S> {
    let mut states = Vec::new();
    while slot != u32::MAX {
        let (s, parent) = &nodes[slot as usize];
        states.push(s.clone());
        slot = *parent;
    }
    states.reverse();
    Path::new(states).expect("trace starts at a node")
}
