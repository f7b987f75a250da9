use std::collections::BTreeSet;

use super::ground::GroundTask;
use crate::search::{Heuristic, HeuristicValue};

/// Value of the FF heuristic together with the relaxed plan it counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedPlanResult {
    pub value: HeuristicValue,
    /// Action ids ordered by (layer, id); empty when the value is 0 or infinite.
    pub relaxed_plan: Vec<u32>,
}

/// Unit-cost FF heuristic: relaxed planning graph ignoring deletes, then
/// backward relaxed-plan extraction choosing for each needed fact the
/// achiever of the earliest layer, ties to the lowest action id.
pub fn h_ff(task: &GroundTask, state: &[u32]) -> RelaxedPlanResult {
    const UNREACHED: u32 = u32::MAX;
    let mut fact_layer = vec![UNREACHED; task.facts.len()];
    for &f in state {
        fact_layer[f as usize] = 0;
    }
    let mut action_layer = vec![UNREACHED; task.actions.len()];
    let goal_reached = |fl: &[u32]| task.goal.iter().all(|&g| fl[g as usize] != UNREACHED);

    let mut layer = 0u32;
    while !goal_reached(&fact_layer) {
        let mut new_facts = Vec::new();
        for (id, a) in task.actions.iter().enumerate() {
            if action_layer[id] == UNREACHED && a.pre.iter().all(|&p| fact_layer[p as usize] <= layer) {
                action_layer[id] = layer;
                new_facts.extend(a.add.iter().copied().filter(|&f| fact_layer[f as usize] == UNREACHED));
            }
        }
        if new_facts.is_empty() {
            return RelaxedPlanResult {
                value: HeuristicValue::Infinite,
                relaxed_plan: Vec::new(),
            };
        }
        layer += 1;
        for f in new_facts {
            fact_layer[f as usize] = layer;
        }
    }

    let top = layer as usize;
    // agenda[i]: facts needed at layer i; true_at[i]: facts already provided there.
    let mut agenda: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); top + 1];
    let mut true_at: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); top + 1];
    for &g in &task.goal {
        let l = fact_layer[g as usize] as usize;
        if l > 0 {
            agenda[l].insert(g);
        }
    }
    let mut chosen: BTreeSet<(u32, u32)> = BTreeSet::new();
    for i in (1..=top).rev() {
        let needed: Vec<u32> = agenda[i].iter().copied().collect();
        for f in needed {
            if true_at[i].contains(&f) {
                continue;
            }
            let (al, a) = task
                .actions
                .iter()
                .enumerate()
                .filter(|(id, act)| action_layer[*id] < i as u32 && act.add.contains(&f))
                .map(|(id, _)| (action_layer[id], id as u32))
                .min()
                .expect("a fact first reached at layer i has an achiever below it");
            chosen.insert((al, a));
            let act = &task.actions[a as usize];
            for &q in &act.add {
                true_at[i].insert(q);
                true_at[i - 1].insert(q);
            }
            for &p in &act.pre {
                let l = fact_layer[p as usize] as usize;
                if l > 0 && !true_at[i - 1].contains(&p) {
                    agenda[l].insert(p);
                }
            }
        }
    }
    let relaxed_plan: Vec<u32> = chosen.into_iter().map(|(_, a)| a).collect();
    RelaxedPlanResult {
        value: HeuristicValue::Finite(relaxed_plan.len() as u64),
        relaxed_plan,
    }
}

/// [`h_ff`] as a [`Heuristic`] over the task's states.
#[derive(Clone, Copy, Debug)]
pub struct FfHeuristic<'a> {
    pub task: &'a GroundTask,
}

impl Heuristic<Vec<u32>> for FfHeuristic<'_> {
    fn evaluate(&self, state: &Vec<u32>) -> HeuristicValue {
        h_ff(self.task, state).value
    }
}
