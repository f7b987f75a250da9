use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::parse::{Atom, Domain, Problem};
use crate::search::SearchTask;

/// Default limit on enumerated ground facts and action bindings.
pub const DEFAULT_GROUNDING_CAP: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("grounding exceeds the cap of {cap} {what}")]
    TooLarge { what: &'static str, cap: u64 },
    #[error("action {schema}({binding}) adds and deletes the same fact {fact}")]
    ConflictingEffects {
        schema: String,
        binding: String,
        fact: String,
    },
}

/// A ground fact: predicate applied to objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<String>,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    pub pre: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
}

impl GroundAction {
    pub fn applicable(&self, state: &[u32]) -> bool {
        self.pre.iter().all(|f| state.binary_search(f).is_ok())
    }

    /// `(state - del) ∪ add`, sorted.
    pub fn apply(&self, state: &[u32]) -> Vec<u32> {
        let mut next: Vec<u32> = state
            .iter()
            .copied()
            .filter(|f| self.del.binary_search(f).is_err())
            .collect();
        next.extend_from_slice(&self.add);
        next.sort_unstable();
        next.dedup();
        next
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.schema)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A grounded STRIPS task. States are sorted fact-id sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTask {
    pub facts: Vec<Fact>,
    pub actions: Vec<GroundAction>,
    pub init: Vec<u32>,
    pub goal: Vec<u32>,
}

impl GroundTask {
    pub fn fact_id(&self, fact: &Fact) -> Option<u32> {
        self.facts.binary_search(fact).ok().map(|i| i as u32)
    }

    pub fn satisfies_goal(&self, state: &[u32]) -> bool {
        self.goal.iter().all(|g| state.binary_search(g).is_ok())
    }

    /// Ids of the actions applicable in `state`, ascending.
    pub fn applicable(&self, state: &[u32]) -> impl Iterator<Item = u32> + '_ {
        let state = state.to_vec();
        (0..self.actions.len() as u32).filter(move |&a| self.actions[a as usize].applicable(&state))
    }

    /// Lowest-id action leading from `from` to `to`.
    pub fn action_between(&self, from: &[u32], to: &[u32]) -> Option<u32> {
        self.applicable(from)
            .find(|&a| self.actions[a as usize].apply(from) == to)
    }

    /// Converts a state path into the action sequence realising it.
    pub fn plan_from_path(&self, states: &[Vec<u32>]) -> Option<Vec<u32>> {
        states
            .windows(2)
            .map(|w| self.action_between(&w[0], &w[1]))
            .collect()
    }

    pub fn state_names(&self, state: &[u32]) -> Vec<String> {
        state.iter().map(|&f| self.facts[f as usize].to_string()).collect()
    }
}

impl SearchTask for GroundTask {
    type State = Vec<u32>;

    fn initial_state(&self) -> Vec<u32> {
        self.init.clone()
    }

    /// Successor states in action-id order, duplicates removed.
    fn successors(&self, s: &Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let start = out.len();
        for a in &self.actions {
            if a.applicable(s) {
                let next = a.apply(s);
                if !out[start..].contains(&next) {
                    out.push(next);
                }
            }
        }
    }

    fn is_goal(&self, s: &Vec<u32>) -> bool {
        self.satisfies_goal(s)
    }
}

/// Grounds with the default cap.
pub fn ground(domain: &Domain, problem: &Problem) -> Result<GroundTask, GroundError> {
    ground_with_cap(domain, problem, DEFAULT_GROUNDING_CAP)
}

/// Enumerates every type-consistent fact and every type-consistent action
/// binding whose static preconditions (predicates no action changes) hold
/// in the initial state. Facts and actions are in lexicographic order.
pub fn ground_with_cap(
    domain: &Domain,
    problem: &Problem,
    cap: u64,
) -> Result<GroundTask, GroundError> {
    // Objects sorted by name, with their types.
    let mut objects: Vec<(&str, &str)> = domain
        .constants
        .iter()
        .chain(&problem.objects)
        .map(|o| (o.name.as_str(), o.ty.as_str()))
        .collect();
    objects.sort_unstable();
    let of_type = |ty: &str| -> Vec<&str> {
        objects
            .iter()
            .filter(|(_, t)| domain.is_subtype(t, ty))
            .map(|(n, _)| *n)
            .collect()
    };

    let mut facts = Vec::new();
    for p in &domain.predicates {
        let domains: Vec<Vec<&str>> = p.params.iter().map(|t| of_type(&t.ty)).collect();
        for_each_binding(&domains, cap, "facts", &mut |args| {
            facts.push(Fact {
                predicate: p.name.clone(),
                args: args.iter().map(|s| s.to_string()).collect(),
            });
        })?;
        if facts.len() as u64 > cap {
            return Err(GroundError::TooLarge { what: "facts", cap });
        }
    }
    facts.sort();
    let index: HashMap<&Fact, u32> = facts.iter().enumerate().map(|(i, f)| (f, i as u32)).collect();
    let lookup = |atom: &Atom, binding: &HashMap<&str, &str>| -> Option<u32> {
        let fact = Fact {
            predicate: atom.predicate.clone(),
            args: atom
                .args
                .iter()
                .map(|a| binding.get(a.as_str()).copied().unwrap_or(a).to_string())
                .collect(),
        };
        index.get(&fact).copied()
    };
    let no_binding = HashMap::new();
    let to_set = |atoms: &[Atom]| -> Vec<u32> {
        let set: BTreeSet<u32> = atoms.iter().filter_map(|a| lookup(a, &no_binding)).collect();
        set.into_iter().collect()
    };
    let init = to_set(&problem.init);
    let goal = to_set(&problem.goal);

    let changed: BTreeSet<&str> = domain
        .actions
        .iter()
        .flat_map(|a| a.add.iter().chain(&a.delete))
        .map(|a| a.predicate.as_str())
        .collect();

    let mut schemas: Vec<_> = domain.actions.iter().collect();
    schemas.sort_by(|a, b| a.name.cmp(&b.name));
    let mut actions = Vec::new();
    let mut enumerated = 0u64;
    for schema in schemas {
        let domains: Vec<Vec<&str>> = schema.params.iter().map(|t| of_type(&t.ty)).collect();
        let mut result = Ok(());
        for_each_binding(&domains, cap.saturating_sub(enumerated), "actions", &mut |args| {
            enumerated += 1;
            if result.is_err() {
                return;
            }
            let binding: HashMap<&str, &str> = schema
                .params
                .iter()
                .map(|p| p.name.as_str())
                .zip(args.iter().copied())
                .collect();
            let ids = |atoms: &[Atom]| -> Option<Vec<u32>> {
                atoms.iter().map(|a| lookup(a, &binding)).collect()
            };
            let sorted = |mut v: Vec<u32>| {
                v.sort_unstable();
                v.dedup();
                v
            };
            // Ill-typed instantiations have no fact ids and are dropped.
            let (Some(pre), Some(add), Some(del)) =
                (ids(&schema.precondition), ids(&schema.add), ids(&schema.delete))
            else {
                return;
            };
            let static_ok = schema.precondition.iter().zip(&pre).all(|(atom, id)| {
                changed.contains(atom.predicate.as_str()) || init.binary_search(id).is_ok()
            });
            if !static_ok {
                return;
            }
            let (pre, add, del) = (sorted(pre), sorted(add), sorted(del));
            if let Some(f) = add.iter().find(|f| del.binary_search(f).is_ok()) {
                result = Err(GroundError::ConflictingEffects {
                    schema: schema.name.clone(),
                    binding: args.join(" "),
                    fact: facts[*f as usize].to_string(),
                });
                return;
            }
            actions.push(GroundAction {
                schema: schema.name.clone(),
                args: args.iter().map(|s| s.to_string()).collect(),
                pre,
                add,
                del,
            });
        })?;
        result?;
    }
    actions.sort_by(|a: &GroundAction, b| (&a.schema, &a.args).cmp(&(&b.schema, &b.args)));
    Ok(GroundTask {
        facts,
        actions,
        init,
        goal,
    })
}

/// Calls `f` on every tuple of the Cartesian product, last position fastest.
fn for_each_binding<'a>(
    domains: &[Vec<&'a str>],
    cap: u64,
    what: &'static str,
    f: &mut dyn FnMut(&[&'a str]),
) -> Result<(), GroundError> {
    let mut total: u64 = 1;
    for d in domains {
        total = total.saturating_mul(d.len() as u64);
    }
    if total > cap {
        return Err(GroundError::TooLarge { what, cap });
    }
    if total == 0 {
        return Ok(());
    }
    let mut idx = vec![0usize; domains.len()];
    let mut args: Vec<&str> = domains.iter().map(|d| d[0]).collect();
    loop {
        f(&args);
        let mut k = domains.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                args[k] = domains[k][idx[k]];
                break;
            }
            idx[k] = 0;
            args[k] = domains[k][0];
        }
    }
}
