//! Task, path, heuristic and instrumentation contracts shared by every algorithm.

use std::cell::Cell;
use std::fmt::Debug;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A state-space search task: an initial state, an ordered successor function
/// and a goal test.
///
/// Implementations must be deterministic: repeated calls to `successors` on the
/// same state yield the same ordered list, and `is_goal` is a pure predicate.
pub trait SearchTask {
    type State: Clone + Eq + Hash + Debug;

    fn initial_state(&self) -> Self::State;

    /// Appends the successors of `state` to `out` in a fixed order.
    fn successors(&self, state: &Self::State, out: &mut Vec<Self::State>);

    fn is_goal(&self, state: &Self::State) -> bool;
}

impl<T: SearchTask + ?Sized> SearchTask for &T {
    type State = T::State;

    fn initial_state(&self) -> Self::State {
        (**self).initial_state()
    }

    fn successors(&self, state: &Self::State, out: &mut Vec<Self::State>) {
        (**self).successors(state, out)
    }

    fn is_goal(&self, state: &Self::State) -> bool {
        (**self).is_goal(state)
    }
}

/// Heuristic value: a non-negative integer or the dead-end sentinel.
///
/// `Infinite` orders above every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HeuristicValue {
    Finite(u64),
    Infinite,
}

impl HeuristicValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, HeuristicValue::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            HeuristicValue::Finite(v) => Some(v),
            HeuristicValue::Infinite => None,
        }
    }
}

impl From<u64> for HeuristicValue {
    fn from(v: u64) -> Self {
        HeuristicValue::Finite(v)
    }
}

impl std::fmt::Display for HeuristicValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HeuristicValue::Finite(v) => write!(f, "{v}"),
            HeuristicValue::Infinite => f.write_str("inf"),
        }
    }
}

pub trait Heuristic<S> {
    fn evaluate(&self, state: &S) -> HeuristicValue;
}

impl<S, F> Heuristic<S> for F
where
    F: Fn(&S) -> HeuristicValue,
{
    fn evaluate(&self, state: &S) -> HeuristicValue {
        self(state)
    }
}

/// How two paths are joined by [`Path::concat`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Junction {
    /// The last state of the left path equals the first of the right one and
    /// appears once in the result.
    Shared,
    /// The right path is appended as is.
    Fresh,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("a path must contain at least one state")]
    Empty,
    #[error("junction mismatch: left path ends in {left} but right path starts with {right}")]
    JunctionMismatch { left: String, right: String },
}

/// A non-empty sequence of states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path<S> {
    states: Vec<S>,
}

impl<S> Path<S> {
    pub fn single(state: S) -> Self {
        Path {
            states: vec![state],
        }
    }

    pub fn new(states: Vec<S>) -> Result<Self, PathError> {
        if states.is_empty() {
            return Err(PathError::Empty);
        }
        Ok(Path { states })
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn into_states(self) -> Vec<S> {
        self.states
    }

    pub fn first(&self) -> &S {
        &self.states[0]
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("paths are non-empty")
    }

    /// Number of states on the path.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of transitions, i.e. `len() - 1`.
    pub fn transitions(&self) -> usize {
        self.states.len() - 1
    }

    pub fn push(&mut self, state: S) {
        self.states.push(state);
    }

    pub fn map<U>(self, f: impl FnMut(S) -> U) -> Path<U> {
        Path {
            states: self.states.into_iter().map(f).collect(),
        }
    }
}

impl<S: PartialEq + Debug> Path<S> {
    pub fn concat(mut self, other: Path<S>, junction: Junction) -> Result<Path<S>, PathError> {
        match junction {
            Junction::Fresh => {
                self.states.extend(other.states);
                Ok(self)
            }
            Junction::Shared => {
                if self.last() != other.first() {
                    return Err(PathError::JunctionMismatch {
                        left: format!("{:?}", self.last()),
                        right: format!("{:?}", other.first()),
                    });
                }
                self.states.extend(other.states.into_iter().skip(1));
                Ok(self)
            }
        }
    }
}

impl<S: Clone + Eq + Hash + Debug> Path<S> {
    /// True iff every consecutive pair is a successor pair in `task`.
    pub fn is_valid_in<T: SearchTask<State = S>>(&self, task: &T) -> bool {
        let mut buf = Vec::new();
        self.states.windows(2).all(|pair| {
            buf.clear();
            task.successors(&pair[0], &mut buf);
            buf.contains(&pair[1])
        })
    }

    /// True iff the path starts at the initial state, is valid and ends in a goal.
    pub fn is_solution_of<T: SearchTask<State = S>>(&self, task: &T) -> bool {
        *self.first() == task.initial_state() && self.is_valid_in(task) && task.is_goal(self.last())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Solved,
    Exhausted,
    BudgetExceeded,
}

/// Per-run counters. Runtime is measured in goal tests.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub goal_tests: u64,
    /// Newly generated states; duplicates rejected by BrFS and successors pruned
    /// as recognised dead ends are not counted.
    pub generations: u64,
    pub heuristic_evals: u64,
    pub walks_started: u64,
    pub escape_searches: u64,
    pub solution_length: Option<u64>,
    pub terminated: Option<Termination>,
}

impl RunStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn solved(&self) -> bool {
        self.terminated == Some(Termination::Solved)
    }
}

/// A state annotated with its heuristic value. Equality and hashing ignore the
/// value, which is a function of the state.
#[derive(Clone, Debug)]
pub struct Scored<S> {
    pub state: S,
    pub h: HeuristicValue,
}

impl<S: PartialEq> PartialEq for Scored<S> {
    fn eq(&self, other: &Self) -> bool {
        self.state == other.state
    }
}

impl<S: Eq> Eq for Scored<S> {}

impl<S: Hash> Hash for Scored<S> {
    fn hash<H: Hasher>(&self, hasher: &mut H) {
        self.state.hash(hasher)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EscapeError {
    #[error("entry state is a recognised dead end (h = inf)")]
    DeadEnd,
}

/// The task of escaping the heuristic region around `entry`: same transitions,
/// rooted at `entry`, with a goal test that accepts real goals and any state
/// whose heuristic value is strictly below `h(entry)`.
///
/// Successors with an infinite heuristic value are pruned at generation.
pub struct EscapeTask<'a, T: SearchTask, H> {
    task: &'a T,
    heuristic: &'a H,
    root: Scored<T::State>,
    threshold: u64,
    evals: Cell<u64>,
}

pub fn make_escape_task<'a, T, H>(
    task: &'a T,
    heuristic: &'a H,
    entry: T::State,
) -> Result<EscapeTask<'a, T, H>, EscapeError>
where
    T: SearchTask,
    H: Heuristic<T::State>,
{
    let h = heuristic.evaluate(&entry);
    let threshold = h.finite().ok_or(EscapeError::DeadEnd)?;
    Ok(EscapeTask {
        task,
        heuristic,
        root: Scored { state: entry, h },
        threshold,
        evals: Cell::new(1),
    })
}

/// Like [`make_escape_task`] for an entry whose heuristic value is already
/// known; no evaluation is counted for it.
pub(crate) fn escape_task_from_scored<'a, T, H>(
    task: &'a T,
    heuristic: &'a H,
    entry: Scored<T::State>,
) -> Result<EscapeTask<'a, T, H>, EscapeError>
where
    T: SearchTask,
    H: Heuristic<T::State>,
{
    let threshold = entry.h.finite().ok_or(EscapeError::DeadEnd)?;
    Ok(EscapeTask {
        task,
        heuristic,
        root: entry,
        threshold,
        evals: Cell::new(0),
    })
}

impl<'a, T, H> EscapeTask<'a, T, H>
where
    T: SearchTask,
    H: Heuristic<T::State>,
{
    /// `h(entry)`.
    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    /// Heuristic evaluations performed so far, including the entry state.
    pub fn heuristic_evals(&self) -> u64 {
        self.evals.get()
    }

    pub fn score(&self, state: T::State) -> Scored<T::State> {
        self.evals.set(self.evals.get() + 1);
        let h = self.heuristic.evaluate(&state);
        Scored { state, h }
    }
}

impl<'a, T, H> SearchTask for EscapeTask<'a, T, H>
where
    T: SearchTask,
    H: Heuristic<T::State>,
{
    type State = Scored<T::State>;

    fn initial_state(&self) -> Self::State {
        self.root.clone()
    }

    fn successors(&self, state: &Self::State, out: &mut Vec<Self::State>) {
        let mut raw = Vec::new();
        self.task.successors(&state.state, &mut raw);
        for s in raw {
            let scored = self.score(s);
            if !scored.h.is_infinite() {
                out.push(scored);
            }
        }
    }

    fn is_goal(&self, state: &Self::State) -> bool {
        self.task.is_goal(&state.state) || state.h < HeuristicValue::Finite(self.threshold)
    }
}
