//! Search algorithms. Every entry point tests the initial state exactly once
//! and every newly generated state exactly once, so that
//! `goal_tests == generations + 1` holds for all of them.

mod brfs;
mod ehc;
mod luby;
mod walk;

use std::num::NonZeroU64;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::{Path, RunStats, Termination};

pub use brfs::brfs;
pub use ehc::{ehc, EscapeStrategy};
pub use luby::{luby, LubyError};
pub use walk::{random_walk, rrw, DepthPolicy, WalkEnd, WalkResult};

pub(crate) use brfs::brfs_from;
pub(crate) use walk::rrw_from;

/// Result of a top-level search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<S> {
    Solved(Path<S>),
    /// The search space was exhausted without reaching a goal.
    NoSolution,
    BudgetExceeded,
}

impl<S> Outcome<S> {
    pub fn path(&self) -> Option<&Path<S>> {
        match self {
            Outcome::Solved(p) => Some(p),
            _ => None,
        }
    }

    pub fn into_path(self) -> Option<Path<S>> {
        match self {
            Outcome::Solved(p) => Some(p),
            _ => None,
        }
    }

    pub fn termination(&self) -> Termination {
        match self {
            Outcome::Solved(_) => Termination::Solved,
            Outcome::NoSolution => Termination::Exhausted,
            Outcome::BudgetExceeded => Termination::BudgetExceeded,
        }
    }

    pub(crate) fn record(self, stats: &mut RunStats) -> Self {
        stats.terminated = Some(self.termination());
        stats.solution_length = self.path().map(|p| p.transitions() as u64);
        self
    }
}

/// Resource caps. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_generations: Option<u64>,
    pub max_walks: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn generations(n: u64) -> Self {
        Budget {
            max_generations: Some(n),
            max_walks: None,
        }
    }

    pub fn walks(n: u64) -> Self {
        Budget {
            max_generations: None,
            max_walks: Some(n),
        }
    }

    pub fn with_max_walks(mut self, n: u64) -> Self {
        self.max_walks = Some(n);
        self
    }

    pub fn with_max_generations(mut self, n: u64) -> Self {
        self.max_generations = Some(n);
        self
    }

    /// True when generating one more state would exceed the cap.
    pub(crate) fn generations_spent(&self, stats: &RunStats) -> bool {
        self.max_generations
            .is_some_and(|cap| stats.generations >= cap)
    }

    pub(crate) fn walks_spent(&self, stats: &RunStats) -> bool {
        self.max_walks.is_some_and(|cap| stats.walks_started >= cap)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("walk length must be at least 1")]
    ZeroLength,
    #[error("Luby multiplier must be at least 1")]
    ZeroMultiplier,
}

pub(crate) fn nonzero(v: u64, err: PolicyError) -> Result<NonZeroU64, PolicyError> {
    NonZeroU64::new(v).ok_or(err)
}
