use serde::{Deserialize, Serialize};

use super::{checked_pow, sample_distinct, SpecError, MAX_STATES};
use crate::rng::RngStream;
use crate::search::SearchTask;

/// Full tree with branching factor `b` and `g` goals among the `b^dstar`
/// states at depth `dstar`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeTaskSpec {
    pub b: u64,
    pub dstar: u32,
    pub g: u64,
    #[serde(default)]
    pub goal_seed: u64,
    /// Extra levels below `dstar`; zero makes depth-`dstar` states leaves.
    #[serde(default)]
    pub deeper_levels: u32,
    /// Extra goals placed uniformly on the deepest level (needs `deeper_levels > 0`).
    #[serde(default)]
    pub deep_goals: u64,
}

/// `n` successors of the initial state, `g` of them goals, nothing deeper.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarTaskSpec {
    pub n: u64,
    pub g: u64,
    #[serde(default)]
    pub goal_seed: u64,
}

/// Tree in which every non-root state above `dstar` is independently a dead end
/// (no successors) with probability `dead_prob`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeadLeafTreeSpec {
    pub b: u64,
    pub dstar: u32,
    pub g: u64,
    #[serde(default)]
    pub goal_seed: u64,
    pub dead_prob: f64,
    #[serde(default)]
    pub structure_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeState {
    pub depth: u32,
    pub index: u64,
}

#[derive(Clone, Debug)]
struct DeadLeaves {
    threshold: u64,
    seed: u64,
}

impl DeadLeaves {
    fn is_dead(&self, s: TreeState) -> bool {
        mix(self.seed ^ mix(((s.depth as u64) << 58) ^ s.index)) < self.threshold
    }
}

// splitmix64 finaliser
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A built tree task. Immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct TreeTask {
    b: u64,
    dstar: u32,
    max_depth: u32,
    goals: Vec<u64>,
    deep_goals: Vec<u64>,
    dead: Option<DeadLeaves>,
}

impl TreeTaskSpec {
    pub fn new(b: u64, dstar: u32, g: u64) -> Self {
        TreeTaskSpec {
            b,
            dstar,
            g,
            goal_seed: 0,
            deeper_levels: 0,
            deep_goals: 0,
        }
    }

    pub fn with_goal_seed(mut self, seed: u64) -> Self {
        self.goal_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.b == 0 {
            return Err(SpecError::TooSmall("b"));
        }
        if self.dstar == 0 {
            return Err(SpecError::TooSmall("dstar"));
        }
        if self.g == 0 {
            return Err(SpecError::TooSmall("g"));
        }
        let at = checked_pow(self.b, self.dstar)?;
        if self.g as u128 > at {
            return Err(SpecError::TooManyGoals {
                g: self.g,
                available: at,
                depth: self.dstar,
            });
        }
        let max_depth = self
            .dstar
            .checked_add(self.deeper_levels)
            .ok_or(SpecError::TooLarge)?;
        let mut total: u128 = 0;
        for d in 0..=max_depth {
            total += checked_pow(self.b, d)?;
            if total > MAX_STATES {
                return Err(SpecError::TooLarge);
            }
        }
        if self.deep_goals > 0 {
            if self.deeper_levels == 0 {
                return Err(SpecError::DeepGoalsWithoutLevels);
            }
            let bottom = checked_pow(self.b, max_depth)?;
            if self.deep_goals as u128 > bottom {
                return Err(SpecError::TooManyGoals {
                    g: self.deep_goals,
                    available: bottom,
                    depth: max_depth,
                });
            }
        }
        Ok(())
    }

    /// `|S_<d*|`: `(b^d* - 1)/(b - 1)`, or `d*` when `b = 1`.
    pub fn size_below(&self) -> u128 {
        (0..self.dstar).map(|d| (self.b as u128).pow(d)).sum()
    }

    /// `|S_d*| = b^d*`.
    pub fn size_at(&self) -> u128 {
        (self.b as u128).pow(self.dstar)
    }

    /// Builds the task with goals placed from `RngStream(goal_seed, 0)`.
    pub fn build(&self) -> Result<TreeTask, SpecError> {
        self.build_with(&mut RngStream::new(self.goal_seed, 0))
    }

    /// Builds the task drawing the goal placement from `rng`.
    pub fn build_with(&self, rng: &mut RngStream) -> Result<TreeTask, SpecError> {
        self.validate()?;
        let at = self.size_at() as u64;
        let goals = sample_distinct(at, self.g, rng);
        let max_depth = self.dstar + self.deeper_levels;
        let deep_goals = if self.deep_goals > 0 {
            sample_distinct(
                (self.b as u128).pow(max_depth) as u64,
                self.deep_goals,
                rng,
            )
        } else {
            Vec::new()
        };
        Ok(TreeTask {
            b: self.b,
            dstar: self.dstar,
            max_depth,
            goals,
            deep_goals,
            dead: None,
        })
    }
}

impl StarTaskSpec {
    pub fn new(n: u64, g: u64) -> Self {
        StarTaskSpec { n, g, goal_seed: 0 }
    }

    pub fn as_tree(&self) -> TreeTaskSpec {
        TreeTaskSpec::new(self.n, 1, self.g).with_goal_seed(self.goal_seed)
    }

    pub fn build(&self) -> Result<TreeTask, SpecError> {
        self.as_tree().build()
    }

    pub fn build_with(&self, rng: &mut RngStream) -> Result<TreeTask, SpecError> {
        self.as_tree().build_with(rng)
    }
}

impl DeadLeafTreeSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if !(0.0..1.0).contains(&self.dead_prob) {
            return Err(SpecError::BadProbability(self.dead_prob));
        }
        TreeTaskSpec::new(self.b, self.dstar, self.g).validate()
    }

    fn dead_leaves(&self) -> Option<DeadLeaves> {
        (self.dead_prob > 0.0).then_some(DeadLeaves {
            // q * 2^64, exact for the dyadic probabilities used in tests.
            threshold: (self.dead_prob * 18_446_744_073_709_551_616.0) as u64,
            seed: self.structure_seed,
        })
    }

    /// The tree structure with no goals placed yet (goal test always false).
    pub fn skeleton(&self) -> Result<TreeTask, SpecError> {
        self.validate()?;
        Ok(TreeTask {
            b: self.b,
            dstar: self.dstar,
            max_depth: self.dstar,
            goals: Vec::new(),
            deep_goals: Vec::new(),
            dead: self.dead_leaves(),
        })
    }

    pub fn build(&self) -> Result<TreeTask, SpecError> {
        self.build_with(&mut RngStream::new(self.goal_seed, 0))
    }

    /// Goals are drawn uniformly among the reachable depth-`dstar` states.
    pub fn build_with(&self, rng: &mut RngStream) -> Result<TreeTask, SpecError> {
        let mut task = self.skeleton()?;
        let reachable = task.reachable_at(self.dstar, super::DEFAULT_NODE_CAP)?;
        if self.g > reachable.len() as u64 {
            return Err(SpecError::UnreachableGoals {
                g: self.g,
                reachable: reachable.len() as u64,
                depth: self.dstar,
            });
        }
        let picks = sample_distinct(reachable.len() as u64, self.g, rng);
        task.goals = picks.into_iter().map(|i| reachable[i as usize]).collect();
        task.goals.sort_unstable();
        Ok(task)
    }
}

impl TreeTask {
    pub fn branching(&self) -> u64 {
        self.b
    }

    pub fn dstar(&self) -> u32 {
        self.dstar
    }

    /// Indices of the goal states at depth `dstar`, sorted.
    pub fn goals(&self) -> &[u64] {
        &self.goals
    }

    pub fn is_dead_end(&self, s: TreeState) -> bool {
        s.depth >= self.max_depth
            || (s.depth > 0 && s.depth < self.dstar && self.dead.as_ref().is_some_and(|d| d.is_dead(s)))
    }

    /// Indices of the reachable states at `depth`, in index order.
    pub fn reachable_at(&self, depth: u32, cap: u64) -> Result<Vec<u64>, SpecError> {
        let mut layer = vec![0u64];
        let mut visited = 1u64;
        for d in 0..depth {
            let mut next = Vec::new();
            for &index in &layer {
                if self.is_dead_end(TreeState { depth: d, index }) {
                    continue;
                }
                for c in 0..self.b {
                    next.push(index * self.b + c);
                }
            }
            visited += next.len() as u64;
            if visited > cap {
                return Err(SpecError::NodeCap { cap });
            }
            layer = next;
        }
        Ok(layer)
    }
}

impl SearchTask for TreeTask {
    type State = TreeState;

    fn initial_state(&self) -> TreeState {
        TreeState { depth: 0, index: 0 }
    }

    fn successors(&self, s: &TreeState, out: &mut Vec<TreeState>) {
        if self.is_dead_end(*s) {
            return;
        }
        let base = s.index * self.b;
        out.extend((0..self.b).map(|c| TreeState {
            depth: s.depth + 1,
            index: base + c,
        }));
    }

    fn is_goal(&self, s: &TreeState) -> bool {
        (s.depth == self.dstar && self.goals.binary_search(&s.index).is_ok())
            || (s.depth == self.max_depth
                && s.depth > self.dstar
                && self.deep_goals.binary_search(&s.index).is_ok())
    }
}
