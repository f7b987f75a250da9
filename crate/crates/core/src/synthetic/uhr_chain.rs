use serde::{Deserialize, Serialize};

use super::{checked_pow, sample_distinct, SpecError};
use crate::rng::RngStream;
use crate::search::{HeuristicValue, SearchTask};

/// A chain of `k` unrecognized heuristic regions. Inside region `i`
/// (0-based) every state has heuristic value `k - i`; the region is a tree of
/// branching `b` whose depth-`exit_depth` frontier holds `exit_count` escape
/// states. Each escape is the root of the next region, and the escapes of
/// the last region are goals. Non-escape frontier states have no successors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UhrChainSpec {
    pub k: u32,
    /// One entry per region, or a single entry used for all of them.
    pub levels: Vec<UhrLevel>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UhrLevel {
    pub b: u64,
    /// Transitions from the region root to its escape states.
    pub exit_depth: u32,
    pub exit_count: u64,
}

/// State: indices of the escapes taken so far plus the position inside the
/// current region. Together these spell out the child-index path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UhrState {
    pub escapes: Vec<u64>,
    pub depth: u32,
    pub index: u64,
}

impl UhrState {
    pub fn region(&self) -> usize {
        self.escapes.len()
    }
}

#[derive(Clone, Debug)]
struct Region {
    b: u64,
    exit_depth: u32,
    exits: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct UhrChainTask {
    regions: Vec<Region>,
}

/// The chain's heuristic: `k - region`.
#[derive(Clone, Copy, Debug)]
pub struct UhrHeuristic {
    k: u32,
}

impl UhrHeuristic {
    pub fn value(&self, s: &UhrState) -> HeuristicValue {
        HeuristicValue::Finite((self.k as u64).saturating_sub(s.region() as u64))
    }
}

impl crate::search::Heuristic<UhrState> for UhrHeuristic {
    fn evaluate(&self, s: &UhrState) -> HeuristicValue {
        self.value(s)
    }
}

impl UhrChainSpec {
    pub fn uniform(k: u32, level: UhrLevel, seed: u64) -> Self {
        UhrChainSpec {
            k,
            levels: vec![level],
            seed,
        }
    }

    pub fn level(&self, i: usize) -> UhrLevel {
        if self.levels.len() == 1 {
            self.levels[0]
        } else {
            self.levels[i]
        }
    }

    /// Largest exit depth over all regions.
    pub fn max_exit_depth(&self) -> u32 {
        (0..self.k as usize)
            .map(|i| self.level(i).exit_depth)
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.k == 0 {
            return Err(SpecError::TooSmall("k"));
        }
        if self.levels.len() != 1 && self.levels.len() != self.k as usize {
            return Err(SpecError::LevelCount {
                k: self.k,
                levels: self.levels.len(),
            });
        }
        for i in 0..self.k as usize {
            let l = self.level(i);
            if l.b == 0 {
                return Err(SpecError::TooSmall("b"));
            }
            if l.exit_depth == 0 {
                return Err(SpecError::TooSmall("exit_depth"));
            }
            if l.exit_count == 0 {
                return Err(SpecError::TooSmall("exit_count"));
            }
            let frontier = checked_pow(l.b, l.exit_depth)?;
            if l.exit_count as u128 > frontier {
                return Err(SpecError::TooManyExits {
                    level: i,
                    x: l.exit_count,
                    available: frontier,
                });
            }
        }
        Ok(())
    }

    /// Builds the task and its heuristic. Region `i` draws its escape set
    /// from `RngStream(seed, i)`.
    pub fn build(&self) -> Result<(UhrChainTask, UhrHeuristic), SpecError> {
        self.validate()?;
        let regions = (0..self.k as usize)
            .map(|i| {
                let l = self.level(i);
                let frontier = (l.b as u128).pow(l.exit_depth) as u64;
                let mut rng = RngStream::new(self.seed, i as u64);
                Region {
                    b: l.b,
                    exit_depth: l.exit_depth,
                    exits: sample_distinct(frontier, l.exit_count, &mut rng),
                }
            })
            .collect();
        Ok((UhrChainTask { regions }, UhrHeuristic { k: self.k }))
    }
}

impl UhrChainTask {
    pub fn regions(&self) -> usize {
        self.regions.len()
    }
}

impl SearchTask for UhrChainTask {
    type State = UhrState;

    fn initial_state(&self) -> UhrState {
        UhrState {
            escapes: Vec::new(),
            depth: 0,
            index: 0,
        }
    }

    fn successors(&self, s: &UhrState, out: &mut Vec<UhrState>) {
        let Some(r) = self.regions.get(s.region()) else {
            return;
        };
        if s.depth >= r.exit_depth {
            return;
        }
        let depth = s.depth + 1;
        for c in 0..r.b {
            let index = s.index * r.b + c;
            if depth == r.exit_depth && r.exits.binary_search(&index).is_ok() {
                let mut escapes = s.escapes.clone();
                escapes.push(index);
                out.push(UhrState {
                    escapes,
                    depth: 0,
                    index: 0,
                });
            } else {
                out.push(UhrState {
                    escapes: s.escapes.clone(),
                    depth,
                    index,
                });
            }
        }
    }

    fn is_goal(&self, s: &UhrState) -> bool {
        s.region() == self.regions.len()
    }
}
