use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::SpecError;
use crate::search::SearchTask;

/// Default bound on the number of states an exhaustive computation may visit.
pub const DEFAULT_NODE_CAP: u64 = 20_000_000;

/// State counts strictly above and exactly at a given depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Census {
    pub below: u64,
    pub at: u64,
}

/// Layered breadth-first traversal counting distinct states by depth.
pub fn census<T: SearchTask>(task: &T, depth: u32, cap: u64) -> Result<Census, SpecError> {
    let mut seen = HashSet::new();
    let root = task.initial_state();
    seen.insert(root.clone());
    let mut layer = vec![root];
    let mut below = 0u64;
    let mut buf = Vec::new();
    for _ in 0..depth {
        below += layer.len() as u64;
        let mut next = Vec::new();
        for s in &layer {
            buf.clear();
            task.successors(s, &mut buf);
            for c in buf.drain(..) {
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
            if seen.len() as u64 > cap {
                return Err(SpecError::NodeCap { cap });
            }
        }
        layer = next;
    }
    Ok(Census {
        below,
        at: layer.len() as u64,
    })
}

fn ratio(num: BigRational, den: usize) -> BigRational {
    num / BigInt::from(den)
}

/// Probability that an unbiased walk from the initial state survives to
/// `depth` transitions without hitting a state that has no successors.
pub fn exact_reach_prob<T: SearchTask>(
    task: &T,
    depth: u32,
    cap: u64,
) -> Result<BigRational, SpecError> {
    let mut visited = 0u64;
    reach(task, &task.initial_state(), depth, cap, &mut visited)
}

fn reach<T: SearchTask>(
    task: &T,
    s: &T::State,
    remaining: u32,
    cap: u64,
    visited: &mut u64,
) -> Result<BigRational, SpecError> {
    *visited += 1;
    if *visited > cap {
        return Err(SpecError::NodeCap { cap });
    }
    if remaining == 0 {
        return Ok(BigRational::one());
    }
    let mut succ = Vec::new();
    task.successors(s, &mut succ);
    if succ.is_empty() {
        return Ok(BigRational::zero());
    }
    let mut sum = BigRational::zero();
    for c in &succ {
        sum += reach(task, c, remaining - 1, cap, visited)?;
    }
    Ok(ratio(sum, succ.len()))
}

/// Probability that an unbiased walk of at most `len` steps from the
/// initial state samples a goal. The initial state itself is not counted.
pub fn exact_success_prob<T: SearchTask>(
    task: &T,
    len: u32,
    cap: u64,
) -> Result<BigRational, SpecError> {
    let mut visited = 0u64;
    success(task, &task.initial_state(), len, cap, &mut visited)
}

fn success<T: SearchTask>(
    task: &T,
    s: &T::State,
    remaining: u32,
    cap: u64,
    visited: &mut u64,
) -> Result<BigRational, SpecError> {
    *visited += 1;
    if *visited > cap {
        return Err(SpecError::NodeCap { cap });
    }
    if remaining == 0 {
        return Ok(BigRational::zero());
    }
    let mut succ = Vec::new();
    task.successors(s, &mut succ);
    if succ.is_empty() {
        return Ok(BigRational::zero());
    }
    let mut sum = BigRational::zero();
    for c in &succ {
        if task.is_goal(c) {
            sum += BigRational::one();
        } else {
            sum += success(task, c, remaining - 1, cap, visited)?;
        }
    }
    Ok(ratio(sum, succ.len()))
}
