//! Closed-form expected runtimes, bounds and crossover thresholds for BrFS
//! and constant-depth restarting random walks, in exact rational arithmetic.
//!
//! Notation: `N = |S_<d*|` states strictly above the goal depth, `D = |S_d*|`
//! states at it, `g` goals among them, `ℓ` the walk length, `p_g` the
//! success probability of one walk and `p_d*` the probability that a walk
//! reaches the goal depth.

mod figures;
mod value;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use figures::{crossover_curves, figure_1a, CrossoverRow, Figure1aRow};
pub use value::{
    format_f64, format_fraction, format_sig, option_rational_str, parse_rational, ratio_to_f64, rational_str, AnalysisResult,
};
use value::int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("goal count must be at least 1")]
    ZeroGoals,
    #[error("goal count {g} exceeds the {size_at} states at the goal depth")]
    TooManyGoals { g: u64, size_at: u64 },
    #[error("{0} must be at least 1")]
    TooSmall(&'static str),
    #[error("branching factor must be at least 2")]
    Branching,
    #[error("walk length {ell} is shorter than the goal depth {dstar}")]
    WalkTooShort { ell: u64, dstar: u32 },
    #[error("probability {0} is outside [0, 1]")]
    Probability(String),
    #[error("requires 1 <= g < n, got n = {n}, g = {g}")]
    DepthOneHypothesis { n: u64, g: u64 },
    #[error("requires N >= 1, D >= 1, L >= 2")]
    GapHypothesis,
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error("b^dstar overflows")]
    Overflow,
}

/// The symbols a closed form is evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisInput {
    pub size_below: u64,
    pub size_at: u64,
    pub goals: u64,
    pub walk_len: u64,
    #[serde(with = "rational_str", default = "one")]
    pub reach_prob: BigRational,
    /// Explicit `p_g`; when absent it is derived as `p_d* g / D` (zero for `ℓ < d*`).
    #[serde(with = "option_rational_str", default, skip_serializing_if = "Option::is_none")]
    pub success_prob: Option<BigRational>,
    pub dstar: u32,
    #[serde(with = "rational_str", default = "zero")]
    pub ell_error: BigRational,
}

fn one() -> BigRational {
    BigRational::one()
}

fn zero() -> BigRational {
    BigRational::zero()
}

impl AnalysisInput {
    /// Full tree with branching `b`, goals uniformly at depth `dstar`.
    pub fn tree(b: u64, dstar: u32, goals: u64, walk_len: u64) -> Result<Self, AnalysisError> {
        if b < 2 {
            return Err(AnalysisError::Branching);
        }
        let at = (b as u128).checked_pow(dstar).ok_or(AnalysisError::Overflow)?;
        let size_at = u64::try_from(at).map_err(|_| AnalysisError::Overflow)?;
        let size_below = ((at - 1) / (b as u128 - 1)) as u64;
        let input = AnalysisInput {
            size_below,
            size_at,
            goals,
            walk_len,
            reach_prob: one(),
            success_prob: None,
            dstar,
            ell_error: zero(),
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.goals == 0 {
            return Err(AnalysisError::ZeroGoals);
        }
        if self.goals > self.size_at {
            return Err(AnalysisError::TooManyGoals {
                g: self.goals,
                size_at: self.size_at,
            });
        }
        if self.walk_len == 0 {
            return Err(AnalysisError::TooSmall("walk_len"));
        }
        if self.size_below == 0 {
            return Err(AnalysisError::TooSmall("size_below"));
        }
        check_prob(&self.reach_prob)?;
        if let Some(p) = &self.success_prob {
            check_prob(p)?;
        }
        Ok(())
    }

    /// `p_g`, explicit or derived.
    pub fn success_prob(&self) -> BigRational {
        match &self.success_prob {
            Some(p) => p.clone(),
            None if self.walk_len < self.dstar as u64 => zero(),
            None => &self.reach_prob * int(self.goals) / int(self.size_at),
        }
    }

    pub fn with_success_prob(mut self, p: BigRational) -> Self {
        self.success_prob = Some(p);
        self
    }
}

fn check_prob(p: &BigRational) -> Result<(), AnalysisError> {
    if *p < zero() || *p > one() {
        return Err(AnalysisError::Probability(p.to_string()));
    }
    Ok(())
}

/// Expected BrFS goal tests with goals uniform at the goal depth:
/// `N + (D + 1)/(g + 1)`.
pub fn expected_brfs(input: &AnalysisInput) -> Result<BigRational, AnalysisError> {
    input.validate()?;
    Ok(int(input.size_below) + int(input.size_at + 1) / int(input.goals + 1))
}

/// Best and worst case BrFS goal tests: `(N + 1, N + D)`.
pub fn brfs_bounds(size_below: u64, size_at: u64) -> (u128, u128) {
    (
        size_below as u128 + 1,
        size_below as u128 + size_at as u128,
    )
}

/// Upper bound `ℓ/p_g + 1` on the expected RRW goal tests; infinite when `p_g = 0`.
pub fn rrw_upper(input: &AnalysisInput) -> Result<AnalysisResult, AnalysisError> {
    input.validate()?;
    let p = input.success_prob();
    if p.is_zero() {
        return Ok(AnalysisResult::Infinite);
    }
    Ok(AnalysisResult::Finite(int(input.walk_len) / p + one()))
}

/// Both tree closed forms with `p_g = g/b^d*`.
pub fn tree_expectations(
    b: u64,
    dstar: u32,
    g: u64,
    walk_len: u64,
) -> Result<(BigRational, AnalysisResult), AnalysisError> {
    if walk_len < dstar as u64 {
        return Err(AnalysisError::WalkTooShort {
            ell: walk_len,
            dstar,
        });
    }
    let input = AnalysisInput::tree(b, dstar, g, walk_len)?;
    Ok((expected_brfs(&input)?, rrw_upper(&input)?))
}

/// Smallest `p_g` for which the RRW bound does not exceed the BrFS
/// expectation: `ℓ / (N + (D + 1)/(g + 1) - 1)`.
pub fn min_success_prob_for_crossover(input: &AnalysisInput) -> Result<BigRational, AnalysisError> {
    let denom = expected_brfs(input)? - one();
    assert!(denom > zero(), "N >= 1 keeps the denominator positive");
    Ok(int(input.walk_len) / denom)
}

/// Goal count above which RRW is at least as fast as BrFS on a tree:
/// `ℓ D / (p_d* N)`.
pub fn goal_crossover_simple(
    size_below: u64,
    size_at: u64,
    walk_len: u64,
    reach_prob: &BigRational,
) -> Result<AnalysisResult, AnalysisError> {
    check_prob(reach_prob)?;
    if size_below == 0 {
        return Err(AnalysisError::TooSmall("size_below"));
    }
    if reach_prob.is_zero() {
        return Ok(AnalysisResult::Infinite);
    }
    Ok(AnalysisResult::Finite(
        int(walk_len) * int(size_at) / (reach_prob * int(size_below)),
    ))
}

/// Crossover threshold with the correction term `kappa` for the work BrFS
/// does at the goal depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AccurateCrossover {
    pub kappa: AnalysisResult,
    pub threshold: AnalysisResult,
}

/// `kappa = max(1, (D + 1)/(ℓD/(p_d* N) + 1))`, threshold `ℓD/(p_d*(N + kappa - 1))`.
pub fn goal_crossover_accurate(
    size_below: u64,
    size_at: u64,
    walk_len: u64,
    reach_prob: &BigRational,
) -> Result<AccurateCrossover, AnalysisError> {
    let simple = goal_crossover_simple(size_below, size_at, walk_len, reach_prob)?;
    let AnalysisResult::Finite(simple) = simple else {
        return Ok(AccurateCrossover {
            kappa: AnalysisResult::Finite(one()),
            threshold: AnalysisResult::Infinite,
        });
    };
    let kappa = (int(size_at + 1) / (simple + one())).max(one());
    let threshold =
        int(walk_len) * int(size_at) / (reach_prob * (int(size_below) + &kappa - one()));
    Ok(AccurateCrossover {
        kappa: AnalysisResult::Finite(kappa),
        threshold: AnalysisResult::Finite(threshold),
    })
}

/// Goal depth one with `g < n` goals among the `n` successors of the
/// initial state: returns the BrFS expectation `1 + (n + 1)/(g + 1)` and the
/// exact RRW expectation `1 + n/g`, the first always strictly smaller.
pub fn check_depth1_dominance(n: u64, g: u64) -> Result<(BigRational, BigRational), AnalysisError> {
    if g == 0 || g >= n {
        return Err(AnalysisError::DepthOneHypothesis { n, g });
    }
    let brfs = one() + int(n + 1) / int(g + 1);
    let rrw = one() + int(n) / int(g);
    assert!(brfs < rrw, "x/y > (x+1)/(y+1) for x > y > 0");
    Ok((brfs, rrw))
}

/// Sufficient condition for RRW to beat BrFS when every goal-depth state
/// is a goal: `p_d* >= d*/N`.
pub fn check_all_goals_condition(dstar: u32, size_below: u64, reach_prob: &BigRational) -> bool {
    if size_below == 0 {
        return false;
    }
    reach_prob * int(size_below) >= int(dstar)
}

/// `f(g) = N + (D + 1)/(g + 1) - L D/g - 1`, the BrFS/RRW gap as a function of `g`.
pub fn gap_function(n: u64, d: u64, l: &BigRational, g: u64) -> BigRational {
    int(n) + int(d + 1) / int(g + 1) - l * int(d) / int(g) - one()
}

/// Checks by exact finite differences that `f` strictly increases over
/// consecutive integers of `g_range`.
pub fn derivative_positivity_check(
    n: u64,
    d: u64,
    l: u64,
    g_range: std::ops::RangeInclusive<u64>,
) -> Result<bool, AnalysisError> {
    if n < 1 || d < 1 || l < 2 || *g_range.start() == 0 {
        return Err(AnalysisError::GapHypothesis);
    }
    let l = int(l);
    let mut prev: Option<BigRational> = None;
    for g in g_range {
        let f = gap_function(n, d, &l, g);
        if prev.as_ref().is_some_and(|p| f <= *p) {
            return Ok(false);
        }
        prev = Some(f);
    }
    Ok(true)
}

/// `ceil((1 + e) d*)`, at least 1.
pub fn walk_len_for_error(dstar: u32, ell_error: &BigRational) -> u64 {
    let ell = ((one() + ell_error) * int(dstar)).ceil().to_integer();
    ell.max(BigInt::one()).try_into().unwrap_or(u64::MAX)
}
