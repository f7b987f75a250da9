use std::fmt;
use std::str::FromStr;

use uhrlab::{Budget, DepthPolicy, EscapeStrategy};

/// Generation cap applied to walk-based algorithms unless overridden.
pub const DEFAULT_MAX_GENERATIONS: u64 = 100_000_000;
/// Walk cap applied to walk-based algorithms unless overridden.
pub const DEFAULT_MAX_WALKS: u64 = 1_000_000;

/// Algorithm selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Brfs,
    Rrw(DepthPolicy),
    Ehc(EscapeStrategy),
}

impl Algo {
    /// Whether the algorithm restarts random walks and so needs a finite budget.
    pub fn uses_walks(&self) -> bool {
        matches!(
            self,
            Algo::Rrw(_) | Algo::Ehc(EscapeStrategy::Rrw(_))
        )
    }
}

/// Budget from the command-line caps. Walk-based algorithms get finite
/// defaults; the others are unlimited unless a cap is given.
pub fn resolve_budget(algo: Algo, max_generations: Option<u64>, max_walks: Option<u64>) -> Budget {
    let (g, w) = if algo.uses_walks() {
        (
            Some(max_generations.unwrap_or(DEFAULT_MAX_GENERATIONS)),
            Some(max_walks.unwrap_or(DEFAULT_MAX_WALKS)),
        )
    } else {
        (max_generations, max_walks)
    };
    Budget {
        max_generations: g,
        max_walks: w,
    }
}

fn policy(kind: &str, n: &str) -> Result<DepthPolicy, String> {
    let n: u64 = n
        .parse()
        .map_err(|_| format!("expected a positive integer, got {n:?}"))?;
    let p = match kind {
        "crrw" => DepthPolicy::constant(n),
        "luby" => DepthPolicy::luby(n),
        _ => unreachable!(),
    };
    p.map_err(|e| e.to_string())
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || {
            format!("unknown algorithm {s:?}; expected brfs, crrw:L, luby:M, ehc:brfs, ehc:crrw:L or ehc:luby:M")
        };
        match parts.as_slice() {
            ["brfs"] => Ok(Algo::Brfs),
            [k @ ("crrw" | "luby"), n] => Ok(Algo::Rrw(policy(k, n)?)),
            ["ehc", "brfs"] => Ok(Algo::Ehc(EscapeStrategy::Brfs)),
            ["ehc", k @ ("crrw" | "luby"), n] => Ok(Algo::Ehc(EscapeStrategy::Rrw(policy(k, n)?))),
            _ => Err(bad()),
        }
    }
}

fn fmt_policy(p: &DepthPolicy) -> String {
    match p {
        DepthPolicy::Constant(l) => format!("crrw:{l}"),
        DepthPolicy::Luby(m) => format!("luby:{m}"),
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algo::Brfs => f.write_str("brfs"),
            Algo::Rrw(p) => f.write_str(&fmt_policy(p)),
            Algo::Ehc(EscapeStrategy::Brfs) => f.write_str("ehc:brfs"),
            Algo::Ehc(EscapeStrategy::Rrw(p)) => write!(f, "ehc:{}", fmt_policy(p)),
        }
    }
}
