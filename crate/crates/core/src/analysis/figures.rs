use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::value::int;
use super::{
    expected_brfs, rational_str, rrw_upper, walk_len_for_error, AnalysisError, AnalysisInput, AnalysisResult,
};

/// Expected runtimes for one goal count on a full tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure1aRow {
    pub g: u64,
    #[serde(with = "rational_str")]
    pub expected_brfs: BigRational,
    /// RRW upper bound per requested walk length, in request order.
    pub rrw_bounds: Vec<AnalysisResult>,
    /// `|S_<d*|`, the floor BrFS never goes below.
    pub brfs_floor: u64,
}

/// BrFS expectation and RRW bounds against `g` on a tree of branching `b`.
pub fn figure_1a(
    b: u64,
    dstar: u32,
    lengths: &[u64],
    goals: impl IntoIterator<Item = u64>,
) -> Result<Vec<Figure1aRow>, AnalysisError> {
    let mut rows = Vec::new();
    for g in goals {
        let base = AnalysisInput::tree(b, dstar, g, dstar as u64)?;
        let rrw_bounds = lengths
            .iter()
            .map(|&ell| {
                rrw_upper(&AnalysisInput {
                    walk_len: ell,
                    ..base.clone()
                })
            })
            .collect::<Result<_, _>>()?;
        rows.push(Figure1aRow {
            g,
            expected_brfs: expected_brfs(&base)?,
            rrw_bounds,
            brfs_floor: base.size_below,
        });
    }
    Ok(rows)
}

/// Goal and density crossover at one goal depth and walk-length error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossoverRow {
    pub dstar: u32,
    #[serde(with = "rational_str")]
    pub ell_error: BigRational,
    pub ell: u64,
    /// `ℓ (b - 1) b^d / (b^d - 1)`.
    #[serde(with = "rational_str")]
    pub goal_crossover: BigRational,
    /// `goal_crossover / b^d`.
    #[serde(with = "rational_str")]
    pub density_crossover: BigRational,
}

/// Crossover points on full trees with `ℓ = ceil((1 + e) d*)`, ordered by
/// error then depth.
pub fn crossover_curves(
    b: u64,
    dstars: impl IntoIterator<Item = u32> + Clone,
    ell_errors: &[BigRational],
) -> Result<Vec<CrossoverRow>, AnalysisError> {
    if b < 2 {
        return Err(AnalysisError::Branching);
    }
    let mut rows = Vec::new();
    for e in ell_errors {
        for dstar in dstars.clone() {
            if dstar == 0 {
                return Err(AnalysisError::TooSmall("dstar"));
            }
            let bd = (b as u128).checked_pow(dstar).ok_or(AnalysisError::Overflow)?;
            let ell = walk_len_for_error(dstar, e);
            let bd = int(bd);
            let goal_crossover = int(ell) * int(b - 1) * &bd / (&bd - BigRational::one());
            let density_crossover = &goal_crossover / &bd;
            rows.push(CrossoverRow {
                dstar,
                ell_error: e.clone(),
                ell,
                goal_crossover,
                density_crossover,
            });
        }
    }
    Ok(rows)
}
