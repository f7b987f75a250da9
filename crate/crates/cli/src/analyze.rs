use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use uhrlab::analysis::{
    brfs_bounds, crossover_curves, expected_brfs, figure_1a, format_sig, goal_crossover_accurate,
    goal_crossover_simple, min_success_prob_for_crossover, rational_str, rrw_upper, AnalysisError,
    AnalysisInput, AnalysisResult,
};
use uhrlab::synthetic::{TaskSpec, TreeTaskSpec};
use uhrlab::DepthPolicy;

use crate::algo::Algo;
use crate::args::AnalyzeArgs;
use crate::simulate::{simulate, Experiment, Placement, SimulateSpec};
use crate::table::{emit, Table};
use crate::{load_spec, CliError};

/// A rational given as a JSON number or a string such as `"1/2"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(transparent)]
pub struct Rational(#[serde(with = "rational_str")] pub BigRational);

/// Monte-Carlo columns added to a 1a sweep for selected goal counts.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct MonteCarlo {
    pub trials: u64,
    pub goals: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct Figure1a {
    #[serde(default = "default_b")]
    pub b: u64,
    #[serde(default = "default_dstar")]
    pub dstar: u32,
    #[serde(default = "default_lengths")]
    pub lengths: Vec<u64>,
    /// Goal counts; all of `1..=b^dstar` when absent.
    #[serde(default)]
    pub goals: Option<Vec<u64>>,
    #[serde(default)]
    pub monte_carlo: Option<MonteCarlo>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct Crossover {
    #[serde(default = "default_b")]
    pub b: u64,
    #[serde(default = "default_dstars")]
    pub dstars: Vec<u32>,
    /// Walk-length errors `e`, with `ℓ = ceil((1 + e) d*)`.
    #[serde(default = "default_errors")]
    pub errors: Vec<Rational>,
}

/// `{"figure": "1a" | "1b" | "1c" | "formulas", ...}`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "figure")]
pub enum AnalyzeSpec {
    #[serde(rename = "1a")]
    Figure1a(Figure1a),
    #[serde(rename = "1b")]
    Figure1b(Crossover),
    #[serde(rename = "1c")]
    Figure1c(Crossover),
    /// Every closed form on one explicit set of symbols.
    #[serde(rename = "formulas")]
    Formulas(AnalysisInput),
}

fn default_b() -> u64 {
    4
}

fn default_dstar() -> u32 {
    6
}

fn default_lengths() -> Vec<u64> {
    vec![6, 9, 12]
}

fn default_dstars() -> Vec<u32> {
    (2..=10).collect()
}

fn default_errors() -> Vec<Rational> {
    [(0, 1), (1, 2), (1, 1)]
        .into_iter()
        .map(|(n, d)| Rational(BigRational::new(n.into(), d.into())))
        .collect()
}

fn dec(r: &BigRational) -> Value {
    Value::String(format_sig(r, 6))
}

fn dec_result(r: &AnalysisResult) -> Value {
    Value::String(r.decimal())
}

fn err(e: AnalysisError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Options for the Monte-Carlo columns.
#[derive(Clone, Copy, Debug)]
pub struct McOptions {
    pub seed: u64,
    pub jobs: Option<usize>,
}

fn figure1a_table(f: &Figure1a, mc: McOptions) -> Result<Table, CliError> {
    let size_at = AnalysisInput::tree(f.b, f.dstar, 1, f.dstar as u64)
        .map_err(err)?
        .size_at;
    let goals = f.goals.clone().unwrap_or_else(|| (1..=size_at).collect());
    let rows = figure_1a(f.b, f.dstar, &f.lengths, goals).map_err(err)?;

    let mut header = vec!["g".to_string(), "E_BrFS".to_string()];
    header.extend(f.lengths.iter().map(|l| format!("RRW_bound_l{l}")));
    header.push("brfs_floor".into());
    if f.monte_carlo.is_some() {
        header.extend(["mc_brfs_mean".to_string(), "mc_brfs_se".to_string()]);
        for l in &f.lengths {
            header.extend([format!("mc_rrw_l{l}_mean"), format!("mc_rrw_l{l}_se")]);
        }
    }
    let mut t = Table {
        header,
        ..Table::default()
    };
    for r in rows {
        let mut cells = vec![json!(r.g), dec(&r.expected_brfs)];
        cells.extend(r.rrw_bounds.iter().map(dec_result));
        cells.push(json!(r.brfs_floor));
        if let Some(m) = &f.monte_carlo {
            if m.goals.contains(&r.g) {
                cells.extend(monte_carlo_cells(f, m, r.g, mc)?);
            } else {
                cells.extend(std::iter::repeat_n(Value::Null, 2 * (f.lengths.len() + 1)));
            }
        }
        t.push(cells);
    }
    Ok(t)
}

/// Mean and SE of BrFS and each RRW length at `g`, per-trial placement.
fn monte_carlo_cells(f: &Figure1a, m: &MonteCarlo, g: u64, mc: McOptions) -> Result<Vec<Value>, CliError> {
    let spec = SimulateSpec {
        task: TaskSpec::Tree(TreeTaskSpec::new(f.b, f.dstar, g)),
        placement: Placement::PerTrial,
    };
    let mut algos = vec![Algo::Brfs];
    for &l in &f.lengths {
        algos.push(Algo::Rrw(DepthPolicy::constant(l).map_err(CliError::usage)?));
    }
    let mut cells = Vec::new();
    for algo in algos {
        let sim = simulate(&Experiment::new(spec.clone(), algo, m.trials, mc.seed), mc.jobs)?;
        let a = sim.aggregate("goal_tests");
        cells.push(a.mean_text().map_or(Value::Null, Value::String));
        cells.push(a.se_text().map_or(Value::Null, Value::String));
    }
    Ok(cells)
}

fn crossover_table(c: &Crossover, density: bool) -> Result<Table, CliError> {
    let errors: Vec<BigRational> = c.errors.iter().map(|r| r.0.clone()).collect();
    let rows = crossover_curves(c.b, c.dstars.iter().copied(), &errors).map_err(err)?;
    let mut t = if density {
        Table::new(&["dstar", "ell_error", "ell", "density_crossover"])
    } else {
        Table::new(&["dstar", "ell_error", "ell", "goal_crossover", "goal_crossover_ceil"])
    };
    for r in rows {
        let mut cells = vec![json!(r.dstar), dec(&r.ell_error), json!(r.ell)];
        if density {
            cells.push(dec(&r.density_crossover));
        } else {
            cells.push(dec(&r.goal_crossover));
            cells.push(Value::String(r.goal_crossover.ceil().to_integer().to_string()));
        }
        t.push(cells);
    }
    Ok(t)
}

fn formulas_table(input: &AnalysisInput) -> Result<Table, CliError> {
    input.validate().map_err(err)?;
    let mut t = Table::new(&["quantity", "value", "exact"]);
    let mut row = |name: &str, r: &AnalysisResult| {
        let exact = r.finite().map_or_else(|| "inf".to_string(), |q| q.to_string());
        t.push(vec![json!(name), dec_result(r), Value::String(exact)]);
    };
    let (lo, hi) = brfs_bounds(input.size_below, input.size_at);
    row("expected_brfs", &expected_brfs(input).map_err(err)?.into());
    row("brfs_min", &BigRational::from_integer(lo.into()).into());
    row("brfs_max", &BigRational::from_integer(hi.into()).into());
    row("success_prob", &input.success_prob().into());
    row("rrw_upper", &rrw_upper(input).map_err(err)?);
    row(
        "min_success_prob_for_crossover",
        &min_success_prob_for_crossover(input).map_err(err)?.into(),
    );
    let simple = goal_crossover_simple(input.size_below, input.size_at, input.walk_len, &input.reach_prob)
        .map_err(err)?;
    row("goal_crossover_simple", &simple);
    let accurate = goal_crossover_accurate(input.size_below, input.size_at, input.walk_len, &input.reach_prob)
        .map_err(err)?;
    row("kappa", &accurate.kappa);
    row("goal_crossover_accurate", &accurate.threshold);
    for (name, r) in [("goal_crossover_simple_ceil", &simple), ("goal_crossover_accurate_ceil", &accurate.threshold)] {
        if let Some(c) = r.ceil() {
            row(name, &BigRational::from_integer(c).into());
        }
    }
    Ok(t)
}

/// Builds the table for `spec`.
pub fn analyze(spec: &AnalyzeSpec, mc: McOptions) -> Result<Table, CliError> {
    match spec {
        AnalyzeSpec::Figure1a(f) => figure1a_table(f, mc),
        AnalyzeSpec::Figure1b(c) => crossover_table(c, false),
        AnalyzeSpec::Figure1c(c) => crossover_table(c, true),
        AnalyzeSpec::Formulas(input) => formulas_table(input),
    }
}

pub fn command(a: &AnalyzeArgs) -> Result<(), CliError> {
    let spec: AnalyzeSpec = load_spec(&a.spec)?;
    let table = analyze(
        &spec,
        McOptions {
            seed: a.seed,
            jobs: a.jobs,
        },
    )?;
    let mut meta = Map::new();
    meta.insert("seed".into(), json!(a.seed));
    emit(&table.render(a.format, meta), a.out.as_deref()).map_err(CliError::usage)
}
