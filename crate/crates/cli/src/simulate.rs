use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use uhrlab::analysis::{format_f64, format_fraction, rrw_upper, AnalysisInput, AnalysisResult};
use uhrlab::rng::PLACEMENT_STREAM_OFFSET;
use uhrlab::synthetic::{SpecError, TaskSpec, UhrChainTask, UhrHeuristic};
use uhrlab::{
    brfs, ehc, rrw, Budget, DepthPolicy, RngStream, RunStats, TreeTask,
};

use crate::algo::{resolve_budget, Algo};
use crate::args::SimulateArgs;
use crate::table::{emit, Table};
use crate::{load_spec, pool, CliError};

/// Where goals come from in each trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// One instance built from the task's own goal seed, shared by all trials.
    #[default]
    Fixed,
    /// Trial `i` draws its goals from `RngStream(seed, 2^32 + i)`.
    PerTrial,
}

/// `{"tree": {...}, "placement": "per_trial"}` and friends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateSpec {
    #[serde(flatten)]
    pub task: TaskSpec,
    #[serde(default)]
    pub placement: Placement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub spec: SimulateSpec,
    pub algo: Algo,
    pub trials: u64,
    pub seed: u64,
    pub budget: Budget,
}

impl Experiment {
    /// Experiment with the default budget for `algo`.
    pub fn new(spec: SimulateSpec, algo: Algo, trials: u64, seed: u64) -> Self {
        Experiment {
            spec,
            algo,
            trials,
            seed,
            budget: resolve_budget(algo, None, None),
        }
    }
}

enum Built {
    Tree(TreeTask),
    Chain(UhrChainTask, UhrHeuristic),
}

fn build(task: &TaskSpec, rng: Option<&mut RngStream>) -> Result<Built, SpecError> {
    Ok(match (task, rng) {
        (TaskSpec::Tree(s), None) => Built::Tree(s.build()?),
        (TaskSpec::Tree(s), Some(r)) => Built::Tree(s.build_with(r)?),
        (TaskSpec::Star(s), None) => Built::Tree(s.build()?),
        (TaskSpec::Star(s), Some(r)) => Built::Tree(s.build_with(r)?),
        (TaskSpec::DeadLeafTree(s), None) => Built::Tree(s.build()?),
        (TaskSpec::DeadLeafTree(s), Some(r)) => Built::Tree(s.build_with(r)?),
        (TaskSpec::UhrChain(s), rng) => {
            let mut s = s.clone();
            if let Some(r) = rng {
                s.seed = r.next_u64();
            }
            let (t, h) = s.build()?;
            Built::Chain(t, h)
        }
    })
}

fn run_on(built: &Built, algo: Algo, rng: &mut RngStream, budget: &Budget) -> RunStats {
    let mut stats = RunStats::new();
    match (built, algo) {
        (Built::Tree(t), Algo::Brfs) => {
            brfs(t, rng, budget, &mut stats);
        }
        (Built::Tree(t), Algo::Rrw(p)) => {
            rrw(t, p, rng, budget, &mut stats);
        }
        (Built::Chain(t, _), Algo::Brfs) => {
            brfs(t, rng, budget, &mut stats);
        }
        (Built::Chain(t, _), Algo::Rrw(p)) => {
            rrw(t, p, rng, budget, &mut stats);
        }
        (Built::Chain(t, h), Algo::Ehc(s)) => {
            ehc(t, h, s, rng, budget, &mut stats);
        }
        (Built::Tree(_), Algo::Ehc(_)) => unreachable!("rejected before running"),
    }
    stats
}

/// Trial results in trial order.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub experiment: Experiment,
    pub rows: Vec<RunStats>,
    pub warnings: Vec<String>,
}

/// Count, sum and sum of squares of one metric; everything else derives
/// from these exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Aggregate {
    pub metric: &'static str,
    pub n: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl Aggregate {
    pub fn of(metric: &'static str, values: impl IntoIterator<Item = u64>) -> Self {
        let mut a = Aggregate {
            metric,
            n: 0,
            sum: 0,
            sum_sq: 0,
        };
        for v in values {
            a.n += 1;
            a.sum += v as u128;
            a.sum_sq += (v as u128) * (v as u128);
        }
        a
    }

    pub fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum as f64 / self.n as f64)
    }

    /// Sample standard deviation.
    pub fn sd(&self) -> Option<f64> {
        if self.n < 2 {
            return None;
        }
        let n = self.n as u128;
        // n * sum_sq - sum^2 is exact and non-negative.
        let num = n * self.sum_sq - self.sum * self.sum;
        Some((num as f64 / (n * (n - 1)) as f64).sqrt())
    }

    pub fn se(&self) -> Option<f64> {
        self.sd().map(|sd| sd / (self.n as f64).sqrt())
    }

    /// The exact mean `sum / n` to 6 significant digits.
    pub fn mean_text(&self) -> Option<String> {
        (self.n > 0).then(|| format_fraction(self.sum, self.n as u128, 6))
    }

    pub fn se_text(&self) -> Option<String> {
        self.se().map(|x| format_f64(x, 6))
    }

    fn cells(&self) -> Vec<Value> {
        let text = |s: Option<String>| s.map_or(Value::Null, Value::String);
        vec![
            json!(self.metric),
            json!(self.n),
            Value::String(self.sum.to_string()),
            text(self.mean_text()),
            text(self.sd().map(|x| format_f64(x, 6))),
            text(self.se_text()),
        ]
    }
}

pub const ROW_HEADER: [&str; 7] = [
    "trial",
    "seed",
    "goal_tests",
    "generations",
    "walks",
    "solved",
    "solution_length",
];

pub const FOOTER_HEADER: [&str; 6] = ["metric", "n", "sum", "mean", "sd", "se"];

impl Simulation {
    pub fn solved(&self) -> impl Iterator<Item = &RunStats> {
        self.rows.iter().filter(|r| r.solved())
    }

    /// Runtime metrics over solved trials, then the solved indicator over
    /// all trials.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        vec![
            Aggregate::of("goal_tests", self.solved().map(|r| r.goal_tests)),
            Aggregate::of("generations", self.solved().map(|r| r.generations)),
            Aggregate::of("walks", self.solved().map(|r| r.walks_started)),
            Aggregate::of(
                "solution_length",
                self.solved().filter_map(|r| r.solution_length),
            ),
            Aggregate::of("solved", self.rows.iter().map(|r| r.solved() as u64)),
        ]
    }

    pub fn aggregate(&self, metric: &str) -> Aggregate {
        self.aggregates()
            .into_iter()
            .find(|a| a.metric == metric)
            .unwrap_or_else(|| panic!("no aggregate named {metric}"))
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&ROW_HEADER);
        for (i, r) in self.rows.iter().enumerate() {
            t.push(vec![
                json!(i),
                json!(self.experiment.seed),
                json!(r.goal_tests),
                json!(r.generations),
                json!(r.walks_started),
                json!(r.solved()),
                r.solution_length.map_or(Value::Null, |l| json!(l)),
            ]);
        }
        t.footer_header = FOOTER_HEADER.iter().map(|s| s.to_string()).collect();
        t.footer = self.aggregates().iter().map(Aggregate::cells).collect();
        t
    }

    pub fn meta(&self) -> Map<String, Value> {
        let e = &self.experiment;
        let mut m = Map::new();
        m.insert("spec".into(), serde_json::to_value(&e.spec).expect("spec serializes"));
        m.insert("algo".into(), json!(e.algo.to_string()));
        m.insert("trials".into(), json!(e.trials));
        m.insert("seed".into(), json!(e.seed));
        m.insert("budget".into(), serde_json::to_value(e.budget).expect("budget serializes"));
        m
    }
}

/// Analytic precheck: warns when the expected RRW cost on a full tree is
/// infinite or above 1% of the generation budget.
fn precheck(e: &Experiment) -> Option<String> {
    let Algo::Rrw(DepthPolicy::Constant(ell)) = e.algo else {
        return None;
    };
    let (b, dstar, g) = match &e.spec.task {
        TaskSpec::Tree(s) if s.deep_goals == 0 => (s.b, s.dstar, s.g),
        TaskSpec::Star(s) => (s.n, 1, s.g),
        _ => return None,
    };
    let cap = e.budget.max_generations?;
    let bound = rrw_upper(&AnalysisInput::tree(b, dstar, g, ell.get()).ok()?).ok()?;
    match bound {
        AnalysisResult::Infinite => Some(format!(
            "walk length {ell} is below the goal depth {dstar}; no walk can succeed"
        )),
        AnalysisResult::Finite(ref v) if bound.to_f64() > cap as f64 / 100.0 => Some(format!(
            "expected RRW goal tests bound {} exceeds 1% of the {cap}-generation budget",
            uhrlab::analysis::format_sig(v, 6)
        )),
        _ => None,
    }
}

/// Runs all trials on a pool of `jobs` workers. Output does not depend on
/// `jobs`: trial `i` always uses `RngStream(seed, i)` and rows are collected
/// in trial order.
pub fn simulate(e: &Experiment, jobs: Option<usize>) -> Result<Simulation, CliError> {
    e.spec.task.validate().map_err(CliError::usage)?;
    if e.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if matches!(e.algo, Algo::Ehc(_)) && !matches!(e.spec.task, TaskSpec::UhrChain(_)) {
        return Err(CliError::Usage(format!(
            "{} needs a heuristic; only uhr_chain tasks provide one",
            e.algo
        )));
    }
    if e.algo.uses_walks() && e.budget.max_generations.is_none() && e.budget.max_walks.is_none() {
        return Err(CliError::Usage(format!("{} needs a finite budget", e.algo)));
    }
    let warnings: Vec<String> = precheck(e).into_iter().collect();

    let fixed = build(&e.spec.task, None).map_err(CliError::usage)?;
    let pool = pool(jobs)?;
    let (algo, seed, budget) = (e.algo, e.seed, e.budget);
    let rows: Result<Vec<RunStats>, SpecError> = pool.install(|| {
        (0..e.trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngStream::new(seed, i);
                match e.spec.placement {
                    Placement::Fixed => Ok(run_on(&fixed, algo, &mut rng, &budget)),
                    Placement::PerTrial => {
                        let mut placement = RngStream::new(seed, PLACEMENT_STREAM_OFFSET + i);
                        let built = build(&e.spec.task, Some(&mut placement))?;
                        Ok(run_on(&built, algo, &mut rng, &budget))
                    }
                }
            })
            .collect()
    });
    Ok(Simulation {
        experiment: e.clone(),
        rows: rows.map_err(CliError::usage)?,
        warnings,
    })
}

pub fn command(a: &SimulateArgs) -> Result<(), CliError> {
    let spec: SimulateSpec = load_spec(&a.spec)?;
    let e = Experiment {
        spec,
        algo: a.algo,
        trials: a.trials,
        seed: a.seed,
        budget: resolve_budget(a.algo, a.max_generations, a.max_walks),
    };
    let sim = simulate(&e, a.jobs)?;
    for w in &sim.warnings {
        eprintln!("warning: {w}");
    }
    let text = sim.table().render(a.format, sim.meta());
    emit(&text, a.out.as_deref()).map_err(CliError::usage)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_statistics() {
        let a = Aggregate::of("x", [1, 2, 3, 4]);
        assert_eq!(a.mean(), Some(2.5));
        assert!((a.sd().unwrap() - 1.2909944487358056).abs() < 1e-12);
        assert!((a.se().unwrap() - 0.6454972243679028).abs() < 1e-12);
        assert_eq!(Aggregate::of("x", [7]).sd(), None);
        assert_eq!(Aggregate::of("x", []).mean(), None);
    }

    #[test]
    fn spec_json_shape() {
        let s: SimulateSpec =
            serde_json::from_str(r#"{"tree": {"b": 3, "dstar": 3, "g": 2}, "placement": "per_trial"}"#)
                .unwrap();
        assert_eq!(s.placement, Placement::PerTrial);
        assert!(matches!(s.task, TaskSpec::Tree(ref t) if t.b == 3 && t.g == 2));
        let s: SimulateSpec = serde_json::from_str(r#"{"star": {"n": 20, "g": 5}}"#).unwrap();
        assert_eq!(s.placement, Placement::Fixed);
    }

    #[test]
    fn ehc_on_tree_is_a_usage_error() {
        let spec: SimulateSpec = serde_json::from_str(r#"{"star": {"n": 4, "g": 1}}"#).unwrap();
        let e = Experiment::new(spec, "ehc:brfs".parse().unwrap(), 3, 0);
        assert!(matches!(simulate(&e, Some(1)), Err(CliError::Usage(_))));
    }

    #[test]
    fn short_walks_warn() {
        let spec: SimulateSpec =
            serde_json::from_str(r#"{"tree": {"b": 2, "dstar": 3, "g": 1}}"#).unwrap();
        let mut e = Experiment::new(spec, "crrw:2".parse().unwrap(), 2, 0);
        e.budget = Budget::walks(10).with_max_generations(100);
        let sim = simulate(&e, Some(1)).unwrap();
        assert_eq!(sim.warnings.len(), 1);
        assert!(sim.rows.iter().all(|r| !r.solved()));
        assert_eq!(sim.aggregate("solved").sum, 0);
    }
}
