use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use uhrlab::strips::{ground, parse, parse_plan, validate_plan, ParseError, Source};
use uhrlab::{brfs, ehc, rrw, Budget, FfHeuristic, GroundTask, Outcome, RngStream, RunStats};

use crate::algo::{resolve_budget, Algo};
use crate::args::{PlanArgs, ValidateArgs};
use crate::table::{emit, Format, Table};
use crate::{load_spec, pool, read_file, CliError};

/// `--spec` form of the two input files.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct PlanSpec {
    pub domain: PathBuf,
    pub problem: PathBuf,
}

/// A grounded task with the names it was declared under.
#[derive(Clone, Debug)]
pub struct LoadedTask {
    pub domain: String,
    pub problem: String,
    pub task: GroundTask,
}

fn located(e: &ParseError, domain: &str, problem: &str, plan: &str) -> String {
    let file = match e.file {
        Source::Domain => domain,
        Source::Problem => problem,
        Source::Plan => plan,
    };
    format!("{file}:{}: {}", e.pos, e.kind)
}

/// Parses and grounds a task; diagnostics name `domain_label` or
/// `problem_label`.
pub fn load_text(
    domain_text: &str,
    problem_text: &str,
    domain_label: &str,
    problem_label: &str,
) -> Result<LoadedTask, CliError> {
    let (d, p) = parse(domain_text, problem_text)
        .map_err(|e| CliError::Usage(located(&e, domain_label, problem_label, "plan")))?;
    let task = ground(&d, &p).map_err(CliError::usage)?;
    Ok(LoadedTask {
        domain: d.name,
        problem: p.name,
        task,
    })
}

pub fn load_files(domain: &Path, problem: &Path) -> Result<LoadedTask, CliError> {
    load_text(
        &read_file(domain)?,
        &read_file(problem)?,
        &domain.display().to_string(),
        &problem.display().to_string(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solved,
    NoSolution,
    BudgetExceeded,
    /// A path was found but its plan failed validation.
    InvalidPlan,
}

/// One planner run. Deterministic in `(task, algo, seed, budget)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub run: u64,
    pub seed: u64,
    pub status: Status,
    pub plan: Vec<String>,
    pub plan_length: Option<usize>,
    pub heuristic_evals: u64,
    pub goal_tests: u64,
    pub generations: u64,
    pub escape_searches: u64,
    pub valid: Option<bool>,
}

impl RunReport {
    pub fn solved(&self) -> bool {
        self.status == Status::Solved
    }
}

fn search(task: &GroundTask, algo: Algo, rng: &mut RngStream, budget: &Budget, stats: &mut RunStats) -> Outcome<Vec<u32>> {
    match algo {
        Algo::Brfs => brfs(task, rng, budget, stats),
        Algo::Rrw(p) => rrw(task, p, rng, budget, stats),
        Algo::Ehc(s) => ehc(task, &FfHeuristic { task }, s, rng, budget, stats),
    }
}

/// Runs `algo` once with `RngStream(seed, 0)`.
pub fn plan_once(task: &GroundTask, algo: Algo, run: u64, seed: u64, budget: &Budget) -> RunReport {
    let mut stats = RunStats::new();
    let outcome = search(task, algo, &mut RngStream::new(seed, 0), budget, &mut stats);
    let mut report = RunReport {
        run,
        seed,
        status: Status::Solved,
        plan: Vec::new(),
        plan_length: None,
        heuristic_evals: stats.heuristic_evals,
        goal_tests: stats.goal_tests,
        generations: stats.generations,
        escape_searches: stats.escape_searches,
        valid: None,
    };
    match outcome {
        Outcome::NoSolution => report.status = Status::NoSolution,
        Outcome::BudgetExceeded => report.status = Status::BudgetExceeded,
        Outcome::Solved(path) => {
            let plan = task
                .plan_from_path(path.states())
                .expect("consecutive search states are joined by an action");
            let valid = validate_plan(task, &plan).valid;
            report.valid = Some(valid);
            if !valid {
                report.status = Status::InvalidPlan;
            }
            report.plan_length = Some(plan.len());
            report.plan = plan
                .iter()
                .map(|&a| task.actions[a as usize].to_string())
                .collect();
        }
    }
    report
}

/// Runs `trials` seeds `seed, seed + 1, ...` and returns reports in run order
/// with their wall times.
pub fn plan_runs(
    task: &GroundTask,
    algo: Algo,
    trials: u64,
    seed: u64,
    budget: &Budget,
    jobs: Option<usize>,
) -> Result<Vec<(RunReport, Duration)>, CliError> {
    let pool = pool(jobs)?;
    Ok(pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let start = Instant::now();
                let r = plan_once(task, algo, i, seed.wrapping_add(i), budget);
                (r, start.elapsed())
            })
            .collect()
    }))
}

fn report_table(reports: &[RunReport]) -> Table {
    let mut t = Table::new(&[
        "run",
        "seed",
        "status",
        "plan_length",
        "heuristic_evals",
        "goal_tests",
        "generations",
        "escape_searches",
        "valid",
        "plan",
    ]);
    for r in reports {
        t.push(vec![
            json!(r.run),
            json!(r.seed),
            serde_json::to_value(r.status).expect("status serializes"),
            json!(r.plan_length),
            json!(r.heuristic_evals),
            json!(r.goal_tests),
            json!(r.generations),
            json!(r.escape_searches),
            json!(r.valid),
            Value::String(r.plan.join(" ")),
        ]);
    }
    t
}

pub fn command(a: &PlanArgs) -> Result<(), CliError> {
    let (domain, problem) = match (&a.spec, &a.domain, &a.problem) {
        (Some(spec), None, None) => {
            let s: PlanSpec = load_spec(spec)?;
            (s.domain, s.problem)
        }
        (None, Some(d), Some(p)) => (d.clone(), p.clone()),
        _ => {
            return Err(CliError::Usage(
                "give DOMAIN and PROBLEM files or --spec, not both".into(),
            ))
        }
    };
    let loaded = load_files(&domain, &problem)?;
    let budget = resolve_budget(a.algo, a.max_generations, a.max_walks);
    let runs = plan_runs(&loaded.task, a.algo, a.trials, a.seed, &budget, a.jobs)?;
    for (r, t) in &runs {
        eprintln!("run {} (seed {}): {:?} in {:.3} s", r.run, r.seed, r.status, t.as_secs_f64());
    }
    let reports: Vec<RunReport> = runs.into_iter().map(|(r, _)| r).collect();
    let solved = reports.iter().filter(|r| r.solved()).count();

    let text = match a.format {
        Format::Csv => report_table(&reports).to_csv(),
        Format::Json => {
            let mut m = Map::new();
            m.insert("domain".into(), json!(loaded.domain));
            m.insert("problem".into(), json!(loaded.problem));
            m.insert("algo".into(), json!(a.algo.to_string()));
            m.insert("seed".into(), json!(a.seed));
            m.insert("budget".into(), serde_json::to_value(budget).expect("budget serializes"));
            m.insert("solved".into(), json!(solved));
            m.insert("runs".into(), serde_json::to_value(&reports).expect("reports serialize"));
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("JSON values serialize");
            s.push('\n');
            s
        }
    };
    emit(&text, a.out.as_deref()).map_err(CliError::usage)?;
    if solved < reports.len() {
        return Err(CliError::Failure(format!(
            "{} of {} runs did not produce a valid plan",
            reports.len() - solved,
            reports.len()
        )));
    }
    Ok(())
}

pub fn validate_command(a: &ValidateArgs) -> Result<(), CliError> {
    let loaded = load_files(&a.domain, &a.problem)?;
    let text = read_file(&a.plan)?;
    let plan = parse_plan(&loaded.task, &text).map_err(|e| {
        CliError::Usage(located(
            &e,
            &a.domain.display().to_string(),
            &a.problem.display().to_string(),
            &a.plan.display().to_string(),
        ))
    })?;
    let v = validate_plan(&loaded.task, &plan);
    if v.valid {
        println!("valid: {v}");
        Ok(())
    } else {
        Err(CliError::Failure(format!("invalid: {v}")))
    }
}
