//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stdout so it shows up even when the harness captures test output.

use std::collections::{HashMap, VecDeque};
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use uhrlab::analysis::{
    brfs_bounds, check_depth1_dominance, crossover_curves, expected_brfs, format_sig, ratio_to_f64,
    goal_crossover_accurate, goal_crossover_simple, min_success_prob_for_crossover, rrw_upper,
    AnalysisInput, AnalysisResult,
};
use uhrlab::strips::fixtures::{GRIPPER_DOMAIN, GRIPPER_PROBLEM};
use uhrlab::strips::{h_ff, validate_plan};
use uhrlab::synthetic::{StarTaskSpec, TaskSpec, TreeTaskSpec, UhrChainSpec, UhrLevel};
use uhrlab::{luby, Budget, RngStream, SearchTask};
use uhrlab_cli::plan::{load_text, plan_once};
use uhrlab_cli::simulate::{simulate, Experiment, Placement, SimulateSpec, Simulation};
use uhrlab_cli::Algo;

const SEED: u64 = 7;
const TRIALS: u64 = 100_000;

type Verdict = Result<String, String>;

fn q(n: u128, d: u128) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn tree(b: u64, dstar: u32, g: u64, placement: Placement) -> SimulateSpec {
    SimulateSpec {
        task: TaskSpec::Tree(TreeTaskSpec::new(b, dstar, g)),
        placement,
    }
}

fn algo(s: &str) -> Algo {
    s.parse().unwrap()
}

fn run(spec: SimulateSpec, a: &str, trials: u64) -> Simulation {
    simulate(&Experiment::new(spec, algo(a), trials, SEED), None).unwrap()
}

/// Mean and standard error of goal tests over solved trials.
fn mean_se(sim: &Simulation) -> (f64, f64) {
    let a = sim.aggregate("goal_tests");
    (a.mean().unwrap(), a.se().unwrap())
}

fn all_solved(sim: &Simulation) -> bool {
    sim.rows.iter().all(|r| r.solved())
}

/// Every BrFS run on a tree, kept for the bounds check.
#[derive(Default)]
struct BrfsLog {
    runs: Vec<(String, u64, u64, Simulation)>,
}

impl BrfsLog {
    fn record(&mut self, label: String, size_below: u64, size_at: u64, sim: Simulation) -> Simulation {
        self.runs.push((label, size_below, size_at, sim.clone()));
        sim
    }
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `N + E[first goal position]` summed over every placement of `g` goals
/// among `D` slots.
fn brfs_oracle(size_below: u128, size_at: u128, g: u128) -> BigRational {
    let total = binom(size_at, g);
    let weighted: u128 = (1..=size_at).map(|m| m * binom(size_at - m, g - 1)).sum();
    q(size_below, 1) + q(weighted, total)
}

fn c1(log: &mut BrfsLog) -> Verdict {
    let start = Instant::now();
    let expected = [(1, q(27, 1)), (2, q(67, 3)), (5, q(53, 3))];
    let mut parts = Vec::new();
    let mut ok = true;
    for (g, literal) in expected {
        let oracle = brfs_oracle(13, 27, g as u128);
        let closed = expected_brfs(&AnalysisInput::tree(3, 3, g, 3).unwrap()).unwrap();
        if oracle != literal || closed != literal {
            return Err(format!("g={g}: oracle {oracle}, closed form {closed}, expected {literal}"));
        }
        let sim = log.record(
            format!("b=3 d*=3 g={g}"),
            13,
            27,
            run(tree(3, 3, g, Placement::PerTrial), "brfs", TRIALS),
        );
        let (m, se) = mean_se(&sim);
        let target = ratio_to_f64(&literal);
        let z = (m - target).abs() / se;
        ok &= z <= 3.0;
        parts.push(format!("g={g}: {m:.4} vs {} ({z:.2} SE)", format_sig(&literal, 6)));
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(120);
    let msg = format!("{}; {:.1} s", parts.join(", "), t.as_secs_f64());
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c2(log: &BrfsLog) -> Verdict {
    let mut violations = 0;
    let mut trials = 0;
    for (label, n, d, sim) in &log.runs {
        let (lo, hi) = brfs_bounds(*n, *d);
        for r in &sim.rows {
            trials += 1;
            let gt = r.goal_tests as u128;
            if !r.solved() || gt < lo || gt > hi {
                violations += 1;
                eprintln!("bound violation in {label}: {r:?}");
            }
        }
    }
    let msg = format!("{violations} violations over {trials} BrFS trials in {} sweeps", log.runs.len());
    if violations == 0 && trials > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c3() -> Verdict {
    let start = Instant::now();
    let bound = rrw_upper(&AnalysisInput::tree(4, 6, 64, 6).unwrap()).unwrap();
    // 1 + ℓ b^d / g
    let oracle = 1 + 6 * 4096 / 64;
    if bound != AnalysisResult::Finite(q(oracle, 1)) || oracle != 385 {
        return Err(format!("bound {bound} vs oracle {oracle}"));
    }
    let sim = run(tree(4, 6, 64, Placement::PerTrial), "crrw:6", TRIALS);
    let (m, se) = mean_se(&sim);
    let w = sim.aggregate("walks");
    let (wm, wse) = (w.mean().unwrap(), w.se().unwrap());
    let t = start.elapsed();
    let ok = all_solved(&sim)
        && m <= 385.0 + 3.0 * se
        && (wm - 64.0).abs() <= 3.0 * wse
        && t < Duration::from_secs(300);
    let msg = format!(
        "mean {m:.3} (SE {se:.3}) <= 385 + 3 SE; walks {wm:.4} vs 64 ({:.2} SE); {:.1} s",
        (wm - 64.0).abs() / wse,
        t.as_secs_f64()
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c4() -> Verdict {
    let listed = [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8];
    let got: Vec<u64> = (1..=15).map(|i| luby(i).unwrap()).collect();
    if got != listed {
        return Err(format!("luby(1..15) = {got:?}"));
    }
    // Independent table: S_1 = [1], S_(k+1) = S_k S_k 2^k.
    let mut table = vec![1u64];
    while table.len() < 1023 {
        let top = 2 * table.iter().max().unwrap();
        let mut next = table.clone();
        next.extend(table.iter().copied());
        next.push(top);
        table = next;
    }
    for i in 1..=1023u64 {
        let v = luby(i).unwrap();
        if v != table[i as usize - 1] {
            return Err(format!("luby({i}) = {v}, table says {}", table[i as usize - 1]));
        }
        let k = 64 - i.leading_zeros() as u64; // 2^(k-1) <= i < 2^k
        let rec = if i == (1 << k) - 1 {
            1 << (k - 1)
        } else {
            luby(i - (1 << (k - 1)) + 1).unwrap()
        };
        if v != rec {
            return Err(format!("recurrence fails at {i}"));
        }
    }
    Ok("first 15 terms match; table and recurrence agree for i <= 1023".into())
}

fn c5(log: &mut BrfsLog) -> Verdict {
    let mut pair = |g: u64| {
        let b = log.record(
            format!("b=4 d*=6 g={g}"),
            1365,
            4096,
            run(tree(4, 6, g, Placement::PerTrial), "brfs", TRIALS),
        );
        let r = run(tree(4, 6, g, Placement::PerTrial), "crrw:6", TRIALS);
        (mean_se(&b), mean_se(&r), all_solved(&b) && all_solved(&r))
    };
    let ((b19, bse19), (r19, rse19), s19) = pair(19);
    let separated19 = r19 + 3.0 * rse19 < b19 - 3.0 * bse19;
    let ((b1, bse1), (r1, rse1), s1) = pair(1);
    let ok = s19 && s1 && r19 <= b19 && b1 + 3.0 * bse1 < r1 - 3.0 * rse1;
    let msg = format!(
        "g=19: RRW {r19:.1}±{:.1} <= BrFS {b19:.1}±{:.1} ({}); g=1: BrFS {b1:.1}±{:.1} < RRW {r1:.1}±{:.1}",
        3.0 * rse19,
        3.0 * bse19,
        if separated19 { "separated" } else { "overlapping, ordered" },
        3.0 * bse1,
        3.0 * rse1
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6(log: &mut BrfsLog) -> Verdict {
    let one = q(1, 1);
    let acc = goal_crossover_accurate(1365, 4096, 6, &one).unwrap();
    let simple = goal_crossover_simple(1365, 4096, 6, &one).unwrap();
    let t = acc.threshold.to_f64();
    if (t - 15.56).abs() > 0.005 || acc.threshold.finite() > simple.finite() {
        return Err(format!("accurate {} simple {}", acc.threshold, simple));
    }
    let mut rng = RngStream::new(SEED, 6);
    for _ in 0..1000 {
        let n = 1 + rng.below(1_000_000);
        let d = 1 + rng.below(1_000_000);
        let ell = 1 + rng.below(100);
        let den = 1 + rng.below(1000);
        let p = q(1 + rng.below(den) as u128, den as u128);
        let a = goal_crossover_accurate(n, d, ell, &p).unwrap();
        let s = goal_crossover_simple(n, d, ell, &p).unwrap();
        if a.threshold.finite().unwrap() > s.finite().unwrap() {
            return Err(format!("accurate > simple at N={n} D={d} l={ell} p={p}"));
        }
    }
    let b = log.record(
        "b=4 d*=6 g=16".into(),
        1365,
        4096,
        run(tree(4, 6, 16, Placement::PerTrial), "brfs", TRIALS),
    );
    let r = run(tree(4, 6, 16, Placement::PerTrial), "crrw:6", TRIALS);
    let ((bm, bse), (rm, rse)) = (mean_se(&b), mean_se(&r));
    let msg = format!(
        "accurate {} (kappa {}) <= simple {}; 1000-point grid holds; g=16: RRW {rm:.1}±{:.1} <= BrFS {bm:.1}±{:.1}",
        acc.threshold,
        acc.kappa,
        simple,
        3.0 * rse,
        3.0 * bse
    );
    if rm <= bm && all_solved(&b) && all_solved(&r) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c7(log: &mut BrfsLog) -> Verdict {
    let (brfs_exact, rrw_exact) = check_depth1_dominance(20, 5).unwrap();
    // 1 + (n + 1)/(g + 1) and 1 + n/g
    if brfs_exact != q(9, 2) || rrw_exact != q(5, 1) {
        return Err(format!("analytic ({brfs_exact}, {rrw_exact})"));
    }
    let star = SimulateSpec {
        task: TaskSpec::Star(StarTaskSpec::new(20, 5)),
        placement: Placement::PerTrial,
    };
    let b = log.record("star n=20 g=5".into(), 1, 20, run(star.clone(), "brfs", TRIALS));
    let r = run(star, "crrw:1", TRIALS);
    let ((bm, bse), (rm, rse)) = (mean_se(&b), mean_se(&r));
    let ok = (bm - 4.5).abs() <= 3.0 * bse && (rm - 5.0).abs() <= 3.0 * rse && bm + 3.0 * bse < rm - 3.0 * rse;
    let msg = format!(
        "analytic (4.5, 5); BrFS {bm:.4} ({:.2} SE), RRW {rm:.4} ({:.2} SE)",
        (bm - 4.5).abs() / bse,
        (rm - 5.0).abs() / rse
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c8(log: &mut BrfsLog) -> Verdict {
    let trials = 10_000;
    let r = run(tree(4, 6, 4096, Placement::Fixed), "crrw:6", trials);
    let exact = r.rows.iter().filter(|s| s.solved() && s.goal_tests == 7).count();
    let b = log.record(
        "b=4 d*=6 g=4096".into(),
        1365,
        4096,
        run(tree(4, 6, 4096, Placement::Fixed), "brfs", trials),
    );
    let (bm, _) = mean_se(&b);
    let msg = format!("{exact}/{trials} RRW trials used 7 goal tests; BrFS mean {bm}");
    if exact as u64 == trials && bm >= 1366.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c9() -> Verdict {
    let mut rng = RngStream::new(SEED, 9);
    for _ in 0..1000 {
        let size_below = 1 + rng.below(100_000);
        let size_at = 1 + rng.below(100_000);
        let goals = 1 + rng.below(size_at);
        let walk_len = 1 + rng.below(size_below);
        let input = AnalysisInput {
            size_below,
            size_at,
            goals,
            walk_len,
            reach_prob: q(1, 1),
            success_prob: None,
            dstar: 1,
            ell_error: q(0, 1),
        };
        let p = min_success_prob_for_crossover(&input).unwrap();
        let at = input.clone().with_success_prob(p);
        let lhs = rrw_upper(&at).unwrap();
        let rhs = expected_brfs(&at).unwrap();
        if lhs != AnalysisResult::Finite(rhs.clone()) {
            return Err(format!("{input:?}: {lhs} != {rhs}"));
        }
    }
    Ok("rrw_upper at the threshold equals expected_brfs exactly on 1000 points".into())
}

fn c10() -> Verdict {
    let errors = [q(0, 1), q(1, 2), q(1, 1)];
    let rows = crossover_curves(4, 2..=10, &errors).unwrap();
    for e in &errors {
        let curve: Vec<_> = rows.iter().filter(|r| r.ell_error == *e).collect();
        if curve.len() != 9 {
            return Err(format!("e={e}: {} rows", curve.len()));
        }
        for w in curve.windows(2) {
            if w[1].goal_crossover <= w[0].goal_crossover || w[1].density_crossover >= w[0].density_crossover {
                return Err(format!("e={e}: not monotone at d*={}", w[1].dstar));
            }
        }
        if *e == q(0, 1) {
            for r in &curve {
                let bd = 4u128.pow(r.dstar);
                if r.goal_crossover != q(r.dstar as u128 * 3 * bd, bd - 1) {
                    return Err(format!("d*={} closed form mismatch", r.dstar));
                }
            }
        }
    }
    Ok("goal crossover increases and density decreases over d* = 2..10 for e in {0, 1/2, 1}".into())
}

fn c11() -> Verdict {
    let mut rng = RngStream::new(SEED, 11);
    let mut solved = [0u32; 3];
    for i in 0..100 {
        let k = 1 + rng.below(5) as u32;
        let levels = (0..k)
            .map(|_| {
                let b = 1 + rng.below(3);
                let exit_depth = 1 + rng.below(3) as u32;
                let frontier = b.pow(exit_depth);
                UhrLevel {
                    b,
                    exit_depth,
                    exit_count: 1 + rng.below(frontier),
                }
            })
            .collect();
        let spec = UhrChainSpec {
            k,
            levels,
            seed: SEED + i,
        };
        let ell = spec.max_exit_depth();
        let sim_spec = SimulateSpec {
            task: TaskSpec::UhrChain(spec.clone()),
            placement: Placement::Fixed,
        };
        for (j, a) in ["ehc:brfs".to_string(), format!("ehc:crrw:{ell}"), "ehc:luby:1".into()]
            .iter()
            .enumerate()
        {
            let mut e = Experiment::new(sim_spec.clone(), algo(a), 1, SEED);
            e.budget = Budget::generations(10_000_000);
            let s = &simulate(&e, Some(1)).unwrap().rows[0];
            let ok = s.solved() && (j > 0 || s.escape_searches == k as u64);
            if !ok {
                return Err(format!("instance {i} ({spec:?}) with {a}: {s:?}"));
            }
            solved[j] += 1;
        }
    }
    Ok(format!(
        "solved {}/{}/{} of 100 (ehc:brfs with k escapes, ehc:crrw:max-exit, ehc:luby:1)",
        solved[0], solved[1], solved[2]
    ))
}

fn c12() -> Verdict {
    let loaded = load_text(GRIPPER_DOMAIN, GRIPPER_PROBLEM, "domain", "problem").unwrap();
    let task = &loaded.task;
    let mut solved = 0;
    for a in ["ehc:brfs", "ehc:crrw:4", "ehc:luby:1"] {
        for seed in 0..5 {
            let r = plan_once(task, algo(a), seed, seed, &Budget::generations(10_000_000));
            let plan: Vec<u32> = r
                .plan
                .iter()
                .map(|s| task.actions.iter().position(|act| act.to_string() == *s).unwrap() as u32)
                .collect();
            if r.solved() && validate_plan(task, &plan).valid {
                solved += 1;
            } else {
                return Err(format!("{a} seed {seed}: {r:?}"));
            }
        }
    }
    // Brute-force oracle: every reachable state, and which of them reach a goal.
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut states = vec![task.initial_state()];
    index.insert(states[0].clone(), 0);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    let mut buf = Vec::new();
    while let Some(i) = queue.pop_front() {
        buf.clear();
        task.successors(&states[i], &mut buf);
        for s in buf.drain(..) {
            let j = *index.entry(s.clone()).or_insert_with(|| {
                states.push(s);
                preds.push(Vec::new());
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            preds[j].push(i);
        }
    }
    let mut alive = vec![false; states.len()];
    let mut queue: VecDeque<usize> = (0..states.len()).filter(|&i| task.is_goal(&states[i])).collect();
    for &i in &queue {
        alive[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &p in &preds[i] {
            if !alive[p] {
                alive[p] = true;
                queue.push_back(p);
            }
        }
    }
    let false_dead = (0..states.len())
        .filter(|&i| alive[i] && h_ff(task, &states[i]).value.is_infinite())
        .count();
    let msg = format!(
        "{solved}/15 solved and validated; h_ff finite on all {} goal-reaching states ({false_dead} false dead ends)",
        alive.iter().filter(|&&a| a).count()
    );
    if solved == 15 && false_dead == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn c13() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let domain = fixture("gripper-domain.pddl");
    let problem = fixture("gripper-problem.pddl");
    let manifests: Vec<(&str, Vec<String>)> = vec![
        (
            "simulate tree",
            ["simulate", "--spec", r#"{"tree": {"b": 3, "dstar": 4, "g": 3}, "placement": "per_trial"}"#, "--algo", "brfs", "--trials", "3000"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "simulate dead-leaf",
            ["simulate", "--spec", r#"{"dead_leaf_tree": {"b": 3, "dstar": 4, "g": 2, "dead_prob": 0.2, "structure_seed": 5}, "placement": "per_trial"}"#, "--algo", "luby:2", "--trials", "3000", "--format", "json"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "simulate uhr chain",
            ["simulate", "--spec", r#"{"uhr_chain": {"k": 4, "levels": [{"b": 3, "exit_depth": 3, "exit_count": 2}], "seed": 1}, "placement": "per_trial"}"#, "--algo", "ehc:crrw:3", "--trials", "500"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "analyze 1a",
            ["analyze", "--spec", r#"{"figure": "1a", "b": 3, "dstar": 3, "lengths": [3, 4], "monte_carlo": {"trials": 500, "goals": [1, 9]}}"#]
                .map(String::from)
                .to_vec(),
        ),
        (
            "plan",
            vec![
                "plan".into(),
                domain.display().to_string(),
                problem.display().to_string(),
                "--algo".into(),
                "ehc:luby:1".into(),
            ],
        ),
    ];
    for (name, args) in &manifests {
        let mut outputs = Vec::new();
        for jobs in [1, 3] {
            let out = dir.path().join(format!("{}-{jobs}", name.replace(' ', "_")));
            let status = Command::new(env!("CARGO_BIN_EXE_uhrlab"))
                .args(args)
                .args(["--seed", "11", "--jobs", &jobs.to_string(), "--out"])
                .arg(&out)
                .output()
                .unwrap();
            if !status.status.success() {
                return Err(format!("{name}: {}", String::from_utf8_lossy(&status.stderr)));
            }
            outputs.push(std::fs::read(&out).unwrap());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{name}: output differs between --jobs 1 and --jobs 3"));
        }
    }
    Ok(format!("{} manifests byte-identical under --jobs 1 and --jobs 3", manifests.len()))
}

#[test]
fn acceptance() {
    let mut log = BrfsLog::default();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut report = |n: u32, name: &'static str, v: Verdict| results.push((n, name, v));
    report(1, "BrFS expectation on b=3 d*=3 trees", c1(&mut log));
    report(3, "RRW bound and geometric walk count", c3());
    report(4, "Luby sequence", c4());
    report(5, "crossover at b=4 d*=6 l=6", c5(&mut log));
    report(6, "accurate crossover threshold", c6(&mut log));
    report(7, "depth-one dominance on a star", c7(&mut log));
    report(8, "all goals at depth d*", c8(&mut log));
    report(2, "BrFS best and worst case bounds", c2(&log));
    report(9, "threshold tightness identity", c9());
    report(10, "crossover curve shapes", c10());
    report(11, "EHC on UHR chains", c11());
    report(12, "gripper end to end", c12());
    report(13, "reproducibility across --jobs", c13());
    results.sort_by_key(|r| r.0);
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (n, name, v) in &results {
        match v {
            Ok(m) => writeln!(out, "PASS {n:>2} {name}: {m}").unwrap(),
            Err(m) => writeln!(out, "FAIL {n:>2} {name}: {m}").unwrap(),
        }
    }
    let failed: Vec<_> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
