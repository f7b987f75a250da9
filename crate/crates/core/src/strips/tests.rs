use std::collections::{HashSet, VecDeque};

use super::fixtures::{GRIPPER_DOMAIN, GRIPPER_PROBLEM, GRIPPER_UNREACHABLE};
use super::*;
use crate::search::{HeuristicValue, SearchTask};

fn gripper() -> GroundTask {
    let (d, p) = parse(GRIPPER_DOMAIN, GRIPPER_PROBLEM).unwrap();
    ground(&d, &p).unwrap()
}

fn kind(domain: &str, problem: &str) -> (ParseErrorKind, Pos) {
    let e = parse(domain, problem).unwrap_err();
    (e.kind, e.pos)
}

fn act(task: &GroundTask, text: &str) -> u32 {
    parse_plan(task, text).unwrap()[0]
}

/// Fewest actions of a delete-free plan, by breadth-first search over fact sets.
fn h_plus(task: &GroundTask, state: &[u32]) -> Option<usize> {
    let start: Vec<u32> = state.to_vec();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((s, d)) = queue.pop_front() {
        if task.satisfies_goal(&s) {
            return Some(d);
        }
        for a in &task.actions {
            if a.applicable(&s) {
                let mut next = s.clone();
                next.extend(&a.add);
                next.sort_unstable();
                next.dedup();
                if next != s && seen.insert(next.clone()) {
                    queue.push_back((next, d + 1));
                }
            }
        }
    }
    None
}

fn reachable_states(task: &GroundTask) -> Vec<Vec<u32>> {
    let mut seen = HashSet::from([task.initial_state()]);
    let mut order = vec![task.initial_state()];
    let mut i = 0;
    let mut buf = Vec::new();
    while i < order.len() {
        buf.clear();
        task.successors(&order[i], &mut buf);
        for s in buf.drain(..) {
            if seen.insert(s.clone()) {
                order.push(s);
            }
        }
        i += 1;
    }
    order
}

fn solvable_from(task: &GroundTask, state: &[u32]) -> bool {
    let mut seen = HashSet::from([state.to_vec()]);
    let mut queue = VecDeque::from([state.to_vec()]);
    let mut buf = Vec::new();
    while let Some(s) = queue.pop_front() {
        if task.is_goal(&s) {
            return true;
        }
        buf.clear();
        task.successors(&s, &mut buf);
        for n in buf.drain(..) {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    false
}

#[test]
fn gripper_parses_with_four_schemas() {
    let (d, p) = parse(GRIPPER_DOMAIN, GRIPPER_PROBLEM).unwrap();
    assert_eq!(d.actions.len(), 4);
    assert_eq!(d.predicates.len(), 7);
    assert_eq!(p.objects.len(), 6);
}

#[test]
fn gripper_grounding_counts() {
    let t = gripper();
    assert_eq!(t.facts.len(), 20);
    assert_eq!(t.actions.len(), 20);
    assert_eq!(t.init.len(), 9);
    assert_eq!(t.goal.len(), 2);
    let schemas: Vec<&str> = t.actions.iter().map(|a| a.schema.as_str()).collect();
    assert_eq!(schemas.iter().filter(|&&s| s == "move").count(), 2);
    assert_eq!(schemas.iter().filter(|&&s| s == "light").count(), 2);
}

#[test]
fn grounding_is_deterministic_and_sorted() {
    let a = gripper();
    let b = gripper();
    assert_eq!(a, b);
    assert!(a.facts.windows(2).all(|w| w[0] < w[1]));
    assert!(a
        .actions
        .windows(2)
        .all(|w| (&w[0].schema, &w[0].args) < (&w[1].schema, &w[1].args)));
    assert_eq!(a.facts[0].to_string(), "(at ball1 rooma)");
    assert_eq!(a.actions[0].to_string(), "(drop ball1 rooma left)");
}

#[test]
fn unsupported_requirement_is_reported() {
    let dom = GRIPPER_DOMAIN.replace(":strips :typing", ":strips :adl");
    let e = parse(&dom, GRIPPER_PROBLEM).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UnsupportedRequirement(":adl".into()));
    assert_eq!(e.pos, Pos { line: 3, col: 26 });
    assert_eq!(e.to_string(), "domain:3:26: unsupported requirement :adl");
}

#[test]
fn undeclared_goal_object_is_named() {
    let prob = GRIPPER_PROBLEM.replace("(at ball2 roomb)", "(at ball3 roomb)");
    let (k, pos) = kind(GRIPPER_DOMAIN, &prob);
    assert_eq!(k, ParseErrorKind::UnknownObject("ball3".into()));
    assert_eq!(pos.line, 17);
}

#[test]
fn distinct_diagnostics() {
    let prob = GRIPPER_PROBLEM.replace("(free left)", "(free left right)");
    assert!(matches!(
        kind(GRIPPER_DOMAIN, &prob).0,
        ParseErrorKind::ArityMismatch { expected: 1, found: 2, .. }
    ));
    let prob = GRIPPER_PROBLEM.replace("(free left)", "(empty left)");
    assert_eq!(
        kind(GRIPPER_DOMAIN, &prob).0,
        ParseErrorKind::UnknownPredicate("empty".into())
    );
    let prob = GRIPPER_PROBLEM.replace("left right - gripper", "left right - hand");
    assert_eq!(
        kind(GRIPPER_DOMAIN, &prob).0,
        ParseErrorKind::UnknownType("hand".into())
    );
    let prob = GRIPPER_PROBLEM.replace("(free left)", "(free rooma)");
    assert!(matches!(
        kind(GRIPPER_DOMAIN, &prob).0,
        ParseErrorKind::TypeMismatch { .. }
    ));
    let dom = GRIPPER_DOMAIN.replace("(free ?g)))", "(free ?h)))");
    assert_eq!(
        kind(&dom, GRIPPER_PROBLEM).0,
        ParseErrorKind::UnknownParameter("?h".into())
    );
    let prob = GRIPPER_PROBLEM.replace("(:domain gripper-lit)", "(:domain other)");
    assert!(matches!(
        kind(GRIPPER_DOMAIN, &prob).0,
        ParseErrorKind::DomainMismatch { .. }
    ));
    let dom = GRIPPER_DOMAIN.replace(
        "(and (at ?b ?r) (at-robby ?r) (free ?g))",
        "(and (at ?b ?r) (not (at-robby ?r)) (free ?g))",
    );
    assert!(matches!(
        kind(&dom, GRIPPER_PROBLEM).0,
        ParseErrorKind::Unsupported(_)
    ));
    let (k, pos) = kind("(define (domain x)", GRIPPER_PROBLEM);
    assert!(matches!(k, ParseErrorKind::Syntax(_)));
    assert_eq!(pos, Pos { line: 1, col: 1 });
}

#[test]
fn zero_object_problem() {
    let dom = "(define (domain switch)
      (:requirements :strips)
      (:predicates (on) (off))
      (:action flip :parameters () :precondition (off) :effect (and (on) (not (off)))))";
    let prob = "(define (problem p) (:domain switch) (:init (off)) (:goal (on)))";
    let (d, p) = parse(dom, prob).unwrap();
    let t = ground(&d, &p).unwrap();
    assert_eq!(t.facts.len(), 2);
    assert_eq!(t.actions.len(), 1);
    assert_eq!(t.init, vec![t.fact_id(&Fact { predicate: "off".into(), args: vec![] }).unwrap()]);
    assert_eq!(h_ff(&t, &t.init).value, HeuristicValue::Finite(1));
}

#[test]
fn conflicting_effects_are_rejected() {
    let dom = "(define (domain d)
      (:requirements :strips)
      (:predicates (p ?x) (q ?x))
      (:action a :parameters (?x ?y) :precondition (q ?x) :effect (and (p ?x) (not (p ?y)))))";
    let prob = "(define (problem p) (:domain d) (:objects o1 o2) (:init (q o1)) (:goal (p o1)))";
    let (d, p) = parse(dom, prob).unwrap();
    let e = ground(&d, &p).unwrap_err();
    assert_eq!(
        e,
        GroundError::ConflictingEffects {
            schema: "a".into(),
            binding: "o1 o1".into(),
            fact: "(p o1)".into()
        }
    );
}

#[test]
fn grounding_cap() {
    let (d, p) = parse(GRIPPER_DOMAIN, GRIPPER_PROBLEM).unwrap();
    assert!(matches!(
        ground_with_cap(&d, &p, 5),
        Err(GroundError::TooLarge { .. })
    ));
}

#[test]
fn ff_initial_value_matches_delete_relaxation_optimum() {
    let t = gripper();
    let r = h_ff(&t, &t.init);
    assert_eq!(r.value, HeuristicValue::Finite(6));
    assert_eq!(r.relaxed_plan.len(), 6);
    assert_eq!(h_plus(&t, &t.init), Some(6));
    // At least one drop per misplaced ball.
    assert!(r.relaxed_plan.iter().filter(|&&a| t.actions[a as usize].schema == "drop").count() >= 2);
}

#[test]
fn ff_zero_exactly_at_goals() {
    let t = gripper();
    for s in reachable_states(&t) {
        let r = h_ff(&t, &s);
        assert_eq!(r.value == HeuristicValue::Finite(0), t.is_goal(&s));
        if t.is_goal(&s) {
            assert!(r.relaxed_plan.is_empty());
        }
    }
}

#[test]
fn ff_never_reports_false_dead_ends() {
    let t = gripper();
    let states = reachable_states(&t);
    assert!(states.len() > 20);
    for s in &states {
        let r = h_ff(&t, s);
        if solvable_from(&t, s) {
            assert_ne!(r.value, HeuristicValue::Infinite, "{:?}", t.state_names(s));
        }
        if let HeuristicValue::Finite(v) = r.value {
            assert_eq!(v as usize, r.relaxed_plan.len());
            assert!(r.relaxed_plan.len() <= t.actions.len());
            assert!(v as usize >= h_plus(&t, s).unwrap());
        }
    }
}

#[test]
fn ff_infinite_for_unachievable_goal_fact() {
    let prob = GRIPPER_PROBLEM.replace("(at ball2 roomb)", "(connected rooma rooma)");
    let (d, p) = parse(GRIPPER_DOMAIN, &prob).unwrap();
    let t = ground(&d, &p).unwrap();
    let r = h_ff(&t, &t.init);
    assert_eq!(r.value, HeuristicValue::Infinite);
    assert!(r.relaxed_plan.is_empty());
}

#[test]
fn unreachable_fixture_is_relaxed_solvable_only() {
    let (d, p) = parse(GRIPPER_DOMAIN, GRIPPER_UNREACHABLE).unwrap();
    let t = ground(&d, &p).unwrap();
    assert!(matches!(h_ff(&t, &t.init).value, HeuristicValue::Finite(_)));
    assert!(!solvable_from(&t, &t.init));
}

#[test]
fn plan_validation_cases() {
    let t = gripper();
    let plan_text = "; optimal\n(pick ball1 rooma left)\n(pick ball2 rooma right)\n\n(move rooma roomb)\n(light roomb)\n(drop ball1 roomb left)\n(drop ball2 roomb right)\n";
    let plan = parse_plan(&t, plan_text).unwrap();
    let ok = validate_plan(&t, &plan);
    assert!(ok.valid);
    assert_eq!((ok.failed_step, ok.reason), (None, None));
    assert_eq!(format_plan(&t, &plan), plan_text.replace("; optimal\n", "").replace("\n\n", "\n"));

    let empty = validate_plan(&t, &[]);
    assert!(!empty.valid);
    assert_eq!(empty.failed_step, None);
    assert_eq!(empty.reason, Some(PlanFailure::GoalUnsatisfied));

    let bad = [act(&t, "(pick ball1 rooma left)"), act(&t, "(drop ball1 roomb left)")];
    let v = validate_plan(&t, &bad);
    assert_eq!(v.failed_step, Some(2));
    assert_eq!(v.reason, Some(PlanFailure::Inapplicable));

    let truncated = validate_plan(&t, &plan[..4]);
    assert_eq!(truncated.to_string(), "goal not satisfied after step 4");
}

#[test]
fn plan_file_diagnostics() {
    let t = gripper();
    let e = parse_plan(&t, "(pick ball1 rooma left)\n(fly ball1)").unwrap_err();
    assert_eq!(e.pos, Pos { line: 2, col: 1 });
    assert!(matches!(e.kind, ParseErrorKind::UnknownAction(_)));
    assert!(parse_plan(&t, "(pick ball1 rooma left").is_err());
    assert!(parse_plan(&t, "pick").is_err());
}

#[test]
fn path_to_plan() {
    let t = gripper();
    let plan = parse_plan(&t, "(pick ball1 rooma left)\n(move rooma roomb)").unwrap();
    let mut states = vec![t.init.clone()];
    for &a in &plan {
        let next = t.actions[a as usize].apply(states.last().unwrap());
        states.push(next);
    }
    assert_eq!(t.plan_from_path(&states), Some(plan));
    assert_eq!(t.plan_from_path(&[t.init.clone(), t.init.clone()]), None);
}

#[test]
fn successors_ignore_input_order() {
    let t = gripper();
    let mut a = Vec::new();
    t.successors(&t.init, &mut a);
    assert!(a.iter().all(|s| s.windows(2).all(|w| w[0] < w[1])));
    let uniq: HashSet<_> = a.iter().collect();
    assert_eq!(uniq.len(), a.len());
    assert!(a.len() <= t.actions.len());
}
