use std::fmt;

use super::ground::GroundTask;
use super::parse::{ParseError, ParseErrorKind, Source};
use super::sexpr::{read_all, Pos};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanFailure {
    /// The action at `failed_step` is not applicable.
    Inapplicable,
    /// Every action applied but the final state misses a goal fact.
    GoalUnsatisfied,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanValidation {
    pub valid: bool,
    /// 1-based index of the inapplicable action.
    pub failed_step: Option<usize>,
    pub reason: Option<PlanFailure>,
    /// Number of actions applied successfully.
    pub steps_applied: usize,
}

impl fmt::Display for PlanValidation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.reason, self.failed_step) {
            (None, _) => write!(f, "plan valid ({} steps)", self.steps_applied),
            (Some(PlanFailure::Inapplicable), Some(k)) => {
                write!(f, "action at step {k} is not applicable")
            }
            _ => write!(f, "goal not satisfied after step {}", self.steps_applied),
        }
    }
}

/// Replays `plan` from the initial state.
pub fn validate_plan(task: &GroundTask, plan: &[u32]) -> PlanValidation {
    let mut state = task.init.clone();
    for (i, &a) in plan.iter().enumerate() {
        match task.actions.get(a as usize) {
            Some(act) if act.applicable(&state) => state = act.apply(&state),
            _ => {
                return PlanValidation {
                    valid: false,
                    failed_step: Some(i + 1),
                    reason: Some(PlanFailure::Inapplicable),
                    steps_applied: i,
                }
            }
        }
    }
    let valid = task.satisfies_goal(&state);
    PlanValidation {
        valid,
        failed_step: None,
        reason: (!valid).then_some(PlanFailure::GoalUnsatisfied),
        steps_applied: plan.len(),
    }
}

/// One `(name obj ...)` per line.
pub fn format_plan(task: &GroundTask, plan: &[u32]) -> String {
    plan.iter()
        .map(|&a| format!("{}\n", task.actions[a as usize]))
        .collect()
}

/// Reads a plan file: one ground action per line; blank lines and `;`
/// comments are ignored.
pub fn parse_plan(task: &GroundTask, text: &str) -> Result<Vec<u32>, ParseError> {
    let err = |pos: Pos, kind: ParseErrorKind| ParseError {
        file: Source::Plan,
        pos,
        kind,
    };
    let exprs = read_all(text).map_err(|(m, p)| err(p, ParseErrorKind::Syntax(m)))?;
    let mut plan = Vec::new();
    for e in exprs {
        let Some(items) = e.list() else {
            return Err(err(
                e.pos(),
                ParseErrorKind::Syntax("expected (action arg ...)".into()),
            ));
        };
        let mut words = Vec::with_capacity(items.len());
        for it in items {
            match it.atom() {
                Some(w) => words.push(w),
                None => {
                    return Err(err(
                        it.pos(),
                        ParseErrorKind::Syntax("nested list in plan step".into()),
                    ))
                }
            }
        }
        let Some((name, args)) = words.split_first() else {
            return Err(err(e.pos(), ParseErrorKind::Syntax("empty plan step".into())));
        };
        let id = task
            .actions
            .iter()
            .position(|a| a.schema == *name && a.args.iter().map(String::as_str).eq(args.iter().copied()))
            .ok_or_else(|| err(e.pos(), ParseErrorKind::UnknownAction(format!("({})", words.join(" ")))))?;
        plan.push(id as u32);
    }
    Ok(plan)
}
