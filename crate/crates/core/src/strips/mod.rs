//! A STRIPS subset with typing: parsing, grounding, the FF heuristic and
//! plan validation.

mod ff;
mod ground;
mod parse;
mod plan;
mod sexpr;

pub use ff::{h_ff, FfHeuristic, RelaxedPlanResult};
pub use ground::{
    ground, ground_with_cap, Fact, GroundAction, GroundError, GroundTask, DEFAULT_GROUNDING_CAP,
};
pub use parse::{
    parse, ActionSchema, Atom, Domain, ParseError, ParseErrorKind, Predicate, Problem, Source,
    TypedName,
};
pub use plan::{format_plan, parse_plan, validate_plan, PlanFailure, PlanValidation};
pub use sexpr::Pos;

/// Bundled example inputs.
pub mod fixtures {
    /// Two rooms, two balls, two grippers; rooms must be lit before dropping.
    pub const GRIPPER_DOMAIN: &str = include_str!("../../fixtures/gripper-domain.pddl");
    /// Both balls start in `rooma` and must end in `roomb`.
    pub const GRIPPER_PROBLEM: &str = include_str!("../../fixtures/gripper-problem.pddl");
    /// Asks for `ball1` in both rooms at once.
    pub const GRIPPER_UNREACHABLE: &str = include_str!("../../fixtures/gripper-unreachable.pddl");
}

#[cfg(test)]
mod tests;
