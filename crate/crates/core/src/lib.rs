//! Escaping uninformative heuristic regions: breadth-first search versus
//! restarting random walks.
//!
//! The crate is organised around one task abstraction ([`SearchTask`]) shared by
//! every algorithm:
//!
//! - [`algorithms`]: breadth-first search with random tie-breaking, random walks,
//!   restarting random walks with constant or Luby depth policies, and enforced
//!   hill-climbing parameterised by its escape strategy.
//! - [`synthetic`]: parametric trees, stars, dead-leaf trees and UHR chains whose
//!   sizes and success probabilities are known exactly.
//! - [`analysis`]: closed-form expected runtimes, bounds and crossover points in
//!   exact rational arithmetic.
//! - [`strips`]: a small typed STRIPS front end with grounding, the unit-cost FF
//!   heuristic and a plan validator.

pub mod algorithms;
pub mod analysis;
pub mod rng;
pub mod search;
pub mod strips;
pub mod synthetic;

pub use algorithms::{
    brfs, ehc, luby, random_walk, rrw, Budget, DepthPolicy, EscapeStrategy, Outcome, WalkEnd,
    WalkResult,
};
pub use analysis::{AnalysisInput, AnalysisResult};
pub use rng::RngStream;
pub use search::{
    make_escape_task, EscapeTask, Heuristic, HeuristicValue, Junction, Path, PathError, RunStats,
    SearchTask, Termination,
};
pub use strips::{FfHeuristic, GroundTask};
pub use synthetic::{
    DeadLeafTreeSpec, StarTaskSpec, TaskSpec, TreeTask, TreeTaskSpec, UhrChainSpec, UhrLevel,
};
