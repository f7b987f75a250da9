//! Inputs shared by the benchmarks.

use uhrlab::strips::fixtures::{GRIPPER_DOMAIN, GRIPPER_PROBLEM};
use uhrlab::strips::{ground, parse};
use uhrlab::{GroundTask, TreeTask, TreeTaskSpec};

/// Full tree with goals placed from goal seed 0.
pub fn tree(b: u64, dstar: u32, g: u64) -> TreeTask {
    TreeTaskSpec::new(b, dstar, g).build().expect("valid tree")
}

/// The bundled two-ball gripper task.
pub fn gripper() -> GroundTask {
    let (d, p) = parse(GRIPPER_DOMAIN, GRIPPER_PROBLEM).expect("fixture parses");
    ground(&d, &p).expect("fixture grounds")
}
