//! Bundled example systems: a four-node single-integrator network, a
//! five-node network with third-order subsystems, and the IEEE 9-bus grid
//! under linearized swing dynamics. The JSON files are the single source of
//! truth; these helpers parse them.

use crate::desc::NetworkDescription;
use crate::netgraph::{FailureSet, NetworkModel};
use crate::sysmodel::SubsystemDynamics;

pub const EXAMPLE1_JSON: &str = include_str!("../fixtures/example1.json");
pub const EXAMPLE2_JSON: &str = include_str!("../fixtures/example2.json");
pub const IEEE9_JSON: &str = include_str!("../fixtures/ieee9.json");

pub fn example1() -> NetworkDescription {
    NetworkDescription::from_json(EXAMPLE1_JSON).expect("bundled fixture parses")
}

pub fn example2() -> NetworkDescription {
    NetworkDescription::from_json(EXAMPLE2_JSON).expect("bundled fixture parses")
}

pub fn ieee9() -> NetworkDescription {
    NetworkDescription::from_json(IEEE9_JSON).expect("bundled fixture parses")
}

pub fn example1_model() -> NetworkModel {
    example1().model().expect("bundled fixture is valid")
}

pub fn example1_dynamics() -> SubsystemDynamics {
    example1().subsystem_dynamics().expect("bundled fixture is valid")
}

pub fn example2_model() -> NetworkModel {
    example2().model().expect("bundled fixture is valid")
}

pub fn example2_dynamics() -> SubsystemDynamics {
    example2().subsystem_dynamics().expect("bundled fixture is valid")
}

/// The two-scenario candidate list `{{(4,5),(3,4)}, {(4,5)}}`.
pub fn example2_failure_set() -> FailureSet {
    example2().failure_set(&[]).expect("bundled fixture is valid")
}

pub fn ieee9_model() -> NetworkModel {
    ieee9().model().expect("bundled fixture is valid")
}

pub fn ieee9_dynamics() -> SubsystemDynamics {
    ieee9().subsystem_dynamics().expect("bundled fixture is valid")
}

/// All nine single-bus failures of the 9-bus grid.
pub fn ieee9_failure_set() -> FailureSet {
    ieee9().failure_set(&[]).expect("bundled fixture is valid")
}
