//! Failure detection and isolation for networked linear systems.
//!
//! A network of identical LTI subsystems is coupled through a weighted
//! directed graph; a topology failure removes some of the links. This crate
//! answers, for a given sensor placement, whether such failures can be
//! detected and told apart from the measured outputs:
//!
//! - [`algebraic`] decides exact distinguishability of a concrete weight
//!   realization from the observability structure of the lumped system;
//! - [`structural`] gives the generic (almost-every-realization) verdict from
//!   hop distances on the graph and the transfer index of the subsystem
//!   dynamics, and cross-checks it against the exact test by sampling;
//! - [`placement`] finds small sensor sets achieving detectability or
//!   isolability via a hitting-set reduction;
//! - [`sim`] integrates trajectories and runs residual-based detection
//!   experiments under measurement noise.
//!
//! Models are built programmatically through [`netgraph`] and [`sysmodel`] or
//! loaded from JSON via [`desc`]; [`fixtures`] bundles three worked systems.

pub mod algebraic;
pub mod cli;
pub mod desc;
pub mod error;
pub mod fixtures;
mod linalg;
pub mod netgraph;
pub mod placement;
pub mod sim;
pub mod structural;
pub mod sysmodel;

pub use error::{Error, Result};
