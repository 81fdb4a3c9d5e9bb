//! Infrastructure physics and the discrete-event simulator.

mod physics;
mod record;
mod sim;
mod topology;

use thiserror::Error;

use crate::model::NodeId;
use crate::validation::{join_errors, FieldError};

pub use physics::{energy_j, is_dealer_open, transmit_ms, EnergyModel};
pub use record::{InvocationRecord, Outcome};
pub use sim::{simulate, ArbitrationEntry, ArbitrationKind, Policy, SimError, SimOutcome, UnknownPolicy, TICK_MS};
pub use topology::{build_topology, NodeSpec, Topology};
pub(crate) use topology::resolve_nodes;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfraError {
    #[error("invalid topology:\n{}", join_errors(.0))]
    Config(Vec<FieldError>),
    #[error("node '{0}' is not a dealer")]
    NonDealerNode(NodeId),
}
