use serde::{Deserialize, Serialize};

use crate::model::{ConsumerId, Millis, NodeId, ServiceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Completed,
    Rejected,
    Dropped,
}

/// Timing and billing outcome of one simulated request.
///
/// Latency is `t_done - t_arrive = transfer_ms + queue_ms + exec_ms`.
/// `queue_ms` includes any stall while a migrated service copy is in transit.
/// Requests rejected before a node was chosen carry no `node_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvocationRecord {
    pub request_id: u64,
    pub service_id: ServiceId,
    pub consumer_id: ConsumerId,
    pub node_id: Option<NodeId>,
    pub t_arrive: Millis,
    pub t_start: Millis,
    pub t_done: Millis,
    pub transfer_ms: Millis,
    pub exec_ms: Millis,
    pub queue_ms: Millis,
    /// Request plus response payload, MB.
    pub data_mb: f64,
    pub energy_j: f64,
    pub charge: f64,
    pub outcome: Outcome,
}

impl InvocationRecord {
    pub fn latency_ms(&self) -> Millis {
        self.t_done - self.t_arrive
    }
}
