use serde::{Deserialize, Serialize};

use crate::model::{Millis, ResourceNode, Tier};

use super::InfraError;

/// Radio power draw of the consumer device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// Watts while transmitting.
    pub p_tx_w: f64,
    /// Watts while waiting for a response.
    pub p_idle_w: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            p_tx_w: 1.3,
            p_idle_w: 0.3,
        }
    }
}

impl EnergyModel {
    pub fn is_valid(&self) -> bool {
        self.p_tx_w > 0.0 && self.p_idle_w > 0.0
    }
}

/// Time to push `bytes_mb` megabytes through a `bandwidth_mbps` link.
pub fn transmit_ms(bytes_mb: f64, bandwidth_mbps: f64) -> Millis {
    bytes_mb * 8.0 * 1000.0 / bandwidth_mbps
}

/// Device energy for one exchange: transmit power over the transfer time plus
/// idle power over the wait. Energy per byte falls as bandwidth rises.
pub fn energy_j(bytes_mb: f64, bandwidth_mbps: f64, wait_ms: Millis, model: &EnergyModel) -> f64 {
    model.p_tx_w * transmit_ms(bytes_mb, bandwidth_mbps) / 1000.0 + model.p_idle_w * wait_ms / 1000.0
}

pub fn is_dealer_open(node: &ResourceNode, t: Millis) -> Result<bool, InfraError> {
    if node.tier != Tier::Dealer {
        return Err(InfraError::NonDealerNode(node.id.clone()));
    }
    Ok(node.is_available_at(t))
}
