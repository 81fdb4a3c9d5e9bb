use serde::{Deserialize, Serialize};

use crate::model::{ResourceNode, Tier};

use super::ArbitrationError;

/// Observed `[min, max]` of one metric across the topology's clouds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRange {
    pub min: f64,
    pub max: f64,
}

impl MetricRange {
    fn empty() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn include(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    /// Position of `x` in the range, 1.0 at the max. A degenerate range
    /// places everything at the midpoint.
    pub fn higher_is_better(&self, x: f64) -> f64 {
        if self.max > self.min {
            ((x - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
        } else {
            0.5
        }
    }

    pub fn lower_is_better(&self, x: f64) -> f64 {
        if self.max > self.min {
            1.0 - self.higher_is_better(x)
        } else {
            0.5
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudNormalizers {
    pub latency: MetricRange,
    pub bandwidth: MetricRange,
    pub cost: MetricRange,
    pub security: MetricRange,
}

impl CloudNormalizers {
    /// Ranges over the cloud nodes in `nodes`; other tiers are ignored.
    pub fn from_nodes<'a>(nodes: impl IntoIterator<Item = &'a ResourceNode>) -> Self {
        let mut n = Self {
            latency: MetricRange::empty(),
            bandwidth: MetricRange::empty(),
            cost: MetricRange::empty(),
            security: MetricRange::empty(),
        };
        for node in nodes.into_iter().filter(|n| n.tier == Tier::Cloud) {
            n.latency.include(node.rtt_ms);
            n.bandwidth.include(node.bandwidth_mbps);
            n.cost.include(reference_cost(node));
            n.security.include(node.security_norm);
        }
        n
    }
}

/// Price of one invocation using one cpu-second and moving one MB.
pub fn reference_cost(node: &ResourceNode) -> f64 {
    node.tariff.price(1000.0, 1.0)
}

/// Equal-weight mean of normalized latency (inverted), bandwidth, cost
/// (inverted) and security. 1.0 is the best cloud in the population.
pub fn score_cloud(node: &ResourceNode, norms: &CloudNormalizers) -> Result<f64, ArbitrationError> {
    if node.tier != Tier::Cloud {
        return Err(ArbitrationError::NonCloudNode(node.id.clone()));
    }
    let terms = [
        norms.latency.lower_is_better(node.rtt_ms),
        norms.bandwidth.higher_is_better(node.bandwidth_mbps),
        norms.cost.lower_is_better(reference_cost(node)),
        norms.security.higher_is_better(node.security_norm),
    ];
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CloudClass {
    Low,
    Mid,
    High,
}

pub fn classify_cloud(score: f64) -> CloudClass {
    if score >= 2.0 / 3.0 {
        CloudClass::High
    } else if score >= 1.0 / 3.0 {
        CloudClass::Mid
    } else {
        CloudClass::Low
    }
}
