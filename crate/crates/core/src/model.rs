//! Domain types shared by every layer, plus the admissibility gate and the
//! additive response-time model behind placement decisions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::billing::Tariff;
use crate::trust::{TrustAssessment, TrustLevel};

/// Simulated time or duration, in milliseconds.
pub type Millis = f64;

pub const MINUTES_PER_DAY: u64 = 1440;
pub const MS_PER_MINUTE: f64 = 60_000.0;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }
    };
}

string_id!(
    /// Identifier of a registered service.
    ServiceId
);
string_id!(
    /// Identifier of an infrastructure node.
    NodeId
);
string_id!(
    /// Identifier of a service consumer (a mobile user population).
    ConsumerId
);

/// Infrastructure tier, ordered by proximity to the consumer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tier {
    Dealer,
    #[serde(rename = "MNO")]
    Mno,
    Cloud,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Dealer, Tier::Mno, Tier::Cloud];

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Dealer => "Dealer",
            Tier::Mno => "MNO",
            Tier::Cloud => "Cloud",
        }
    }

    /// Tiers strictly closer to the consumer than `self`, nearest first.
    pub fn nearer(self) -> impl Iterator<Item = Tier> {
        Tier::ALL.into_iter().filter(move |t| *t < self)
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SecurityClass {
    Public,
    Sensitive,
    Critical,
}

/// Profiling fixture: an input blob and the SHA-256 hex digest of the output
/// a conforming implementation must produce for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestVector {
    pub input: String,
    pub expected_digest: String,
}

impl TestVector {
    pub fn digest_of(output: &[u8]) -> String {
        Sha256::digest(output)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// A registered service's functional contract, resource demands and
/// sensitivity flags.
///
/// Demands are per invocation: `cpu_demand` in mega-instructions, memory and
/// storage in MB, payloads in MB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceDescriptor {
    pub id: ServiceId,
    pub name: String,
    pub version: String,
    pub capability_tags: BTreeSet<String>,
    #[serde(default)]
    pub description: String,
    pub cpu_demand: f64,
    pub mem_demand: f64,
    pub storage_demand: f64,
    pub payload_in: f64,
    pub payload_out: f64,
    #[serde(default)]
    pub latency_sensitive: bool,
    #[serde(default)]
    pub data_intensive: bool,
    pub security_class: SecurityClass,
    pub sla_latency_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_vector: Option<TestVector>,
}

impl ServiceDescriptor {
    pub fn payload_mb(&self) -> f64 {
        self.payload_in + self.payload_out
    }
}

/// Daily opening window in minutes-of-day, half-open `[open, close)`.
/// A window with `open > close` wraps past midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenHours {
    pub open_minute: u32,
    pub close_minute: u32,
}

impl OpenHours {
    pub fn contains_minute(&self, minute: u32) -> bool {
        if self.open_minute <= self.close_minute {
            minute >= self.open_minute && minute < self.close_minute
        } else {
            minute >= self.open_minute || minute < self.close_minute
        }
    }

    pub fn is_open_at(&self, t: Millis) -> bool {
        self.contains_minute(minute_of_day(t))
    }
}

/// `(t / 60000) mod 1440`, floored.
pub fn minute_of_day(t: Millis) -> u32 {
    let minute = (t.max(0.0) / MS_PER_MINUTE).floor() as u64;
    (minute % MINUTES_PER_DAY) as u32
}

/// QoS parameters of the path between consumers and a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QoSParameters {
    pub wan_delay_ms: f64,
    pub jitter_ms: f64,
    pub session_reestablish_ms: f64,
    pub bandwidth_mbps: f64,
    pub security_degree: f64,
}

fn default_speed_factor() -> f64 {
    1.0
}

fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// One infrastructure endpoint.
///
/// `storage_capacity` of `None` means unbounded. `speed_factor` is the
/// fraction of the advertised `cpu_speed` the node actually delivers; the
/// arbitrator only ever sees the advertised figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceNode {
    pub id: NodeId,
    pub tier: Tier,
    pub cpu_speed: f64,
    pub cpu_slots: u32,
    pub mem_capacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage_capacity: Option<f64>,
    pub rtt_ms: f64,
    pub bandwidth_mbps: f64,
    pub internet_path: bool,
    pub trust: TrustAssessment,
    pub tariff: Tariff,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_hours: Option<OpenHours>,
    pub security_norm: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub jitter_ms: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub session_reestablish_ms: f64,
    #[serde(default = "default_speed_factor", skip_serializing_if = "is_unit")]
    pub speed_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queue_limit: Option<u32>,
}

impl ResourceNode {
    pub fn qos(&self) -> QoSParameters {
        QoSParameters {
            wan_delay_ms: self.rtt_ms,
            jitter_ms: self.jitter_ms,
            session_reestablish_ms: self.session_reestablish_ms,
            bandwidth_mbps: self.bandwidth_mbps,
            security_degree: self.security_norm,
        }
    }

    /// Dealers outside their opening window are closed; every other node is
    /// always available.
    pub fn is_available_at(&self, t: Millis) -> bool {
        match (self.tier, self.open_hours) {
            (Tier::Dealer, Some(hours)) => hours.is_open_at(t),
            (Tier::Dealer, None) => false,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlacementReason {
    SecurityPin,
    LatencyPreference,
    DataIntensive,
    CapacityFallback,
    Reschedule,
}

/// Binding of a service to a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementDecision {
    pub service_id: ServiceId,
    pub node_id: NodeId,
    pub tier: Tier,
    /// Projected per-invocation response time on `node_id`.
    pub objective_ms: Millis,
    pub reason: PlacementReason,
    pub decided_at: Millis,
}

/// Latency/cost trade-off used by the scheduler. The two weights sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulerWeights {
    #[serde(rename = "latency")]
    pub w_latency: f64,
    #[serde(rename = "cost")]
    pub w_cost: f64,
}

impl SchedulerWeights {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(w_latency: f64, w_cost: f64) -> Option<Self> {
        let w = Self { w_latency, w_cost };
        w.is_valid().then_some(w)
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.w_latency)
            && (0.0..=1.0).contains(&self.w_cost)
            && (self.w_latency + self.w_cost - 1.0).abs() <= Self::TOLERANCE
    }
}

impl Default for SchedulerWeights {
    fn default() -> Self {
        Self {
            w_latency: 0.7,
            w_cost: 0.3,
        }
    }
}

/// Stored preferences and usage counters of one consumer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub consumer_id: ConsumerId,
    pub weights: SchedulerWeights,
    #[serde(default)]
    pub invocation_history: BTreeMap<ServiceId, u64>,
}

impl UserProfile {
    pub fn new(consumer_id: ConsumerId, weights: SchedulerWeights) -> Self {
        Self {
            consumer_id,
            weights,
            invocation_history: BTreeMap::new(),
        }
    }
}

/// The first admissibility clause a node fails for a service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inadmissible {
    Capacity,
    Closed,
    Untrusted,
    Security,
}

/// Reports the first failing admissibility clause. Clauses are checked in
/// [`Inadmissible`] declaration order.
pub fn check_admission(
    service: &ServiceDescriptor,
    node: &ResourceNode,
    t: Millis,
) -> Result<(), Inadmissible> {
    let cpu_ok = service.cpu_demand <= 0.0 || (node.cpu_slots >= 1 && node.cpu_speed > 0.0);
    let storage_ok = node
        .storage_capacity
        .is_none_or(|cap| service.storage_demand <= cap);
    if !(cpu_ok && service.mem_demand <= node.mem_capacity && storage_ok) {
        return Err(Inadmissible::Capacity);
    }
    if !node.is_available_at(t) {
        return Err(Inadmissible::Closed);
    }
    if node.trust.level <= TrustLevel::Untrusted {
        return Err(Inadmissible::Untrusted);
    }
    let secure = match service.security_class {
        SecurityClass::Critical => !node.internet_path && node.tier == Tier::Mno,
        SecurityClass::Sensitive => !node.internet_path || node.trust.level >= TrustLevel::High,
        SecurityClass::Public => true,
    };
    if !secure {
        return Err(Inadmissible::Security);
    }
    Ok(())
}

pub fn is_admissible(service: &ServiceDescriptor, node: &ResourceNode, t: Millis) -> bool {
    check_admission(service, node, t).is_ok()
}

/// RTT plus payload transfer plus compute time, all in milliseconds.
pub fn projected_response_ms(service: &ServiceDescriptor, node: &ResourceNode) -> Millis {
    node.rtt_ms
        + crate::infra::transmit_ms(service.payload_mb(), node.bandwidth_mbps)
        + service.cpu_demand / node.cpu_speed * 1000.0
}
