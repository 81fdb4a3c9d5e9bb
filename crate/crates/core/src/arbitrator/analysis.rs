//! Performance and computational analysis: the two monitors that ask the
//! scheduler to reconsider a placement.

use serde::{Deserialize, Serialize};

use crate::infra::Topology;
use crate::model::{
    is_admissible, projected_response_ms, Millis, PlacementDecision, ServiceDescriptor, ServiceId,
    Tier,
};
use crate::stats::mean;

use super::context::ContextSnapshot;
use super::ArbitrationError;

/// Analyzer and billing knobs. Every field has a default and may be
/// overridden per scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Delay pressure threshold on `rate (1/s) * mean latency (ms)`.
    pub theta_ms_per_s: f64,
    /// Minimum projected gain before a move is advised.
    pub delta_ms: f64,
    /// Shortfall factor over expected execution time.
    pub k: f64,
    /// Consecutive slow executions needed.
    pub m: usize,
    /// Sliding window size of the context collector.
    pub window: usize,
    /// SLA tolerance of the service profiler.
    pub tol: f64,
    /// Window samples needed before delay pressure is evaluated.
    pub min_samples: usize,
    pub rebate_frac: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            theta_ms_per_s: 5000.0,
            delta_ms: 50.0,
            k: 1.5,
            m: 3,
            window: 100,
            tol: 0.2,
            min_samples: 20,
            rebate_frac: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RescheduleTrigger {
    DelayPressure,
    ComputeShortfall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescheduleAdvice {
    pub service_id: ServiceId,
    pub trigger: RescheduleTrigger,
    pub target_tier_hint: Option<Tier>,
    pub projected_gain_ms: Millis,
}

pub fn delay_pressure_exceeded(rate_per_s: f64, mean_latency_ms: Millis, theta: f64) -> bool {
    rate_per_s * mean_latency_ms > theta
}

/// Advises moving a latency-sensitive service to a nearer tier when it is
/// invoked often enough that `rate * mean latency` exceeds theta and some
/// admissible node in a nearer tier projects at least `delta_ms` faster
/// responses. The hint is the nearest tier that qualifies.
pub fn analyze_performance(
    ctx: &ContextSnapshot,
    desc: &ServiceDescriptor,
    current: &PlacementDecision,
    topology: &Topology,
    thresholds: &Thresholds,
) -> Option<RescheduleAdvice> {
    if !desc.latency_sensitive {
        return None;
    }
    let window = ctx.service(&desc.id)?;
    if window.len() < thresholds.min_samples.max(1) {
        return None;
    }
    if !delay_pressure_exceeded(
        window.rate_per_s(),
        window.mean_latency_ms(),
        thresholds.theta_ms_per_s,
    ) {
        return None;
    }
    let here = projected_response_ms(desc, topology.node(&current.node_id)?);
    current.tier.nearer().find_map(|tier| {
        let gain = topology
            .in_tier(tier)
            .filter(|n| is_admissible(desc, n, ctx.now))
            .map(|n| here - projected_response_ms(desc, n))
            .fold(f64::NEG_INFINITY, f64::max);
        (gain >= thresholds.delta_ms && gain > 0.0).then(|| RescheduleAdvice {
            service_id: desc.id.clone(),
            trigger: RescheduleTrigger::DelayPressure,
            target_tier_hint: Some(tier),
            projected_gain_ms: gain,
        })
    })
}

/// Advises a move when each of the last `m` observed execution times exceeds
/// `k * expected_exec_ms`. The projected gain is the mean observed excess.
pub fn analyze_computation(
    service_id: &ServiceId,
    observed_exec_ms: &[Millis],
    expected_exec_ms: Millis,
    k: f64,
    m: usize,
) -> Result<Option<RescheduleAdvice>, ArbitrationError> {
    if expected_exec_ms.is_nan() || expected_exec_ms <= 0.0 {
        return Err(ArbitrationError::Precondition(
            "expected execution time must be positive",
        ));
    }
    if m == 0 || observed_exec_ms.len() < m {
        return Ok(None);
    }
    let recent = &observed_exec_ms[observed_exec_ms.len() - m..];
    if !recent.iter().all(|&x| x > k * expected_exec_ms) {
        return Ok(None);
    }
    let gain = mean(observed_exec_ms.iter().copied()) - expected_exec_ms;
    Ok((gain > 0.0).then(|| RescheduleAdvice {
        service_id: service_id.clone(),
        trigger: RescheduleTrigger::ComputeShortfall,
        target_tier_hint: None,
        projected_gain_ms: gain,
    }))
}
