//! Initial placement and re-placement of services.
//!
//! The decision flow restricts the admissible nodes to one preferred set,
//! then picks the node minimizing
//! `w_latency * norm(response) + w_cost * norm(charge)`, with both terms
//! min-max normalized over that set. Ties go to the lower response time, then
//! the lower charge, then the smaller node id.

use std::cmp::Ordering;

use crate::infra::transmit_ms;
use crate::model::{
    is_admissible, projected_response_ms, Millis, PlacementDecision, PlacementReason, ResourceNode,
    SchedulerWeights, SecurityClass, ServiceDescriptor, Tier,
};
use crate::infra::Topology;

use super::{ArbitrationError, RescheduleAdvice, RescheduleTrigger};

/// Price of one invocation of `desc` on `node` at its advertised speed.
pub fn projected_charge(desc: &ServiceDescriptor, node: &ResourceNode) -> f64 {
    let exec_ms = desc.cpu_demand / node.cpu_speed * 1000.0;
    node.tariff.price(exec_ms, desc.payload_mb())
}

/// A node scored against the other members of its candidate set.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub node: &'a ResourceNode,
    pub response_ms: Millis,
    pub charge: f64,
    pub objective: f64,
}

impl Candidate<'_> {
    fn rank(&self, other: &Self) -> Ordering {
        self.objective
            .total_cmp(&other.objective)
            .then(self.response_ms.total_cmp(&other.response_ms))
            .then(self.charge.total_cmp(&other.charge))
            .then_with(|| self.node.id.cmp(&other.node.id))
    }
}

fn normalized(x: f64, min: f64, max: f64) -> f64 {
    if max > min {
        (x - min) / (max - min)
    } else {
        0.0
    }
}

pub fn evaluate<'a>(
    desc: &ServiceDescriptor,
    nodes: &[&'a ResourceNode],
    weights: SchedulerWeights,
) -> Vec<Candidate<'a>> {
    let raw: Vec<(&ResourceNode, f64, f64)> = nodes
        .iter()
        .map(|n| (*n, projected_response_ms(desc, n), projected_charge(desc, n)))
        .collect();
    let bounds = |pick: fn(&(&ResourceNode, f64, f64)) -> f64| {
        raw.iter().map(pick).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
    };
    let (rmin, rmax) = bounds(|r| r.1);
    let (cmin, cmax) = bounds(|r| r.2);
    raw.into_iter()
        .map(|(node, response_ms, charge)| Candidate {
            node,
            response_ms,
            charge,
            objective: weights.w_latency * normalized(response_ms, rmin, rmax)
                + weights.w_cost * normalized(charge, cmin, cmax),
        })
        .collect()
}

pub fn select_best<'a>(
    desc: &ServiceDescriptor,
    nodes: &[&'a ResourceNode],
    weights: SchedulerWeights,
) -> Option<Candidate<'a>> {
    evaluate(desc, nodes, weights)
        .into_iter()
        .min_by(|a, b| a.rank(b))
}

fn admissible<'a>(desc: &ServiceDescriptor, topology: &'a Topology, t: Millis) -> Vec<&'a ResourceNode> {
    topology
        .nodes()
        .iter()
        .filter(|n| is_admissible(desc, n, t))
        .collect()
}

fn of_tier<'a>(nodes: &[&'a ResourceNode], tier: Tier) -> Vec<&'a ResourceNode> {
    nodes.iter().copied().filter(|n| n.tier == tier).collect()
}

/// True when some MNO exists and none of them can hold the service's data.
fn outgrows_mno_storage(desc: &ServiceDescriptor, topology: &Topology) -> bool {
    let mut mnos = topology.in_tier(Tier::Mno).peekable();
    mnos.peek().is_some()
        && mnos.all(|m| m.storage_capacity.is_some_and(|cap| desc.storage_demand > cap))
}

/// The preferred admissible set for `desc` at `t` and the reason it was chosen.
pub fn restricted_set<'a>(
    desc: &ServiceDescriptor,
    topology: &'a Topology,
    t: Millis,
) -> Result<(Vec<&'a ResourceNode>, PlacementReason), ArbitrationError> {
    let all = admissible(desc, topology, t);
    if all.is_empty() {
        return Err(ArbitrationError::NoAdmissibleNode(desc.id.clone()));
    }
    if desc.security_class == SecurityClass::Critical {
        return Ok((of_tier(&all, Tier::Mno), PlacementReason::SecurityPin));
    }
    if desc.latency_sensitive {
        let dealers = of_tier(&all, Tier::Dealer);
        if !dealers.is_empty() {
            return Ok((dealers, PlacementReason::LatencyPreference));
        }
    }
    if desc.data_intensive || outgrows_mno_storage(desc, topology) {
        let clouds = of_tier(&all, Tier::Cloud);
        if !clouds.is_empty() {
            return Ok((clouds, PlacementReason::DataIntensive));
        }
        let fallback = Tier::ALL
            .into_iter()
            .map(|tier| of_tier(&all, tier))
            .find(|set| !set.is_empty())
            .expect("admissible set is nonempty");
        return Ok((fallback, PlacementReason::CapacityFallback));
    }
    Ok((all, PlacementReason::CapacityFallback))
}

fn decision(
    desc: &ServiceDescriptor,
    best: Candidate<'_>,
    reason: PlacementReason,
    t: Millis,
) -> PlacementDecision {
    PlacementDecision {
        service_id: desc.id.clone(),
        node_id: best.node.id.clone(),
        tier: best.node.tier,
        objective_ms: best.response_ms,
        reason,
        decided_at: t,
    }
}

/// Initial placement through the tiered decision flow.
pub fn schedule_service(
    desc: &ServiceDescriptor,
    topology: &Topology,
    weights: SchedulerWeights,
    t: Millis,
) -> Result<PlacementDecision, ArbitrationError> {
    let (set, reason) = restricted_set(desc, topology, t)?;
    let best = select_best(desc, &set, weights).expect("restricted set is nonempty");
    Ok(decision(desc, best, reason, t))
}

/// Placement restricted to a single tier, bypassing the decision flow.
/// Admissibility still applies.
pub fn place_in_tier(
    desc: &ServiceDescriptor,
    topology: &Topology,
    weights: SchedulerWeights,
    t: Millis,
    tier: Tier,
) -> Result<PlacementDecision, ArbitrationError> {
    let set = of_tier(&admissible(desc, topology, t), tier);
    let best = select_best(desc, &set, weights)
        .ok_or_else(|| ArbitrationError::NoAdmissibleNode(desc.id.clone()))?;
    let reason = if desc.security_class == SecurityClass::Critical {
        PlacementReason::SecurityPin
    } else {
        PlacementReason::CapacityFallback
    };
    Ok(decision(desc, best, reason, t))
}

/// Result of a re-scheduling attempt. When `moved` is false, `decision` is
/// the unchanged current placement.
#[derive(Debug, Clone, PartialEq)]
pub struct RescheduleOutcome {
    pub decision: PlacementDecision,
    pub moved: bool,
    /// Time to ship the service's stand-alone copy to the new node.
    pub migration_ms: Millis,
}

/// Re-runs placement for a service with an advice in hand.
///
/// Candidates exclude the current node. The advice's tier hint is tried
/// first, then the decision flow's preferred set, then any admissible node.
/// The service only moves when the best candidate's response time is
/// strictly below the current one; for a compute shortfall the current
/// figure includes the observed excess.
pub fn reschedule(
    desc: &ServiceDescriptor,
    current: &PlacementDecision,
    advice: &RescheduleAdvice,
    topology: &Topology,
    weights: SchedulerWeights,
    t: Millis,
) -> Result<RescheduleOutcome, ArbitrationError> {
    reschedule_within(desc, current, advice, topology, weights, t, |_| true)
}

/// [`reschedule`] limited to nodes accepted by `allow`.
pub fn reschedule_within(
    desc: &ServiceDescriptor,
    current: &PlacementDecision,
    advice: &RescheduleAdvice,
    topology: &Topology,
    weights: SchedulerWeights,
    t: Millis,
    allow: impl Fn(&ResourceNode) -> bool,
) -> Result<RescheduleOutcome, ArbitrationError> {
    if advice.projected_gain_ms.is_nan() || advice.projected_gain_ms <= 0.0 {
        return Err(ArbitrationError::Precondition(
            "reschedule advice must carry a positive projected gain",
        ));
    }
    let eligible = |n: &&ResourceNode| n.id != current.node_id && allow(n);
    let candidates: Vec<&ResourceNode> = admissible(desc, topology, t)
        .into_iter()
        .filter(eligible)
        .collect();
    if candidates.is_empty() {
        return Err(ArbitrationError::NoAdmissibleNode(desc.id.clone()));
    }
    let hinted = advice
        .target_tier_hint
        .map(|tier| of_tier(&candidates, tier))
        .unwrap_or_default();
    let preferred = if !hinted.is_empty() {
        hinted
    } else {
        let flow: Vec<&ResourceNode> = restricted_set(desc, topology, t)
            .map(|(set, _)| set.into_iter().filter(eligible).collect())
            .unwrap_or_default();
        if flow.is_empty() {
            candidates
        } else {
            flow
        }
    };
    let best = select_best(desc, &preferred, weights).expect("preferred set is nonempty");
    let baseline = match advice.trigger {
        RescheduleTrigger::ComputeShortfall => current.objective_ms + advice.projected_gain_ms,
        RescheduleTrigger::DelayPressure => current.objective_ms,
    };
    if best.response_ms < baseline {
        Ok(RescheduleOutcome {
            decision: decision(desc, best, PlacementReason::Reschedule, t),
            moved: true,
            migration_ms: transmit_ms(desc.storage_demand, best.node.bandwidth_mbps),
        })
    } else {
        Ok(RescheduleOutcome {
            decision: current.clone(),
            moved: false,
            migration_ms: 0.0,
        })
    }
}
