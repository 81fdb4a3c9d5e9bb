//! Deterministic discrete-event simulation of one policy over one scenario.
//!
//! A request arrives, binds to its service's current node, spends
//! `rtt + transmit(payload)` in transfer, joins the node's FIFO queue and
//! executes once one of the node's `cpu_slots` is free. Every 1000 ms an
//! analysis tick evaluates each placed service and may move it; a moved
//! service's copy is in transit for `transmit(storage_demand)` and requests
//! reaching the new node before it lands wait for it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arbitrator::{
    analyze_computation, analyze_performance, collect_context, place_in_tier, reschedule_within,
    schedule_service, update_user_profile, ArbitrationError, ContextSnapshot, RescheduleAdvice,
};
use crate::billing::{apply_slo_rebate, compute_charge};
use crate::model::{
    check_admission, is_admissible, ConsumerId, Inadmissible, Millis, NodeId, PlacementDecision,
    ResourceNode, SchedulerWeights, ServiceDescriptor, ServiceId, Tier, UserProfile,
    MINUTES_PER_DAY, MS_PER_MINUTE,
};
use crate::registry::{Registry, RegistryError};
use crate::workload::{generate_workload, Scenario};

use super::{energy_j, transmit_ms, InvocationRecord, Outcome, Topology};

pub const TICK_MS: Millis = 1000.0;

/// How services are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Policy {
    /// The full tiered decision flow, with re-scheduling across tiers.
    Sami,
    /// Every placement confined to one tier; admissibility still applies.
    Pinned(Tier),
}

impl Policy {
    pub const ALL: [Policy; 4] = [
        Policy::Sami,
        Policy::Pinned(Tier::Cloud),
        Policy::Pinned(Tier::Mno),
        Policy::Pinned(Tier::Dealer),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Sami => "sami",
            Policy::Pinned(Tier::Cloud) => "cloud-only",
            Policy::Pinned(Tier::Mno) => "mno-only",
            Policy::Pinned(Tier::Dealer) => "dealer-only",
        }
    }

    fn allows(self, node: &ResourceNode) -> bool {
        match self {
            Policy::Sami => true,
            Policy::Pinned(tier) => node.tier == tier,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown policy '{0}' (expected sami, cloud-only, mno-only or dealer-only)")]
pub struct UnknownPolicy(pub String);

impl FromStr for Policy {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownPolicy(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArbitrationKind {
    /// One per service at setup, whether or not it could be placed.
    Registration,
    /// One per placed service per analysis tick.
    TickEvaluation,
    /// A placement change after setup.
    Reschedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArbitrationEntry {
    pub t_ms: Millis,
    pub kind: ArbitrationKind,
    pub service_id: ServiceId,
    /// Node the service sits on after the action, if any.
    pub node_id: Option<NodeId>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("service '{service}' cannot be registered: {source}")]
    Registration {
        service: ServiceId,
        #[source]
        source: RegistryError,
    },
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub policy: Policy,
    pub seed: u64,
    pub end_ms: Millis,
    /// Finished requests in completion order.
    pub records: Vec<InvocationRecord>,
    pub arrivals: BTreeMap<ServiceId, u64>,
    pub in_flight: BTreeMap<ServiceId, u64>,
    pub reschedules: BTreeMap<ServiceId, u64>,
    pub log: Vec<ArbitrationEntry>,
    /// Every placement in force at some point, in decision order.
    pub placements: Vec<PlacementDecision>,
    pub final_placement: BTreeMap<ServiceId, Option<PlacementDecision>>,
    /// Placement attempts that failed because the security gate excluded
    /// every otherwise admissible node.
    pub security_violations: u64,
    /// Services the policy could not place at setup.
    pub unplaced_at_setup: Vec<ServiceId>,
    pub profiles: Vec<UserProfile>,
}

impl SimOutcome {
    pub fn total_arrivals(&self) -> u64 {
        self.arrivals.values().sum()
    }

    pub fn count(&self, outcome: Outcome) -> u64 {
        self.records.iter().filter(|r| r.outcome == outcome).count() as u64
    }

    pub fn total_in_flight(&self) -> u64 {
        self.in_flight.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EventKind {
    Arrival(usize),
    TransferDone(usize),
    ExecDone(usize),
    DealerOpen(usize),
    DealerClose(usize),
    AnalysisTick,
    MigrationDone { service: usize, node: usize, generation: u64 },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time_ms: Millis,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time_ms
            .total_cmp(&self.time_ms)
            .then(other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Transfer,
    Stalled,
    Queued,
    Running,
    Finished,
}

#[derive(Debug, Clone)]
struct Request {
    service: usize,
    consumer: ConsumerId,
    node: Option<usize>,
    t_arrive: Millis,
    transfer_ms: Millis,
    t_start: Millis,
    exec_ms: Millis,
    phase: Phase,
}

#[derive(Debug, Default)]
struct NodeState {
    queue: VecDeque<usize>,
    busy: u32,
}

/// Per-service state owned by the event loop.
struct ServiceState {
    desc: ServiceDescriptor,
    weights: SchedulerWeights,
    placement: Option<PlacementDecision>,
    node: Option<usize>,
    exec_samples: Vec<Millis>,
}

struct Sim<'a> {
    scenario: &'a Scenario,
    topology: &'a Topology,
    policy: Policy,
    registry: Registry,
    services: Vec<ServiceState>,
    service_index: BTreeMap<ServiceId, usize>,
    nodes: Vec<NodeState>,
    requests: Vec<Request>,
    heap: BinaryHeap<Event>,
    seq: u64,
    ctx: ContextSnapshot,
    pending: BTreeMap<(usize, usize), u64>,
    stalled: BTreeMap<(usize, usize), Vec<usize>>,
    generation: u64,
    profiles: BTreeMap<ConsumerId, UserProfile>,
    out: SimOutcome,
}

/// Runs `scenario` under `policy` with the given seed.
///
/// Fails only when a service violates the registration standard. A service
/// the policy cannot place is still simulated: its requests are rejected
/// until a later placement attempt succeeds.
pub fn simulate(scenario: &Scenario, policy: Policy, seed: u64) -> Result<SimOutcome, SimError> {
    let mut sim = Sim::new(scenario, policy, seed);
    sim.setup()?;
    for (i, a) in generate_workload(scenario, seed).into_iter().enumerate() {
        let service = sim.service_index[&a.service_id];
        sim.requests.push(Request {
            service,
            consumer: a.consumer_id,
            node: None,
            t_arrive: a.t_ms,
            transfer_ms: 0.0,
            t_start: 0.0,
            exec_ms: 0.0,
            phase: Phase::Transfer,
        });
        sim.push(a.t_ms, EventKind::Arrival(i));
    }
    sim.schedule_dealer_hours();
    if TICK_MS < scenario.horizon_ms {
        sim.push(TICK_MS, EventKind::AnalysisTick);
    }
    sim.run();
    Ok(sim.finish())
}

impl<'a> Sim<'a> {
    fn new(scenario: &'a Scenario, policy: Policy, seed: u64) -> Self {
        let topology = &scenario.topology;
        let services: Vec<ServiceState> = scenario
            .services
            .iter()
            .map(|d| ServiceState {
                desc: d.clone(),
                weights: scenario.weights_for(&d.id),
                placement: None,
                node: None,
                exec_samples: Vec::new(),
            })
            .collect();
        let service_index = services
            .iter()
            .enumerate()
            .map(|(i, s)| (s.desc.id.clone(), i))
            .collect();
        let zero: BTreeMap<ServiceId, u64> = services.iter().map(|s| (s.desc.id.clone(), 0)).collect();
        Self {
            scenario,
            topology,
            policy,
            registry: Registry::new(scenario.vocabulary.clone()).with_weights(scenario.weights),
            services,
            service_index,
            nodes: topology.nodes().iter().map(|_| NodeState::default()).collect(),
            requests: Vec::new(),
            heap: BinaryHeap::new(),
            seq: 0,
            ctx: ContextSnapshot::new(scenario.thresholds.window),
            pending: BTreeMap::new(),
            stalled: BTreeMap::new(),
            generation: 0,
            profiles: scenario
                .profiles()
                .into_iter()
                .map(|p| (p.consumer_id.clone(), p))
                .collect(),
            out: SimOutcome {
                policy,
                seed,
                end_ms: scenario.horizon_ms,
                records: Vec::new(),
                arrivals: zero.clone(),
                in_flight: zero.clone(),
                reschedules: zero,
                log: Vec::new(),
                placements: Vec::new(),
                final_placement: BTreeMap::new(),
                security_violations: 0,
                unplaced_at_setup: Vec::new(),
                profiles: Vec::new(),
            },
        }
    }

    fn push(&mut self, time_ms: Millis, kind: EventKind) {
        self.heap.push(Event {
            time_ms,
            seq: self.seq,
            kind,
        });
        self.seq += 1;
    }

    fn log(&mut self, t_ms: Millis, kind: ArbitrationKind, service: usize) {
        let s = &self.services[service];
        self.out.log.push(ArbitrationEntry {
            t_ms,
            kind,
            service_id: s.desc.id.clone(),
            node_id: s.placement.as_ref().map(|p| p.node_id.clone()),
        });
    }

    /// One placement attempt under the policy. Counts a security violation
    /// when nothing is admissible and the security gate is what excluded
    /// some otherwise eligible node.
    fn place(&mut self, service: usize, t: Millis) -> Option<PlacementDecision> {
        let s = &self.services[service];
        let result = match self.policy {
            Policy::Sami => schedule_service(&s.desc, self.topology, s.weights, t),
            Policy::Pinned(tier) => place_in_tier(&s.desc, self.topology, s.weights, t, tier),
        };
        match result {
            Ok(d) => Some(d),
            Err(_) => {
                let policy = self.policy;
                let blocked_by_gate = self
                    .topology
                    .nodes()
                    .iter()
                    .filter(|n| policy.allows(n))
                    .any(|n| check_admission(&s.desc, n, t) == Err(Inadmissible::Security));
                if blocked_by_gate {
                    self.out.security_violations += 1;
                }
                None
            }
        }
    }

    fn setup(&mut self) -> Result<(), SimError> {
        for i in 0..self.services.len() {
            let desc = self.services[i].desc.clone();
            let decision = self.place(i, 0.0);
            let registered = self
                .registry
                .register_with(desc.clone(), 0.0, |d| {
                    decision
                        .clone()
                        .ok_or_else(|| ArbitrationError::NoAdmissibleNode(d.id.clone()))
                });
            match registered {
                Ok(_) => self.bind(i, decision.expect("registered with a placement")),
                Err(RegistryError::Arbitration(_)) => self.out.unplaced_at_setup.push(desc.id.clone()),
                Err(source) => {
                    return Err(SimError::Registration {
                        service: desc.id,
                        source,
                    })
                }
            }
            self.log(0.0, ArbitrationKind::Registration, i);
        }
        Ok(())
    }

    fn bind(&mut self, service: usize, decision: PlacementDecision) {
        let node = self.topology.index_of(&decision.node_id).expect("placement on a known node");
        let s = &mut self.services[service];
        s.node = Some(node);
        s.placement = Some(decision.clone());
        s.exec_samples.clear();
        self.out.placements.push(decision);
    }

    /// Applies a placement change after setup, shipping the service copy.
    fn relocate(&mut self, service: usize, decision: PlacementDecision, t: Millis) {
        let id = decision.service_id.clone();
        if self.registry.update_placement(decision.clone()).is_err() {
            let desc = self.services[service].desc.clone();
            let placed = decision.clone();
            self.registry
                .register_with(desc, t, move |_| Ok(placed))
                .expect("descriptor was admitted at setup");
        }
        self.bind(service, decision);
        self.ctx.reset_service(&id);
        *self.out.reschedules.get_mut(&id).expect("known service") += 1;
        self.log(t, ArbitrationKind::Reschedule, service);

        let node = self.services[service].node.expect("just bound");
        let lag = transmit_ms(
            self.services[service].desc.storage_demand,
            self.topology.nodes()[node].bandwidth_mbps,
        );
        if lag > 0.0 {
            self.generation += 1;
            self.pending.insert((service, node), self.generation);
            let generation = self.generation;
            self.push(t + lag, EventKind::MigrationDone { service, node, generation });
        }
    }

    fn schedule_dealer_hours(&mut self) {
        let horizon = self.scenario.horizon_ms;
        let day_ms = MINUTES_PER_DAY as f64 * MS_PER_MINUTE;
        let days = (horizon / day_ms).ceil() as u64;
        for (i, n) in self.topology.nodes().iter().enumerate() {
            let Some(h) = n.open_hours else { continue };
            for d in 0..=days {
                let base = d as f64 * day_ms;
                let open = base + f64::from(h.open_minute) * MS_PER_MINUTE;
                if open > 0.0 && open < horizon {
                    self.push(open, EventKind::DealerOpen(i));
                }
                if u64::from(h.close_minute) < MINUTES_PER_DAY {
                    let close = base + f64::from(h.close_minute) * MS_PER_MINUTE;
                    if close > 0.0 && close < horizon {
                        self.push(close, EventKind::DealerClose(i));
                    }
                }
            }
        }
    }

    fn run(&mut self) {
        while let Some(ev) = self.heap.pop() {
            if ev.time_ms >= self.scenario.horizon_ms {
                break;
            }
            let t = ev.time_ms;
            match ev.kind {
                EventKind::Arrival(r) => self.on_arrival(r, t),
                EventKind::TransferDone(r) => self.on_transfer_done(r, t),
                EventKind::ExecDone(r) => self.on_exec_done(r, t),
                EventKind::DealerOpen(n) => self.on_dealer_open(n, t),
                EventKind::DealerClose(n) => self.on_dealer_close(n, t),
                EventKind::AnalysisTick => self.on_tick(t),
                EventKind::MigrationDone { service, node, generation } => {
                    self.on_migration_done(service, node, generation, t)
                }
            }
        }
    }

    fn finish_request(&mut self, r: usize, t: Millis, outcome: Outcome) {
        let req = &mut self.requests[r];
        req.phase = Phase::Finished;
        let s = &self.services[req.service];
        let node = req.node.map(|n| &self.topology.nodes()[n]);
        let data_mb = s.desc.payload_mb();
        let (t_start, exec_ms) = match outcome {
            Outcome::Completed => (req.t_start, req.exec_ms),
            _ => (t, 0.0),
        };
        let mut rec = InvocationRecord {
            request_id: r as u64,
            service_id: s.desc.id.clone(),
            consumer_id: req.consumer.clone(),
            node_id: node.map(|n| n.id.clone()),
            t_arrive: req.t_arrive,
            t_start,
            t_done: t,
            transfer_ms: req.transfer_ms,
            exec_ms,
            queue_ms: if outcome == Outcome::Completed {
                req.t_start - req.t_arrive - req.transfer_ms
            } else {
                0.0
            },
            data_mb,
            energy_j: 0.0,
            charge: 0.0,
            outcome,
        };
        if let (Outcome::Completed, Some(node)) = (outcome, node) {
            let send_ms = transmit_ms(data_mb, node.bandwidth_mbps);
            rec.energy_j = energy_j(
                data_mb,
                node.bandwidth_mbps,
                (rec.latency_ms() - send_ms).max(0.0),
                &self.scenario.energy,
            );
            let charge = compute_charge(&rec, &node.tariff).expect("completed requests are billable");
            rec.charge = apply_slo_rebate(
                charge,
                &node.qos(),
                rec.latency_ms(),
                s.desc.sla_latency_ms,
                self.scenario.thresholds.rebate_frac,
            );
        }
        // Only requests bound to the service's current node feed its window.
        if req.node.is_some() && req.node == s.node {
            collect_context(&rec, &mut self.ctx).expect("completions are time ordered");
        }
        if let Some(p) = self.profiles.get_mut(&rec.consumer_id) {
            update_user_profile(p, &rec);
        }
        self.out.records.push(rec);
    }

    fn on_arrival(&mut self, r: usize, t: Millis) {
        let service = self.requests[r].service;
        *self
            .out
            .arrivals
            .get_mut(&self.services[service].desc.id)
            .expect("known service") += 1;

        let usable = self.services[service]
            .node
            .is_some_and(|n| is_admissible(&self.services[service].desc, &self.topology.nodes()[n], t));
        if !usable {
            match self.place(service, t) {
                Some(d) => self.relocate(service, d, t),
                None => {
                    self.finish_request(r, t, Outcome::Rejected);
                    return;
                }
            }
        }
        let node_ix = self.services[service].node.expect("placed");
        let node = &self.topology.nodes()[node_ix];
        let desc = &self.services[service].desc;
        let transfer = node.rtt_ms + transmit_ms(desc.payload_mb(), node.bandwidth_mbps);
        let req = &mut self.requests[r];
        req.node = Some(node_ix);
        req.transfer_ms = transfer;
        let waiting = self.nodes[node_ix].queue.len()
            + self
                .stalled
                .iter()
                .filter(|((_, n), _)| *n == node_ix)
                .map(|(_, v)| v.len())
                .sum::<usize>();
        if node.queue_limit.is_some_and(|cap| waiting >= cap as usize) {
            self.finish_request(r, t, Outcome::Dropped);
            return;
        }
        self.push(t + transfer, EventKind::TransferDone(r));
    }

    fn on_transfer_done(&mut self, r: usize, t: Millis) {
        let service = self.requests[r].service;
        let node_ix = self.requests[r].node.expect("bound at arrival");
        let node = &self.topology.nodes()[node_ix];
        if node.tier == Tier::Dealer && !node.is_available_at(t) {
            self.finish_request(r, t, Outcome::Rejected);
            return;
        }
        if self.pending.contains_key(&(service, node_ix)) {
            self.requests[r].phase = Phase::Stalled;
            self.stalled.entry((service, node_ix)).or_default().push(r);
            return;
        }
        self.requests[r].phase = Phase::Queued;
        self.nodes[node_ix].queue.push_back(r);
        self.try_start(node_ix, t);
    }

    fn try_start(&mut self, node_ix: usize, t: Millis) {
        let node = &self.topology.nodes()[node_ix];
        if node.tier == Tier::Dealer && !node.is_available_at(t) {
            return;
        }
        while self.nodes[node_ix].busy < node.cpu_slots {
            let Some(r) = self.nodes[node_ix].queue.pop_front() else { break };
            let desc = &self.services[self.requests[r].service].desc;
            let exec = desc.cpu_demand / (node.cpu_speed * node.speed_factor) * 1000.0;
            let req = &mut self.requests[r];
            req.phase = Phase::Running;
            req.t_start = t;
            req.exec_ms = exec;
            self.nodes[node_ix].busy += 1;
            self.push(t + exec, EventKind::ExecDone(r));
        }
        self.ctx
            .set_node_load(&node.id, self.nodes[node_ix].busy, node.cpu_slots);
    }

    fn on_exec_done(&mut self, r: usize, t: Millis) {
        let node_ix = self.requests[r].node.expect("bound");
        self.nodes[node_ix].busy -= 1;
        let service = self.requests[r].service;
        if self.services[service].node == Some(node_ix) {
            let window = self.scenario.thresholds.window;
            let samples = &mut self.services[service].exec_samples;
            samples.push(self.requests[r].exec_ms);
            if samples.len() > window {
                samples.remove(0);
            }
        }
        self.finish_request(r, t, Outcome::Completed);
        self.try_start(node_ix, t);
    }

    fn on_dealer_close(&mut self, node_ix: usize, t: Millis) {
        let queued: Vec<usize> = self.nodes[node_ix].queue.drain(..).collect();
        let stalled_keys: Vec<(usize, usize)> = self
            .stalled
            .keys()
            .filter(|(_, n)| *n == node_ix)
            .copied()
            .collect();
        let mut rejected = queued;
        for k in stalled_keys {
            rejected.extend(self.stalled.remove(&k).unwrap_or_default());
        }
        for r in rejected {
            self.finish_request(r, t, Outcome::Rejected);
        }
    }

    fn on_dealer_open(&mut self, node_ix: usize, t: Millis) {
        if self.policy == Policy::Sami {
            for i in 0..self.services.len() {
                let Some(current) = self.services[i].placement.clone() else { continue };
                if current.tier == Tier::Dealer {
                    continue;
                }
                let s = &self.services[i];
                if let Ok(d) = schedule_service(&s.desc, self.topology, s.weights, t) {
                    if d.tier == Tier::Dealer && d.node_id != current.node_id {
                        self.relocate(i, d, t);
                    }
                }
            }
        }
        self.try_start(node_ix, t);
    }

    fn advice_for(&self, service: usize, t: Millis) -> Option<RescheduleAdvice> {
        let s = &self.services[service];
        let current = s.placement.as_ref()?;
        let node = &self.topology.nodes()[s.node?];
        let mut ctx = self.ctx.clone();
        ctx.advance_to(t);
        if let Some(a) = analyze_performance(&ctx, &s.desc, current, self.topology, &self.scenario.thresholds) {
            return Some(a);
        }
        if s.desc.cpu_demand <= 0.0 {
            return None;
        }
        let expected = s.desc.cpu_demand / node.cpu_speed * 1000.0;
        let th = &self.scenario.thresholds;
        analyze_computation(&s.desc.id, &s.exec_samples, expected, th.k, th.m)
            .ok()
            .flatten()
    }

    fn on_tick(&mut self, t: Millis) {
        self.ctx.advance_to(t);
        for i in 0..self.services.len() {
            if self.services[i].placement.is_none() {
                continue;
            }
            self.log(t, ArbitrationKind::TickEvaluation, i);
            let Some(advice) = self.advice_for(i, t) else { continue };
            let s = &self.services[i];
            let current = s.placement.clone().expect("checked above");
            let policy = self.policy;
            if let Ok(out) = reschedule_within(
                &s.desc,
                &current,
                &advice,
                self.topology,
                s.weights,
                t,
                |n| policy.allows(n),
            ) {
                if out.moved {
                    self.relocate(i, out.decision, t);
                }
            }
        }
        if t + TICK_MS < self.scenario.horizon_ms {
            self.push(t + TICK_MS, EventKind::AnalysisTick);
        }
    }

    fn on_migration_done(&mut self, service: usize, node_ix: usize, generation: u64, t: Millis) {
        if self.pending.get(&(service, node_ix)) != Some(&generation) {
            return;
        }
        self.pending.remove(&(service, node_ix));
        for r in self.stalled.remove(&(service, node_ix)).unwrap_or_default() {
            self.requests[r].phase = Phase::Queued;
            self.nodes[node_ix].queue.push_back(r);
        }
        self.try_start(node_ix, t);
    }

    fn finish(mut self) -> SimOutcome {
        for req in &self.requests {
            if req.phase != Phase::Finished {
                *self
                    .out
                    .in_flight
                    .get_mut(&self.services[req.service].desc.id)
                    .expect("known service") += 1;
            }
        }
        for s in &self.services {
            self.out
                .final_placement
                .insert(s.desc.id.clone(), s.placement.clone());
        }
        self.out.profiles = self.profiles.into_values().collect();
        self.out
    }
}
