use std::collections::{BTreeMap, VecDeque};

use crate::infra::{InvocationRecord, Outcome};
use crate::model::{Millis, NodeId, ServiceId, UserProfile};
use crate::stats::{mean, nearest_rank};

use super::ArbitrationError;

/// Latest completed invocations of one service, oldest first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ServiceWindow {
    /// Every invocation event seen, completed or not.
    pub total: u64,
    samples: VecDeque<(Millis, Millis)>,
    last_event: Option<Millis>,
}

impl ServiceWindow {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn latencies(&self) -> impl Iterator<Item = Millis> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub fn mean_latency_ms(&self) -> Millis {
        mean(self.latencies())
    }

    pub fn p95_latency_ms(&self) -> Millis {
        let mut xs: Vec<f64> = self.latencies().collect();
        xs.sort_by(f64::total_cmp);
        nearest_rank(&xs, 95.0)
    }

    /// Completions per second across the window, `(n - 1) / span`.
    pub fn rate_per_s(&self) -> f64 {
        match (self.samples.front(), self.samples.back()) {
            (Some(first), Some(last)) if last.0 > first.0 => {
                (self.samples.len() - 1) as f64 / ((last.0 - first.0) / 1000.0)
            }
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeLoad {
    pub in_flight: u32,
    pub cpu_slots: u32,
}

impl NodeLoad {
    pub fn utilization(&self) -> f64 {
        if self.cpu_slots == 0 {
            0.0
        } else {
            (f64::from(self.in_flight) / f64::from(self.cpu_slots)).min(1.0)
        }
    }
}

/// Runtime view the analyzers work from.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextSnapshot {
    pub now: Millis,
    window: usize,
    services: BTreeMap<ServiceId, ServiceWindow>,
    nodes: BTreeMap<NodeId, NodeLoad>,
}

impl ContextSnapshot {
    pub fn new(window: usize) -> Self {
        Self {
            now: 0.0,
            window: window.max(1),
            services: BTreeMap::new(),
            nodes: BTreeMap::new(),
        }
    }

    pub fn window_size(&self) -> usize {
        self.window
    }

    pub fn service(&self, id: &ServiceId) -> Option<&ServiceWindow> {
        self.services.get(id)
    }

    pub fn node(&self, id: &NodeId) -> Option<&NodeLoad> {
        self.nodes.get(id)
    }

    pub fn set_node_load(&mut self, id: &NodeId, in_flight: u32, cpu_slots: u32) {
        self.nodes.insert(id.clone(), NodeLoad { in_flight, cpu_slots });
    }

    /// Forgets a service's latency samples, e.g. after it moved.
    pub fn reset_service(&mut self, id: &ServiceId) {
        if let Some(w) = self.services.get_mut(id) {
            w.samples.clear();
        }
    }

    pub fn advance_to(&mut self, now: Millis) {
        self.now = self.now.max(now);
    }
}

/// Folds one finished invocation of any outcome into the snapshot. Events must arrive in nondecreasing `t_done` order per service.
pub fn collect_context(event: &InvocationRecord, ctx: &mut ContextSnapshot) -> Result<(), ArbitrationError> {
    let window = ctx.window;
    let w = ctx.services.entry(event.service_id.clone()).or_default();
    if let Some(last) = w.last_event {
        if event.t_done < last {
            return Err(ArbitrationError::OutOfOrderEvent {
                service_id: event.service_id.clone(),
                last,
                got: event.t_done,
            });
        }
    }
    w.last_event = Some(event.t_done);
    w.total += 1;
    if event.outcome == Outcome::Completed {
        w.samples.push_back((event.t_done, event.latency_ms()));
        while w.samples.len() > window {
            w.samples.pop_front();
        }
    }
    ctx.advance_to(event.t_done);
    Ok(())
}

pub fn update_user_profile(profile: &mut UserProfile, invocation: &InvocationRecord) {
    *profile
        .invocation_history
        .entry(invocation.service_id.clone())
        .or_insert(0) += 1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConsumerId, SchedulerWeights};

    fn done(service: &str, consumer: &str, t: f64, latency: f64) -> InvocationRecord {
        InvocationRecord {
            request_id: 0,
            service_id: ServiceId::new(service),
            consumer_id: ConsumerId::new(consumer),
            node_id: None,
            t_arrive: t - latency,
            t_start: t - latency,
            t_done: t,
            transfer_ms: 0.0,
            exec_ms: latency,
            queue_ms: 0.0,
            data_mb: 0.0,
            energy_j: 0.0,
            charge: 0.0,
            outcome: Outcome::Completed,
        }
    }

    #[test]
    fn first_event() {
        let mut ctx = ContextSnapshot::new(100);
        collect_context(&done("s", "c", 10.0, 7.0), &mut ctx).unwrap();
        let w = ctx.service(&"s".into()).unwrap();
        assert_eq!(w.total, 1);
        assert_eq!(w.mean_latency_ms(), 7.0);
    }

    #[test]
    fn window_keeps_latest_hundred_and_p95() {
        let mut ctx = ContextSnapshot::new(100);
        collect_context(&done("s", "c", 0.0, 1000.0), &mut ctx).unwrap();
        for i in 1..=100 {
            collect_context(&done("s", "c", f64::from(i), f64::from(i)), &mut ctx).unwrap();
        }
        let w = ctx.service(&"s".into()).unwrap();
        assert_eq!(w.total, 101);
        assert_eq!(w.len(), 100);
        assert_eq!(w.p95_latency_ms(), 95.0);
        assert_eq!(w.mean_latency_ms(), 50.5);
    }

    #[test]
    fn out_of_order_rejected() {
        let mut ctx = ContextSnapshot::new(10);
        collect_context(&done("s", "c", 10.0, 1.0), &mut ctx).unwrap();
        assert!(matches!(
            collect_context(&done("s", "c", 9.0, 1.0), &mut ctx),
            Err(ArbitrationError::OutOfOrderEvent { .. })
        ));
        // Other services keep their own clocks.
        collect_context(&done("t", "c", 5.0, 1.0), &mut ctx).unwrap();
    }

    #[test]
    fn rate_estimate() {
        let mut ctx = ContextSnapshot::new(100);
        for i in 0..20 {
            collect_context(&done("s", "c", f64::from(i) * 100.0, 5.0), &mut ctx).unwrap();
        }
        assert!((ctx.service(&"s".into()).unwrap().rate_per_s() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn utilization() {
        let mut ctx = ContextSnapshot::new(1);
        ctx.set_node_load(&"n".into(), 3, 4);
        assert_eq!(ctx.node(&"n".into()).unwrap().utilization(), 0.75);
    }

    #[test]
    fn user_profiles_count_separately() {
        let w = SchedulerWeights::new(0.5, 0.5).unwrap();
        let mut a = UserProfile::new("a".into(), w);
        let mut b = UserProfile::new("b".into(), SchedulerWeights::default());
        update_user_profile(&mut a, &done("s", "a", 1.0, 1.0));
        for _ in 0..3 {
            update_user_profile(&mut b, &done("s", "b", 1.0, 1.0));
        }
        update_user_profile(&mut b, &done("t", "b", 1.0, 1.0));
        assert_eq!(a.invocation_history[&ServiceId::new("s")], 1);
        assert_eq!(b.invocation_history[&ServiceId::new("s")], 3);
        assert_eq!(b.invocation_history[&ServiceId::new("t")], 1);
        assert_eq!(a.weights, w);
    }
}
