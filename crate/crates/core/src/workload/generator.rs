use crate::model::{ConsumerId, Millis, ServiceId};

use super::rng::SplitMix64;
use super::scenario::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct Arrival {
    pub t_ms: Millis,
    pub consumer_id: ConsumerId,
    pub service_id: ServiceId,
    /// Index of the generating stream; breaks ties between equal times.
    pub stream: u64,
}

/// One Poisson stream: exponential gaps at `rate_per_s` until `horizon_ms`
/// (exclusive). Times strictly increase.
pub fn poisson_times(rng: &mut SplitMix64, rate_per_s: f64, horizon_ms: Millis) -> Vec<Millis> {
    let mut out = Vec::new();
    if rate_per_s.is_nan() || rate_per_s <= 0.0 {
        return out;
    }
    let mut t = 0.0_f64;
    loop {
        let next = t + rng.next_exp(rate_per_s) * 1000.0;
        t = if next > t { next } else { t.next_up() };
        if t >= horizon_ms {
            return out;
        }
        out.push(t);
    }
}

/// The (consumer, service, rate) triples in stream-index order.
pub fn streams(scenario: &Scenario) -> impl Iterator<Item = (&ConsumerId, &ServiceId, f64)> {
    scenario
        .consumers
        .iter()
        .flat_map(|c| c.rates.iter().map(move |(s, r)| (&c.id, s, *r)))
}

/// All arrivals of a run, ordered by time then stream index.
pub fn generate_workload(scenario: &Scenario, seed: u64) -> Vec<Arrival> {
    let mut out: Vec<Arrival> = streams(scenario)
        .enumerate()
        .flat_map(|(i, (consumer, service, rate))| {
            let stream = i as u64;
            let mut rng = SplitMix64::stream(seed, stream);
            poisson_times(&mut rng, rate, scenario.horizon_ms)
                .into_iter()
                .map(move |t_ms| Arrival {
                    t_ms,
                    consumer_id: consumer.clone(),
                    service_id: service.clone(),
                    stream,
                })
        })
        .collect();
    out.sort_by(|a, b| a.t_ms.total_cmp(&b.t_ms).then(a.stream.cmp(&b.stream)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(rate: f64) -> Scenario {
        let text = r#"{
            "name": "g", "horizon_ms": 60000,
            "nodes": [{"id": "M1", "tier": "MNO", "cpu_speed": 1000, "cpu_slots": 1,
                       "mem_capacity": 1, "rtt_ms": 1, "bandwidth_mbps": 1,
                       "trust": {"level": "High", "basis": "Established"}, "security_norm": 1}],
            "services": [{"id": "a", "name": "a", "version": "1.0.0", "capability_tags": ["x"],
                          "cpu_demand": 0, "mem_demand": 0, "storage_demand": 0,
                          "payload_in": 0, "payload_out": 0, "security_class": "Public",
                          "sla_latency_ms": 1},
                         {"id": "b", "name": "b", "version": "1.0.0", "capability_tags": ["x"],
                          "cpu_demand": 0, "mem_demand": 0, "storage_demand": 0,
                          "payload_in": 0, "payload_out": 0, "security_class": "Public",
                          "sla_latency_ms": 1}],
            "consumers": [{"id": "c", "rates": {"a": RATE, "b": 1.0}}]
        }"#
        .replace("RATE", &rate.to_string());
        Scenario::from_json(&text, None).unwrap()
    }

    #[test]
    fn zero_rate_has_no_arrivals() {
        let w = generate_workload(&scenario(0.0), 1);
        assert!(w.iter().all(|a| a.service_id.as_str() == "b"));
        assert!(w.iter().all(|a| a.stream == 1));
    }

    #[test]
    fn deterministic_and_ordered() {
        let s = scenario(5.0);
        let a = generate_workload(&s, 7);
        assert_eq!(a, generate_workload(&s, 7));
        assert_ne!(a, generate_workload(&s, 8));
        assert!(a.windows(2).all(|w| w[0].t_ms <= w[1].t_ms));
        assert!(a.iter().all(|x| x.t_ms < 60_000.0));
    }

    #[test]
    fn streams_are_isolated() {
        // Changing one stream's rate leaves the other stream untouched.
        let only_b = |w: Vec<Arrival>| -> Vec<f64> {
            w.into_iter().filter(|a| a.service_id.as_str() == "b").map(|a| a.t_ms).collect()
        };
        assert_eq!(
            only_b(generate_workload(&scenario(5.0), 3)),
            only_b(generate_workload(&scenario(50.0), 3))
        );
    }

    #[test]
    fn first_gap_matches_hand_computation() {
        let mut rng = SplitMix64::new(3);
        let x = SplitMix64::new(3).next_u64();
        let u = ((x >> 12) as f64 + 0.5) / 4_503_599_627_370_496.0;
        let t = poisson_times(&mut rng, 2.0, 1e7);
        assert_eq!(t[0], -u.ln() / 2.0 * 1000.0);
    }
}
