//! Synthetic topologies, catalogs and scenarios for the benchmarks.

use sami_core::billing::Tariff;
use sami_core::infra::{NodeSpec, Topology};
use sami_core::registry::Registry;
use sami_core::trust::{TrustAssessment, TrustBasis, TrustLevel};
use sami_core::workload::Scenario;
use sami_core::{NodeId, OpenHours, ResourceNode, SecurityClass, ServiceDescriptor, ServiceId, Tier};

pub const TAGS: [&str; 10] = [
    "ar", "cache", "compute", "image", "ml", "payments", "speech", "storage", "translate", "video",
];

/// `per_tier` nodes in each tier with spread-out speeds and distances.
pub fn topology(per_tier: usize) -> Topology {
    let nodes = Tier::ALL
        .into_iter()
        .flat_map(|tier| (0..per_tier).map(move |i| node(tier, i)))
        .collect();
    Topology::new(nodes).expect("fixture topology is valid")
}

fn node(tier: Tier, i: usize) -> ResourceNode {
    let f = i as f64;
    let (rtt, bw, speed) = match tier {
        Tier::Dealer => (5.0 + f, 100.0, 2000.0 + 100.0 * f),
        Tier::Mno => (30.0 + 2.0 * f, 60.0, 8000.0 + 200.0 * f),
        Tier::Cloud => (120.0 + 5.0 * f, 20.0, 20_000.0 + 500.0 * f),
    };
    ResourceNode {
        id: NodeId::new(format!("{}{i:03}", &tier.as_str()[..1])),
        tier,
        cpu_speed: speed,
        cpu_slots: 4,
        mem_capacity: 8192.0,
        storage_capacity: (tier != Tier::Cloud).then_some(5000.0),
        rtt_ms: rtt,
        bandwidth_mbps: bw,
        internet_path: tier == Tier::Cloud,
        trust: TrustAssessment::new(TrustLevel::High, TrustBasis::Established),
        tariff: Tariff::default_for(tier),
        open_hours: (tier == Tier::Dealer).then_some(OpenHours {
            open_minute: 0,
            close_minute: 1440,
        }),
        security_norm: 0.8,
        jitter_ms: 0.0,
        session_reestablish_ms: 0.0,
        speed_factor: 1.0,
        queue_limit: None,
    }
}

/// Service `i` of a synthetic catalog; tags and flags cycle with `i`.
pub fn service(i: usize) -> ServiceDescriptor {
    let id = format!("svc{i:04}");
    ServiceDescriptor {
        id: ServiceId::new(id.clone()),
        name: id,
        version: "1.0.0".to_owned(),
        capability_tags: [TAGS[i % TAGS.len()], TAGS[(i * 7 + 3) % TAGS.len()]]
            .map(str::to_owned)
            .into(),
        description: String::new(),
        cpu_demand: 100.0 + (i % 13) as f64 * 50.0,
        mem_demand: 128.0,
        storage_demand: (i % 5) as f64 * 20.0,
        payload_in: 0.2,
        payload_out: 0.1,
        latency_sensitive: i.is_multiple_of(3),
        data_intensive: i.is_multiple_of(7),
        security_class: [SecurityClass::Public, SecurityClass::Sensitive, SecurityClass::Critical][i % 3],
        sla_latency_ms: 500.0,
        test_vector: None,
    }
}

/// A registry holding `n` catalog services placed on `topology`.
pub fn registry(n: usize, topology: &Topology) -> Registry {
    let mut r = Registry::new(None);
    for i in 0..n {
        r.register_service(service(i), topology, 0.0)
            .expect("fixture services are placeable");
    }
    r
}

/// A scenario with `services` services on a `per_tier` topology, each
/// requested at `rate` per second.
pub fn scenario(per_tier: usize, services: usize, rate: f64, horizon_ms: f64) -> Scenario {
    let topo = topology(per_tier);
    let nodes: Vec<NodeSpec> = topo.nodes().iter().map(NodeSpec::from_node).collect();
    let services: Vec<ServiceDescriptor> = (0..services).map(service).collect();
    let rates: serde_json::Map<String, serde_json::Value> = services
        .iter()
        .map(|s| (s.id.to_string(), serde_json::json!(rate)))
        .collect();
    let text = serde_json::json!({
        "name": "bench",
        "horizon_ms": horizon_ms,
        "nodes": nodes,
        "services": services,
        "consumers": [{"id": "c", "rates": rates}],
    })
    .to_string();
    Scenario::from_json(&text, None).expect("fixture scenario is valid")
}
