#![allow(dead_code)]

use sami_core::billing::Tariff;
use sami_core::trust::{TrustAssessment, TrustBasis, TrustLevel};
use sami_core::workload::Scenario;
use sami_core::{NodeId, OpenHours, ResourceNode, SecurityClass, ServiceDescriptor, ServiceId, Tier};

pub fn service(id: &str) -> ServiceDescriptor {
    ServiceDescriptor {
        id: ServiceId::new(id),
        name: id.to_owned(),
        version: "1.0.0".to_owned(),
        capability_tags: ["compute".to_owned()].into(),
        description: String::new(),
        cpu_demand: 100.0,
        mem_demand: 64.0,
        storage_demand: 0.0,
        payload_in: 0.1,
        payload_out: 0.1,
        latency_sensitive: false,
        data_intensive: false,
        security_class: SecurityClass::Public,
        sla_latency_ms: 1000.0,
        test_vector: None,
    }
}

pub fn node(id: &str, tier: Tier) -> ResourceNode {
    ResourceNode {
        id: NodeId::new(id),
        tier,
        cpu_speed: 4000.0,
        cpu_slots: 4,
        mem_capacity: 4096.0,
        storage_capacity: Some(10_000.0),
        rtt_ms: 50.0,
        bandwidth_mbps: 50.0,
        internet_path: tier == Tier::Cloud,
        trust: TrustAssessment::new(TrustLevel::High, TrustBasis::Established),
        tariff: Tariff::default_for(tier),
        open_hours: (tier == Tier::Dealer).then_some(OpenHours {
            open_minute: 0,
            close_minute: 1440,
        }),
        security_norm: 0.5,
        jitter_ms: 0.0,
        session_reestablish_ms: 0.0,
        speed_factor: 1.0,
        queue_limit: None,
    }
}

/// Scenario JSON with the given node and service blocks and one consumer
/// per `(service, rate)` pair.
pub fn scenario_json(
    horizon_ms: f64,
    nodes: &[ResourceNode],
    services: &[ServiceDescriptor],
    rates: &[(&str, f64)],
) -> String {
    let nodes: Vec<_> = nodes.iter().map(sami_core::infra::NodeSpec::from_node).collect();
    let rates: serde_json::Map<String, serde_json::Value> = rates
        .iter()
        .map(|(s, r)| ((*s).to_owned(), serde_json::json!(r)))
        .collect();
    serde_json::json!({
        "name": "test",
        "horizon_ms": horizon_ms,
        "nodes": nodes,
        "services": services,
        "consumers": [{"id": "c", "rates": rates}],
    })
    .to_string()
}

pub fn scenario(
    horizon_ms: f64,
    nodes: &[ResourceNode],
    services: &[ServiceDescriptor],
    rates: &[(&str, f64)],
) -> Scenario {
    Scenario::from_json(&scenario_json(horizon_ms, nodes, services, rates), None).unwrap()
}

pub fn shipped(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}
