use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::arbitrator::{classify_cloud, score_cloud, CloudClass, CloudNormalizers};
use crate::billing::Tariff;
use crate::model::{NodeId, OpenHours, ResourceNode, Tier};
use crate::trust::{effective_trust, TrustAssessment, TrustEvidence};
use crate::validation::{Collector, FieldError};

use super::InfraError;

fn default_speed_factor() -> f64 {
    1.0
}

/// A node block as written in a scenario file.
///
/// Exactly one of `trust` (taken verbatim) or `trust_evidence` (combined with
/// [`effective_trust`]) must be given. `internet_path` defaults by tier and
/// `tariff` falls back to the tier's default price list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: String,
    pub tier: Tier,
    pub cpu_speed: f64,
    pub cpu_slots: u32,
    pub mem_capacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub storage_capacity: Option<f64>,
    pub rtt_ms: f64,
    pub bandwidth_mbps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub internet_path: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trust: Option<TrustAssessment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trust_evidence: Vec<TrustEvidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tariff: Option<Tariff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_hours: Option<OpenHours>,
    pub security_norm: f64,
    #[serde(default)]
    pub jitter_ms: f64,
    #[serde(default)]
    pub session_reestablish_ms: f64,
    #[serde(default = "default_speed_factor")]
    pub speed_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queue_limit: Option<u32>,
}

impl NodeSpec {
    /// Fully explicit block that resolves back to `node`.
    pub fn from_node(node: &ResourceNode) -> Self {
        Self {
            id: node.id.0.clone(),
            tier: node.tier,
            cpu_speed: node.cpu_speed,
            cpu_slots: node.cpu_slots,
            mem_capacity: node.mem_capacity,
            storage_capacity: node.storage_capacity,
            rtt_ms: node.rtt_ms,
            bandwidth_mbps: node.bandwidth_mbps,
            internet_path: Some(node.internet_path),
            trust: Some(node.trust),
            trust_evidence: Vec::new(),
            tariff: Some(node.tariff),
            open_hours: node.open_hours,
            security_norm: node.security_norm,
            jitter_ms: node.jitter_ms,
            session_reestablish_ms: node.session_reestablish_ms,
            speed_factor: node.speed_factor,
            queue_limit: node.queue_limit,
        }
    }

    fn resolve(&self, path: &str, errors: &mut Collector) -> Option<ResourceNode> {
        let id = NodeId::new(self.id.clone());
        let trust = match (&self.trust, self.trust_evidence.is_empty()) {
            (Some(t), true) => Some(*t),
            (None, false) => {
                let mut assessed = Vec::new();
                for (i, ev) in self.trust_evidence.iter().enumerate() {
                    match ev.assess(&id) {
                        Ok(a) => assessed.push(a),
                        Err(e) => errors.push(format!("{path}.trust_evidence[{i}]"), e.to_string()),
                    }
                    if let TrustEvidence::Reputation { complaint_rate, .. } = ev {
                        errors.unit_interval(
                            *complaint_rate,
                            &format!("{path}.trust_evidence[{i}]"),
                            "complaint_rate",
                        );
                    }
                }
                effective_trust(&assessed).ok()
            }
            (Some(_), false) => {
                errors.push(
                    format!("{path}.trust"),
                    "give either trust or trust_evidence, not both",
                );
                None
            }
            (None, true) => {
                errors.push(format!("{path}.trust"), "missing trust or trust_evidence");
                None
            }
        };
        let node = ResourceNode {
            id,
            tier: self.tier,
            cpu_speed: self.cpu_speed,
            cpu_slots: self.cpu_slots,
            mem_capacity: self.mem_capacity,
            storage_capacity: self.storage_capacity,
            rtt_ms: self.rtt_ms,
            bandwidth_mbps: self.bandwidth_mbps,
            internet_path: self.internet_path.unwrap_or(self.tier == Tier::Cloud),
            trust: trust?,
            tariff: self.tariff.unwrap_or_else(|| Tariff::default_for(self.tier)),
            open_hours: self.open_hours,
            security_norm: self.security_norm,
            jitter_ms: self.jitter_ms,
            session_reestablish_ms: self.session_reestablish_ms,
            speed_factor: self.speed_factor,
            queue_limit: self.queue_limit,
        };
        Some(node)
    }
}

pub(crate) fn validate_node(node: &ResourceNode, path: &str, errors: &mut Collector) {
    errors.check(!node.id.0.is_empty(), || format!("{path}.id"), "must not be empty");
    errors.positive(node.cpu_speed, path, "cpu_speed");
    errors.check(node.cpu_slots >= 1, || format!("{path}.cpu_slots"), "must be at least 1");
    errors.non_negative(node.mem_capacity, path, "mem_capacity");
    if let Some(cap) = node.storage_capacity {
        errors.non_negative(cap, path, "storage_capacity");
    }
    errors.positive(node.rtt_ms, path, "rtt_ms");
    errors.positive(node.bandwidth_mbps, path, "bandwidth_mbps");
    errors.unit_interval(node.security_norm, path, "security_norm");
    errors.non_negative(node.jitter_ms, path, "jitter_ms");
    errors.non_negative(node.session_reestablish_ms, path, "session_reestablish_ms");
    errors.check(
        node.speed_factor > 0.0 && node.speed_factor <= 1.0,
        || format!("{path}.speed_factor"),
        "must lie in (0, 1]",
    );
    errors.check(
        node.tariff.is_valid(),
        || format!("{path}.tariff"),
        "rates must be non-negative",
    );
    match (node.tier, node.open_hours) {
        (Tier::Dealer, None) => errors.push(format!("{path}.open_hours"), "required for Dealer nodes"),
        (Tier::Dealer, Some(h)) => errors.check(
            h.open_minute < 1440 && h.close_minute <= 1440 && h.open_minute != h.close_minute,
            || format!("{path}.open_hours"),
            "minutes must satisfy open < 1440, close <= 1440, open != close",
        ),
        (_, Some(_)) => errors.push(format!("{path}.open_hours"), "only Dealer nodes have opening hours"),
        (_, None) => {}
    }
    match node.tier {
        Tier::Mno => errors.check(
            !node.internet_path,
            || format!("{path}.internet_path"),
            "MNO nodes never route over the Internet",
        ),
        Tier::Cloud => errors.check(
            node.internet_path,
            || format!("{path}.internet_path"),
            "Cloud nodes are always reached over the Internet",
        ),
        Tier::Dealer => {}
    }
}

/// Validated infrastructure: nodes sorted by id, with cloud performance
/// classes computed against the topology's own cloud population.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<ResourceNode>,
    index: BTreeMap<NodeId, usize>,
    cloud_scores: BTreeMap<NodeId, f64>,
}

impl Topology {
    pub fn new(mut nodes: Vec<ResourceNode>) -> Result<Self, InfraError> {
        let mut errors = Collector::new();
        if nodes.is_empty() {
            errors.push("nodes", "at least one node is required");
        }
        let mut seen = BTreeSet::new();
        for (i, n) in nodes.iter().enumerate() {
            let path = format!("nodes[{i}]");
            validate_node(n, &path, &mut errors);
            if !seen.insert(n.id.clone()) {
                errors.push(format!("{path}.id"), format!("duplicate node id '{}'", n.id));
            }
        }
        if !errors.errors.is_empty() {
            return Err(InfraError::Config(errors.errors));
        }
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let index = nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        let norms = CloudNormalizers::from_nodes(nodes.iter());
        let cloud_scores = nodes
            .iter()
            .filter_map(|n| Some((n.id.clone(), score_cloud(n, &norms).ok()?)))
            .collect();
        Ok(Self {
            nodes,
            index,
            cloud_scores,
        })
    }

    pub fn nodes(&self) -> &[ResourceNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &NodeId) -> Option<&ResourceNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn in_tier(&self, tier: Tier) -> impl Iterator<Item = &ResourceNode> {
        self.nodes.iter().filter(move |n| n.tier == tier)
    }

    pub fn cloud_score(&self, id: &NodeId) -> Option<f64> {
        self.cloud_scores.get(id).copied()
    }

    pub fn cloud_class(&self, id: &NodeId) -> Option<CloudClass> {
        self.cloud_score(id).map(classify_cloud)
    }
}

/// Resolves node blocks into a [`Topology`], reporting every problem at once.
pub fn build_topology(specs: &[NodeSpec]) -> Result<Topology, InfraError> {
    let (nodes, errors) = resolve_nodes(specs, "nodes");
    if !errors.is_empty() {
        return Err(InfraError::Config(errors));
    }
    Topology::new(nodes)
}

pub(crate) fn resolve_nodes(specs: &[NodeSpec], prefix: &str) -> (Vec<ResourceNode>, Vec<FieldError>) {
    let mut errors = Collector::new();
    if specs.is_empty() {
        errors.push(prefix, "at least one node is required");
    }
    let mut seen = BTreeSet::new();
    let mut nodes = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let path = format!("{prefix}[{i}]");
        if !seen.insert(spec.id.clone()) {
            errors.push(format!("{path}.id"), format!("duplicate node id '{}'", spec.id));
        }
        if let Some(node) = spec.resolve(&path, &mut errors) {
            validate_node(&node, &path, &mut errors);
            nodes.push(node);
        }
    }
    (nodes, errors.errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trust::{TrustBasis, TrustLevel};

    fn spec(id: &str, tier: Tier) -> NodeSpec {
        NodeSpec {
            id: id.to_owned(),
            tier,
            cpu_speed: 2000.0,
            cpu_slots: 2,
            mem_capacity: 1024.0,
            storage_capacity: Some(1000.0),
            rtt_ms: 10.0,
            bandwidth_mbps: 100.0,
            internet_path: None,
            trust: Some(TrustAssessment::new(TrustLevel::High, TrustBasis::Established)),
            trust_evidence: Vec::new(),
            tariff: None,
            open_hours: (tier == Tier::Dealer).then_some(OpenHours {
                open_minute: 540,
                close_minute: 1020,
            }),
            security_norm: 0.5,
            jitter_ms: 0.0,
            session_reestablish_ms: 0.0,
            speed_factor: 1.0,
            queue_limit: None,
        }
    }

    #[test]
    fn many_dealers() {
        let mut specs: Vec<NodeSpec> = (0..1372).map(|i| spec(&format!("dealer-{i:04}"), Tier::Dealer)).collect();
        specs.push(spec("mno", Tier::Mno));
        specs.push(spec("cloud", Tier::Cloud));
        let topo = build_topology(&specs).unwrap();
        assert_eq!(topo.in_tier(Tier::Dealer).count(), 1372);
        assert_eq!(topo.len(), 1374);
        let ids: Vec<_> = topo.nodes().iter().map(|n| n.id.0.clone()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn empty_and_missing_hours_are_config_errors() {
        assert!(matches!(build_topology(&[]), Err(InfraError::Config(_))));
        let mut d = spec("d", Tier::Dealer);
        d.open_hours = None;
        let Err(InfraError::Config(errs)) = build_topology(&[d]) else {
            panic!("expected config error");
        };
        assert_eq!(errs[0].path, "nodes[0].open_hours");
    }

    #[test]
    fn tier_path_invariants() {
        let mut m = spec("m", Tier::Mno);
        m.internet_path = Some(true);
        let mut c = spec("c", Tier::Cloud);
        c.internet_path = Some(false);
        let Err(InfraError::Config(errs)) = build_topology(&[m, c]) else {
            panic!("expected config error");
        };
        let paths: Vec<_> = errs.iter().map(|e| e.path.as_str()).collect();
        assert_eq!(paths, ["nodes[0].internet_path", "nodes[1].internet_path"]);
    }

    #[test]
    fn evidence_resolves_through_effective_trust() {
        let mut c = spec("c", Tier::Cloud);
        c.trust = None;
        c.trust_evidence = vec![TrustEvidence::Reputation {
            legal_registered: true,
            years_active: 10,
            complaint_rate: 0.0,
        }];
        let topo = build_topology(&[c]).unwrap();
        assert_eq!(topo.nodes()[0].trust.level, TrustLevel::Medium);
    }

    #[test]
    fn round_trip_spec() {
        let topo = build_topology(&[spec("d", Tier::Dealer), spec("c", Tier::Cloud)]).unwrap();
        let specs: Vec<_> = topo.nodes().iter().map(NodeSpec::from_node).collect();
        assert_eq!(build_topology(&specs).unwrap(), topo);
    }
}
