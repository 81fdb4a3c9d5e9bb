use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arbitrator::{TagVocabulary, Thresholds};
use crate::billing::Tariff;
use crate::infra::{resolve_nodes, EnergyModel, InfraError, NodeSpec, Topology};
use crate::model::{ConsumerId, Millis, SchedulerWeights, ServiceDescriptor, ServiceId, Tier, UserProfile};
use crate::validation::{join_errors, Collector, FieldError};

/// A consumer population and its per-service request rates (req/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumerSpec {
    pub id: ConsumerId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<SchedulerWeights>,
    pub rates: BTreeMap<ServiceId, f64>,
}

impl ConsumerSpec {
    pub fn profile(&self, default: SchedulerWeights) -> UserProfile {
        UserProfile::new(self.id.clone(), self.weights.unwrap_or(default))
    }
}

/// On-disk layout of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    seed: u64,
    horizon_ms: Millis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag_vocabulary: Option<String>,
    #[serde(default)]
    weights: SchedulerWeights,
    #[serde(default)]
    thresholds: Thresholds,
    #[serde(default)]
    energy: EnergyModel,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    tariffs: BTreeMap<Tier, Tariff>,
    nodes: Vec<NodeSpec>,
    services: Vec<ServiceDescriptor>,
    consumers: Vec<ConsumerSpec>,
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub horizon_ms: Millis,
    /// Vocabulary path as written, relative to the scenario file.
    pub tag_vocabulary: Option<String>,
    pub vocabulary: Option<TagVocabulary>,
    pub weights: SchedulerWeights,
    pub thresholds: Thresholds,
    pub energy: EnergyModel,
    /// Per-tier price lists for nodes that declare none.
    pub tariffs: BTreeMap<Tier, Tariff>,
    pub node_specs: Vec<NodeSpec>,
    pub topology: Topology,
    pub services: Vec<ServiceDescriptor>,
    pub consumers: Vec<ConsumerSpec>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("invalid scenario:\n{}", join_errors(.0))]
    Validation(Vec<FieldError>),
}

impl ScenarioError {
    pub fn field_errors(&self) -> &[FieldError] {
        match self {
            ScenarioError::Validation(v) => v,
            _ => &[],
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_owned(),
        source,
    })?;
    Scenario::from_json(&text, path.parent())
}

fn validate_thresholds(t: &Thresholds, errors: &mut Collector) {
    let p = "thresholds";
    errors.positive(t.theta_ms_per_s, p, "theta_ms_per_s");
    errors.non_negative(t.delta_ms, p, "delta_ms");
    errors.check(t.k.is_finite() && t.k >= 1.0, || format!("{p}.k"), "must be at least 1");
    errors.check(t.m >= 1, || format!("{p}.m"), "must be at least 1");
    errors.check(t.window >= 1, || format!("{p}.window"), "must be at least 1");
    errors.non_negative(t.tol, p, "tol");
    errors.check(t.min_samples >= 1, || format!("{p}.min_samples"), "must be at least 1");
    errors.check(
        t.min_samples <= t.window,
        || format!("{p}.min_samples"),
        "must not exceed the window",
    );
    errors.unit_interval(t.rebate_frac, p, "rebate_frac");
}

impl Scenario {
    /// Parses and validates a scenario. `base_dir` anchors a relative
    /// vocabulary path; without one the path is used as given.
    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self, ScenarioError> {
        let mut unknown = Vec::new();
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_ignored::deserialize(de, |path| {
            unknown.push(FieldError::new(path.to_string(), "unknown field"))
        })
        .map_err(|e| ScenarioError::Parse(e.to_string()))?;
        let mut errors = Collector::new();
        errors.errors.extend(unknown);
        let scenario = Self::validate(file, base_dir, &mut errors);
        match scenario {
            Some(s) if errors.errors.is_empty() => Ok(s),
            _ => Err(ScenarioError::Validation(errors.errors)),
        }
    }

    fn validate(file: ScenarioFile, base_dir: Option<&Path>, errors: &mut Collector) -> Option<Self> {
        errors.check(!file.name.trim().is_empty(), || "name".into(), "must not be empty");
        errors.check(
            file.horizon_ms.is_finite() && file.horizon_ms > 0.0,
            || "horizon_ms".into(),
            "must be a positive number",
        );
        errors.check(file.weights.is_valid(), || "weights".into(), "weights must lie in [0, 1] and sum to 1");
        validate_thresholds(&file.thresholds, errors);
        errors.check(
            file.energy.is_valid(),
            || "energy".into(),
            "p_tx_w and p_idle_w must be positive",
        );
        for (tier, tariff) in &file.tariffs {
            errors.check(
                tariff.is_valid(),
                || format!("tariffs.{}", tier.as_str()),
                "rates must be non-negative",
            );
        }

        let vocabulary = file.tag_vocabulary.as_ref().and_then(|rel| {
            let path = base_dir.map_or_else(|| PathBuf::from(rel), |d| d.join(rel));
            TagVocabulary::load(&path)
                .map_err(|e| errors.push("tag_vocabulary", format!("{}: {e}", path.display())))
                .ok()
        });

        let priced: Vec<NodeSpec> = file.node_specs_with_tariffs().collect();
        let (nodes, node_errors) = resolve_nodes(&priced, "nodes");
        errors.errors.extend(node_errors);

        let mut service_ids = BTreeSet::new();
        for (i, s) in file.services.iter().enumerate() {
            if !service_ids.insert(s.id.clone()) {
                errors.push(format!("services[{i}].id"), format!("duplicate service id '{}'", s.id));
            }
        }
        let mut consumer_ids = BTreeSet::new();
        for (i, c) in file.consumers.iter().enumerate() {
            let path = format!("consumers[{i}]");
            if !consumer_ids.insert(c.id.clone()) {
                errors.push(format!("{path}.id"), format!("duplicate consumer id '{}'", c.id));
            }
            if let Some(w) = c.weights {
                errors.check(w.is_valid(), || format!("{path}.weights"), "weights must lie in [0, 1] and sum to 1");
            }
            for (sid, rate) in &c.rates {
                let rpath = format!("{path}.rates.{sid}");
                errors.check(service_ids.contains(sid), || rpath.clone(), "unknown service id");
                errors.check(rate.is_finite() && *rate >= 0.0, || rpath.clone(), "rate must be a non-negative number");
            }
        }

        if !errors.errors.is_empty() {
            return None;
        }
        let topology = match Topology::new(nodes) {
            Ok(t) => t,
            Err(InfraError::Config(e)) => {
                errors.errors.extend(e);
                return None;
            }
            Err(e) => {
                errors.push("nodes", e.to_string());
                return None;
            }
        };
        Some(Self {
            name: file.name,
            seed: file.seed,
            horizon_ms: file.horizon_ms,
            tag_vocabulary: file.tag_vocabulary,
            vocabulary,
            weights: file.weights,
            thresholds: file.thresholds,
            energy: file.energy,
            tariffs: file.tariffs,
            node_specs: file.nodes,
            topology,
            services: file.services,
            consumers: file.consumers,
        })
    }

    fn to_file_model(&self) -> ScenarioFile {
        ScenarioFile {
            name: self.name.clone(),
            seed: self.seed,
            horizon_ms: self.horizon_ms,
            tag_vocabulary: self.tag_vocabulary.clone(),
            weights: self.weights,
            thresholds: self.thresholds.clone(),
            energy: self.energy,
            tariffs: self.tariffs.clone(),
            nodes: self.node_specs.clone(),
            services: self.services.clone(),
            consumers: self.consumers.clone(),
        }
    }

    /// Serializes with every default written out explicitly.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file_model()).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn to_file(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn service(&self, id: &ServiceId) -> Option<&ServiceDescriptor> {
        self.services.iter().find(|s| &s.id == id)
    }

    /// Weights the scheduler uses for `service`: the override of its
    /// heaviest consumer (highest rate, ties by consumer id) when that
    /// consumer declares one, the scenario default otherwise.
    pub fn weights_for(&self, service: &ServiceId) -> SchedulerWeights {
        self.consumers
            .iter()
            .filter_map(|c| c.rates.get(service).map(|r| (c, *r)))
            .filter(|(_, r)| *r > 0.0)
            .min_by(|(a, ra), (b, rb)| rb.total_cmp(ra).then_with(|| a.id.cmp(&b.id)))
            .and_then(|(c, _)| c.weights)
            .unwrap_or(self.weights)
    }

    pub fn profiles(&self) -> Vec<UserProfile> {
        self.consumers.iter().map(|c| c.profile(self.weights)).collect()
    }
}

impl ScenarioFile {
    fn node_specs_with_tariffs(&self) -> impl Iterator<Item = NodeSpec> + '_ {
        self.nodes.iter().map(|n| {
            let mut n = n.clone();
            if n.tariff.is_none() {
                n.tariff = self.tariffs.get(&n.tier).copied();
            }
            n
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"{
        "name": "minimal",
        "horizon_ms": 10000,
        "nodes": [{"id": "M1", "tier": "MNO", "cpu_speed": 4000, "cpu_slots": 2,
                   "mem_capacity": 1024, "rtt_ms": 40, "bandwidth_mbps": 50,
                   "trust": {"level": "High", "basis": "Established"},
                   "security_norm": 0.8}],
        "services": [{"id": "s", "name": "s", "version": "1.0.0",
                      "capability_tags": ["compute"], "cpu_demand": 100,
                      "mem_demand": 10, "storage_demand": 1, "payload_in": 0.1,
                      "payload_out": 0.1, "security_class": "Public",
                      "sla_latency_ms": 500}],
        "consumers": [{"id": "c", "rates": {"s": 2.0}}]
    }"#;

    #[test]
    fn minimal_file_loads_with_defaults() {
        let s = Scenario::from_json(MINIMAL, None).unwrap();
        assert_eq!(s.topology.len(), 1);
        assert_eq!(s.thresholds, Thresholds::default());
        assert_eq!(s.weights, SchedulerWeights::default());
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn unknown_fields_are_named() {
        let text = MINIMAL.replacen("\"seed_typo\"", "", 1).replacen(
            "\"horizon_ms\": 10000,",
            "\"horizon_ms\": 10000, \"colour\": 1,",
            1,
        );
        let text = text.replacen("\"cpu_slots\": 2,", "\"cpu_slots\": 2, \"gpu\": true,", 1);
        let err = Scenario::from_json(&text, None).unwrap_err();
        let paths: Vec<_> = err.field_errors().iter().map(|e| e.path.clone()).collect();
        assert_eq!(paths.len(), 2, "{paths:?}");
        assert!(paths[0].contains("colour"));
        assert!(paths[1].contains("gpu") && paths[1].contains("nodes"));
    }

    #[test]
    fn all_errors_reported_at_once() {
        let text = MINIMAL
            .replace("\"s\": 2.0", "\"s\": -1, \"ghost\": 1")
            .replace("\"horizon_ms\": 10000", "\"horizon_ms\": 0");
        let err = Scenario::from_json(&text, None).unwrap_err();
        let paths: Vec<_> = err.field_errors().iter().map(|e| e.path.as_str()).collect();
        assert_eq!(paths, ["horizon_ms", "consumers[0].rates.ghost", "consumers[0].rates.s"]);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(Scenario::from_json("{", None), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn round_trip() {
        let s = Scenario::from_json(MINIMAL, None).unwrap();
        let again = Scenario::from_json(&s.to_json(), None).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.to_json(), again.to_json());
    }

    #[test]
    fn tier_tariffs_fill_gaps() {
        let text = MINIMAL.replace(
            "\"nodes\"",
            "\"tariffs\": {\"MNO\": {\"base_fee\": 9, \"cpu_rate\": 0, \"data_rate\": 0}}, \"nodes\"",
        );
        let s = Scenario::from_json(&text, None).unwrap();
        assert_eq!(s.topology.nodes()[0].tariff.base_fee, 9.0);
    }

    #[test]
    fn weights_follow_heaviest_consumer() {
        let text = MINIMAL.replace(
            r#"[{"id": "c", "rates": {"s": 2.0}}]"#,
            r#"[{"id": "a", "rates": {"s": 1.0}},
                {"id": "b", "weights": {"latency": 0.5, "cost": 0.5}, "rates": {"s": 3.0}}]"#,
        );
        let s = Scenario::from_json(&text, None).unwrap();
        assert_eq!(s.weights_for(&"s".into()), SchedulerWeights::new(0.5, 0.5).unwrap());
    }
}
