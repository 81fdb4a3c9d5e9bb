//! Service registry: registration, discovery, matching, composition and
//! record replacement.
//!
//! The registry is a plain value. Callers needing shared access wrap it in
//! a [`SharedRegistry`], which admits concurrent readers and serializes
//! every mutation through one writer.

mod envelope;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, RwLock};

use semver::Version;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arbitrator::{enforce_standard, schedule_service, ArbitrationError, TagVocabulary, Violation};
use crate::infra::Topology;
use crate::model::{Millis, PlacementDecision, SchedulerWeights, ServiceDescriptor, ServiceId};

pub use envelope::{handle_json, handle_request, ErrorBody, Request, Response};

pub type SharedRegistry = Arc<RwLock<Registry>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecordState {
    Active,
    Replaced,
    Deregistered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceRecord {
    pub descriptor: ServiceDescriptor,
    pub placement: PlacementDecision,
    pub registered_at: Millis,
    pub state: RecordState,
    /// Successor of a `Replaced` record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replaced_by: Option<ServiceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FunctionalSpec {
    pub required_tags: BTreeSet<String>,
    /// When nonempty, a record qualifies only if its description contains
    /// at least one keyword (case-insensitive).
    #[serde(default)]
    pub keywords: Vec<String>,
}

impl FunctionalSpec {
    pub fn new<I, S>(tags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            required_tags: tags.into_iter().map(Into::into).collect(),
            keywords: Vec::new(),
        }
    }

    fn admits(&self, desc: &ServiceDescriptor) -> bool {
        if self.keywords.is_empty() {
            return true;
        }
        let text = desc.description.to_lowercase();
        self.keywords.iter().any(|k| text.contains(&k.to_lowercase()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositePlan {
    pub steps: Vec<ServiceId>,
    pub covered_tags: BTreeSet<String>,
    pub residual_tags: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceMatch {
    pub record: ServiceRecord,
    /// Jaccard overlap of the query tags and the record's tags.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("service '{name}' version {version} is already registered")]
    DuplicateService { name: String, version: String },
    #[error("service id '{0}' is already in use")]
    DuplicateId(ServiceId),
    #[error("descriptor violates the registration standard: {}", crate::validation::join_errors(.0))]
    StandardViolation(Vec<Violation>),
    #[error(transparent)]
    Arbitration(#[from] ArbitrationError),
    #[error("no active service matches '{0}'")]
    NotFound(String),
    #[error("replacement lacks tags {missing:?}")]
    IncompatibleReplacement { missing: BTreeSet<String> },
    #[error("no registered service provides tags {residual:?}")]
    UncoverableGoal { residual: BTreeSet<String> },
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    records: BTreeMap<ServiceId, ServiceRecord>,
    vocabulary: Option<TagVocabulary>,
    weights: SchedulerWeights,
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn version_of(desc: &ServiceDescriptor) -> Option<Version> {
    Version::parse(&desc.version).ok()
}

/// Name ascending, then newer version first, then id.
fn catalog_order(a: &ServiceDescriptor, b: &ServiceDescriptor) -> Ordering {
    a.name
        .cmp(&b.name)
        .then_with(|| version_of(b).cmp(&version_of(a)))
        .then_with(|| a.id.cmp(&b.id))
}

impl Registry {
    pub fn new(vocabulary: Option<TagVocabulary>) -> Self {
        Self {
            vocabulary,
            ..Self::default()
        }
    }

    pub fn with_weights(mut self, weights: SchedulerWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn vocabulary(&self) -> Option<&TagVocabulary> {
        self.vocabulary.as_ref()
    }

    pub fn into_shared(self) -> SharedRegistry {
        Arc::new(RwLock::new(self))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &ServiceRecord> {
        self.records.values()
    }

    pub fn get(&self, id: &ServiceId) -> Option<&ServiceRecord> {
        self.records.get(id)
    }

    pub fn active(&self, id: &ServiceId) -> Result<&ServiceRecord, RegistryError> {
        self.records
            .get(id)
            .filter(|r| r.state == RecordState::Active)
            .ok_or_else(|| RegistryError::NotFound(id.to_string()))
    }

    fn active_records(&self) -> impl Iterator<Item = &ServiceRecord> {
        self.records.values().filter(|r| r.state == RecordState::Active)
    }

    fn admit(&self, desc: &ServiceDescriptor) -> Result<(), RegistryError> {
        let violations = enforce_standard(desc, self.vocabulary.as_ref());
        if !violations.is_empty() {
            return Err(RegistryError::StandardViolation(violations));
        }
        if self.records.contains_key(&desc.id) {
            return Err(RegistryError::DuplicateId(desc.id.clone()));
        }
        let version = version_of(desc);
        if self
            .active_records()
            .any(|r| r.descriptor.name == desc.name && version_of(&r.descriptor) == version)
        {
            return Err(RegistryError::DuplicateService {
                name: desc.name.clone(),
                version: desc.version.clone(),
            });
        }
        Ok(())
    }

    /// Registers `desc` with a placement from the full decision flow under
    /// the registry's default weights.
    pub fn register_service(
        &mut self,
        desc: ServiceDescriptor,
        topology: &Topology,
        t: Millis,
    ) -> Result<ServiceRecord, RegistryError> {
        let weights = self.weights;
        self.register_with(desc, t, |d| schedule_service(d, topology, weights, t))
    }

    /// Registers `desc` with a placement produced by `place`, which only
    /// runs once the descriptor has been admitted.
    pub fn register_with(
        &mut self,
        desc: ServiceDescriptor,
        t: Millis,
        place: impl FnOnce(&ServiceDescriptor) -> Result<PlacementDecision, ArbitrationError>,
    ) -> Result<ServiceRecord, RegistryError> {
        self.admit(&desc)?;
        let placement = place(&desc)?;
        let record = ServiceRecord {
            descriptor: desc,
            placement,
            registered_at: t,
            state: RecordState::Active,
            replaced_by: None,
        };
        self.records
            .insert(record.descriptor.id.clone(), record.clone());
        Ok(record)
    }

    /// Records a new placement for an active service.
    pub fn update_placement(&mut self, decision: PlacementDecision) -> Result<(), RegistryError> {
        let rec = self
            .records
            .get_mut(&decision.service_id)
            .filter(|r| r.state == RecordState::Active)
            .ok_or_else(|| RegistryError::NotFound(decision.service_id.to_string()))?;
        rec.placement = decision;
        Ok(())
    }

    /// The active record named `name`, at `version` when given and the
    /// highest version otherwise. A name whose records were all replaced
    /// resolves through the forwarding links to the live successor.
    pub fn discover_service(&self, name: &str, version: Option<&str>) -> Result<&ServiceRecord, RegistryError> {
        let wanted = match version {
            Some(v) => Some(Version::parse(v).map_err(|_| RegistryError::NotFound(format!("{name}@{v}")))?),
            None => None,
        };
        let not_found = || RegistryError::NotFound(match version {
            Some(v) => format!("{name}@{v}"),
            None => name.to_owned(),
        });
        let best = |state: RecordState| {
            self.records
                .values()
                .filter(|r| r.state == state && r.descriptor.name == name)
                .filter(|r| wanted.is_none() || version_of(&r.descriptor) == wanted)
                .min_by(|a, b| catalog_order(&a.descriptor, &b.descriptor))
        };
        if let Some(r) = best(RecordState::Active) {
            return Ok(r);
        }
        let mut cursor = best(RecordState::Replaced).ok_or_else(not_found)?;
        for _ in 0..=self.records.len() {
            match cursor.state {
                RecordState::Active => return Ok(cursor),
                RecordState::Deregistered => break,
                RecordState::Replaced => {
                    cursor = cursor
                        .replaced_by
                        .as_ref()
                        .and_then(|id| self.records.get(id))
                        .ok_or_else(not_found)?;
                }
            }
        }
        Err(not_found())
    }

    /// Active records sharing at least one tag with the query, best Jaccard
    /// score first; equal scores by name, newer version, then id.
    pub fn match_services(&self, query: &FunctionalSpec) -> Vec<ServiceMatch> {
        let mut out: Vec<ServiceMatch> = self
            .active_records()
            .filter(|r| query.admits(&r.descriptor))
            .map(|r| ServiceMatch {
                score: jaccard(&query.required_tags, &r.descriptor.capability_tags),
                record: r.clone(),
            })
            .filter(|m| m.score > 0.0)
            .collect();
        out.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| catalog_order(&a.record.descriptor, &b.record.descriptor))
        });
        out
    }

    /// Greedy set cover of `goal.required_tags` by active records: each step
    /// takes the record adding the most uncovered tags, ties by name then id.
    pub fn compose_services(&self, goal: &FunctionalSpec) -> Result<CompositePlan, RegistryError> {
        let mut residual = goal.required_tags.clone();
        let mut covered = BTreeSet::new();
        let mut steps = Vec::new();
        let mut pool: Vec<&ServiceRecord> = self
            .active_records()
            .filter(|r| goal.admits(&r.descriptor))
            .collect();
        pool.sort_by(|a, b| {
            a.descriptor
                .name
                .cmp(&b.descriptor.name)
                .then_with(|| a.descriptor.id.cmp(&b.descriptor.id))
        });
        while !residual.is_empty() {
            let pick = pool
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.descriptor.capability_tags.intersection(&residual).count()))
                .filter(|&(_, gain)| gain > 0)
                .fold(None, |best: Option<(usize, usize)>, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            let Some((i, _)) = pick else { break };
            let rec = pool.remove(i);
            for tag in &rec.descriptor.capability_tags {
                if residual.remove(tag) {
                    covered.insert(tag.clone());
                }
            }
            steps.push(rec.descriptor.id.clone());
        }
        if residual.is_empty() {
            Ok(CompositePlan {
                steps,
                covered_tags: covered,
                residual_tags: residual,
            })
        } else {
            Err(RegistryError::UncoverableGoal { residual })
        }
    }

    /// Retires `old_id` in favour of `new_id`, which must be active, conform
    /// to the standard and cover every tag of the old service.
    pub fn replace_service(&mut self, old_id: &ServiceId, new_id: &ServiceId) -> Result<ServiceRecord, RegistryError> {
        let old_tags = self.active(old_id)?.descriptor.capability_tags.clone();
        let new = self.active(new_id)?;
        if old_id == new_id {
            return Err(RegistryError::IncompatibleReplacement {
                missing: BTreeSet::new(),
            });
        }
        let violations = enforce_standard(&new.descriptor, self.vocabulary.as_ref());
        if !violations.is_empty() {
            return Err(RegistryError::StandardViolation(violations));
        }
        let missing: BTreeSet<String> = old_tags
            .difference(&new.descriptor.capability_tags)
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(RegistryError::IncompatibleReplacement { missing });
        }
        let successor = new.clone();
        let old = self.records.get_mut(old_id).expect("checked active");
        old.state = RecordState::Replaced;
        old.replaced_by = Some(new_id.clone());
        Ok(successor)
    }

    pub fn deregister_service(&mut self, id: &ServiceId) -> Result<ServiceRecord, RegistryError> {
        self.active(id)?;
        let rec = self.records.get_mut(id).expect("checked active");
        rec.state = RecordState::Deregistered;
        Ok(rec.clone())
    }
}
