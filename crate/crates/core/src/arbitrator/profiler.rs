use serde::{Deserialize, Serialize};

use crate::model::{Millis, ServiceId};
use crate::registry::{FunctionalSpec, Registry, RegistryError, ServiceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recommendation {
    Keep,
    Replace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileVerdict {
    pub service_id: ServiceId,
    pub functional_ok: bool,
    pub latency_ok: bool,
    pub recommendation: Recommendation,
}

/// Compares an observed run of a service against its descriptor: the output
/// digest must equal the test vector's (vacuous without one) and the p95
/// latency must stay within `sla * (1 + tol)`.
pub fn profile_service(
    registry: &Registry,
    service_id: &ServiceId,
    observed_digest: &str,
    observed_p95_ms: Millis,
    tol: f64,
) -> Result<ProfileVerdict, RegistryError> {
    let record = registry.active(service_id)?;
    let desc = &record.descriptor;
    let functional_ok = desc
        .test_vector
        .as_ref()
        .is_none_or(|tv| tv.expected_digest.eq_ignore_ascii_case(observed_digest));
    let latency_ok = observed_p95_ms <= desc.sla_latency_ms * (1.0 + tol);
    let recommendation = if functional_ok && latency_ok {
        Recommendation::Keep
    } else {
        Recommendation::Replace
    };
    Ok(ProfileVerdict {
        service_id: service_id.clone(),
        functional_ok,
        latency_ok,
        recommendation,
    })
}

/// Acts on a `Replace` verdict by swapping in the best-matching active
/// service whose tags cover the profiled one. Returns the successor, or
/// `None` when the verdict is `Keep` or no compatible candidate exists.
pub fn apply_verdict(
    registry: &mut Registry,
    verdict: &ProfileVerdict,
) -> Result<Option<ServiceRecord>, RegistryError> {
    if verdict.recommendation == Recommendation::Keep {
        return Ok(None);
    }
    let old = registry.active(&verdict.service_id)?;
    let tags = old.descriptor.capability_tags.clone();
    let query = FunctionalSpec {
        required_tags: tags.clone(),
        keywords: Vec::new(),
    };
    let successor = registry
        .match_services(&query)
        .into_iter()
        .map(|m| m.record)
        .find(|r| r.descriptor.id != verdict.service_id && tags.is_subset(&r.descriptor.capability_tags));
    match successor {
        Some(new) => registry
            .replace_service(&verdict.service_id, &new.descriptor.id)
            .map(Some),
        None => Ok(None),
    }
}
