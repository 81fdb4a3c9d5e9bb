//! JSON request envelope over the registry operations.
//!
//! Requests are `{"op": "register"|"discover"|"match"|"compose", "body": {...}}`
//! and responses `{"ok": true, "result": ...}` or
//! `{"ok": false, "error": {"kind": ..., "message": ..., "violations": [...]}}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arbitrator::Violation;
use crate::infra::Topology;
use crate::model::{Millis, ServiceDescriptor};

use super::{FunctionalSpec, Registry, RegistryError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "body", rename_all = "snake_case")]
pub enum Request {
    Register {
        descriptor: ServiceDescriptor,
        #[serde(default)]
        at_ms: Millis,
    },
    Discover {
        name: String,
        #[serde(default)]
        version: Option<String>,
    },
    Match(FunctionalSpec),
    Compose(FunctionalSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

impl From<&RegistryError> for ErrorBody {
    fn from(e: &RegistryError) -> Self {
        let kind = match e {
            RegistryError::DuplicateService { .. } => "DuplicateService",
            RegistryError::DuplicateId(_) => "DuplicateId",
            RegistryError::StandardViolation(_) => "StandardViolation",
            RegistryError::Arbitration(_) => "NoAdmissibleNode",
            RegistryError::NotFound(_) => "NotFound",
            RegistryError::IncompatibleReplacement { .. } => "IncompatibleReplacement",
            RegistryError::UncoverableGoal { .. } => "UncoverableGoal",
        };
        let violations = match e {
            RegistryError::StandardViolation(v) => v.clone(),
            _ => Vec::new(),
        };
        Self {
            kind: kind.to_owned(),
            message: e.to_string(),
            violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
}

impl Response {
    fn success(result: impl Serialize) -> Self {
        Self {
            ok: true,
            result: Some(serde_json::to_value(result).expect("registry types serialize")),
            error: None,
        }
    }

    fn failure(error: ErrorBody) -> Self {
        Self {
            ok: false,
            result: None,
            error: Some(error),
        }
    }
}

pub fn handle_request(registry: &mut Registry, topology: &Topology, request: Request) -> Response {
    let outcome = match request {
        Request::Register { descriptor, at_ms } => registry
            .register_service(descriptor, topology, at_ms)
            .map(Response::success),
        Request::Discover { name, version } => registry
            .discover_service(&name, version.as_deref())
            .map(Response::success),
        Request::Match(query) => Ok(Response::success(registry.match_services(&query))),
        Request::Compose(goal) => registry.compose_services(&goal).map(Response::success),
    };
    outcome.unwrap_or_else(|e| Response::failure(ErrorBody::from(&e)))
}

/// Applies one serialized request and serializes the response.
/// Malformed input yields a `BadRequest` error response.
pub fn handle_json(registry: &mut Registry, topology: &Topology, request: &str) -> String {
    let response = match serde_json::from_str::<Request>(request) {
        Ok(req) => handle_request(registry, topology, req),
        Err(e) => Response::failure(ErrorBody {
            kind: "BadRequest".to_owned(),
            message: e.to_string(),
            violations: Vec::new(),
        }),
    };
    serde_json::to_string(&response).expect("responses serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{node, service};
    use crate::model::Tier;

    fn topo() -> Topology {
        Topology::new(vec![node("M1", Tier::Mno)]).unwrap()
    }

    #[test]
    fn register_then_discover() {
        let mut r = Registry::default();
        let req = serde_json::to_string(&Request::Register {
            descriptor: service("s"),
            at_ms: 0.0,
        })
        .unwrap();
        assert!(req.contains(r#""op":"register""#));
        let resp: Response = serde_json::from_str(&handle_json(&mut r, &topo(), &req)).unwrap();
        assert!(resp.ok);
        let resp: Response = serde_json::from_str(&handle_json(
            &mut r,
            &topo(),
            r#"{"op":"discover","body":{"name":"s"}}"#,
        ))
        .unwrap();
        assert!(resp.ok);
        assert_eq!(resp.result.unwrap()["placement"]["node_id"], "M1");
    }

    #[test]
    fn errors_carry_kind_and_violations() {
        let mut r = Registry::default();
        let mut bad = service("s");
        bad.version = "one".into();
        let resp = handle_request(&mut r, &topo(), Request::Register { descriptor: bad, at_ms: 0.0 });
        let err = resp.error.unwrap();
        assert_eq!(err.kind, "StandardViolation");
        assert_eq!(err.violations[0].field, "version");

        let resp: Response = serde_json::from_str(&handle_json(&mut r, &topo(), "{}")).unwrap();
        assert!(!resp.ok);
        assert_eq!(resp.error.unwrap().kind, "BadRequest");

        let resp = handle_request(&mut r, &topo(), Request::Compose(FunctionalSpec::new(["z"])));
        assert_eq!(resp.error.unwrap().kind, "UncoverableGoal");
    }
}
