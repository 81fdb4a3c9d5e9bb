use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ServiceDescriptor;

pub const MAX_TAGS: usize = 16;
pub const MAX_DESCRIPTION_CHARS: usize = 2048;

/// Controlled capability-tag vocabulary: one lowercase tag per line.
/// Blank lines are skipped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TagVocabulary {
    tags: BTreeSet<String>,
}

#[derive(Debug, Error)]
pub enum VocabularyError {
    #[error("reading vocabulary: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: tag '{tag}' is not lowercase")]
    NotLowercase { line: usize, tag: String },
}

impl TagVocabulary {
    pub fn parse(text: &str) -> Result<Self, VocabularyError> {
        let mut tags = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let tag = raw.trim();
            if tag.is_empty() {
                continue;
            }
            if tag != tag.to_lowercase() {
                return Err(VocabularyError::NotLowercase {
                    line: i + 1,
                    tag: tag.to_owned(),
                });
            }
            tags.insert(tag.to_owned());
        }
        Ok(Self { tags })
    }

    pub fn load(path: &Path) -> Result<Self, VocabularyError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

impl FromIterator<String> for TagVocabulary {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Self {
            tags: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Checks a descriptor against the registration standard and returns every
/// violation in a fixed field order. An empty list means the descriptor
/// conforms. Without a vocabulary any lowercase tag is accepted.
pub fn enforce_standard(desc: &ServiceDescriptor, vocabulary: Option<&TagVocabulary>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |field: &str, message: String| {
        out.push(Violation {
            field: field.to_owned(),
            message,
        })
    };

    if desc.id.as_str().trim().is_empty() {
        flag("id", "required field is empty".into());
    }
    if desc.name.trim().is_empty() {
        flag("name", "required field is empty".into());
    }
    if let Err(e) = semver::Version::parse(&desc.version) {
        flag("version", format!("'{}' is not a semantic version: {e}", desc.version));
    }
    if desc.capability_tags.is_empty() {
        flag("capability_tags", "at least one tag is required".into());
    }
    if desc.capability_tags.len() > MAX_TAGS {
        flag(
            "capability_tags",
            format!("tag count {} exceeds the limit of {MAX_TAGS}", desc.capability_tags.len()),
        );
    }
    for tag in &desc.capability_tags {
        if tag.is_empty() || *tag != tag.to_lowercase() {
            flag("capability_tags", format!("tag '{tag}' must be nonempty lowercase"));
        } else if vocabulary.is_some_and(|v| !v.contains(tag)) {
            flag("capability_tags", format!("tag '{tag}' is not in the controlled vocabulary"));
        }
    }
    let chars = desc.description.chars().count();
    if chars > MAX_DESCRIPTION_CHARS {
        flag(
            "description",
            format!("{chars} characters exceeds the limit of {MAX_DESCRIPTION_CHARS}"),
        );
    }
    for (field, value) in [
        ("cpu_demand", desc.cpu_demand),
        ("mem_demand", desc.mem_demand),
        ("storage_demand", desc.storage_demand),
        ("payload_in", desc.payload_in),
        ("payload_out", desc.payload_out),
    ] {
        if !(value.is_finite() && value >= 0.0) {
            flag(field, format!("demand {value} must be a non-negative number"));
        }
    }
    if !(desc.sla_latency_ms.is_finite() && desc.sla_latency_ms > 0.0) {
        flag("sla_latency_ms", "must be positive".into());
    }
    out
}
