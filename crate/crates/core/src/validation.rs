use std::fmt;

use serde::{Deserialize, Serialize};

/// A configuration problem located by a JSON-style field path such as
/// `nodes[3].open_hours`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl FieldError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Renders a list of errors one per line.
pub fn join_errors<T: fmt::Display>(errors: &[T]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

pub(crate) struct Collector {
    pub errors: Vec<FieldError>,
}

impl Collector {
    pub fn new() -> Self {
        Self { errors: Vec::new() }
    }

    pub fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(FieldError::new(path, message));
    }

    pub fn check(&mut self, ok: bool, path: impl FnOnce() -> String, message: &str) {
        if !ok {
            self.errors.push(FieldError::new(path(), message));
        }
    }

    pub fn positive(&mut self, value: f64, path: &str, field: &str) {
        self.check(
            value.is_finite() && value > 0.0,
            || format!("{path}.{field}"),
            "must be a positive number",
        );
    }

    pub fn non_negative(&mut self, value: f64, path: &str, field: &str) {
        self.check(
            value.is_finite() && value >= 0.0,
            || format!("{path}.{field}"),
            "must be a non-negative number",
        );
    }

    pub fn unit_interval(&mut self, value: f64, path: &str, field: &str) {
        self.check(
            (0.0..=1.0).contains(&value),
            || format!("{path}.{field}"),
            "must lie in [0, 1]",
        );
    }
}
