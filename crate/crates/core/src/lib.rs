//! Broker library for a three-tier mobile cloud. A registry tracks services,
//! an arbitrator places them across tiers, and a deterministic simulator
//! replays JSON scenarios against both.

pub mod arbitrator;
pub mod billing;
pub mod infra;
pub mod metrics;
pub mod model;
pub mod registry;
pub mod stats;
pub mod trust;
pub mod validation;
pub mod workload;

pub use model::*;
