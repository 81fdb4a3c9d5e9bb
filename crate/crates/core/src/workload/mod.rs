//! Scenario ingestion and synthetic arrivals.

mod generator;
mod rng;
mod scenario;

pub use generator::{generate_workload, poisson_times, streams, Arrival};
pub use rng::SplitMix64;
pub use scenario::{load_scenario, ConsumerSpec, Scenario, ScenarioError};
