//! Arbitration: where services run and when they should move.

mod analysis;
mod cloud_score;
mod context;
mod profiler;
mod scheduler;
mod standard;

use thiserror::Error;

use crate::model::{Millis, NodeId, ServiceId};

pub use analysis::{
    analyze_computation, analyze_performance, delay_pressure_exceeded, RescheduleAdvice,
    RescheduleTrigger, Thresholds,
};
pub use cloud_score::{
    classify_cloud, reference_cost, score_cloud, CloudClass, CloudNormalizers, MetricRange,
};
pub use context::{collect_context, update_user_profile, ContextSnapshot, NodeLoad, ServiceWindow};
pub use profiler::{apply_verdict, profile_service, ProfileVerdict, Recommendation};
pub use scheduler::{
    evaluate, place_in_tier, projected_charge, reschedule, reschedule_within, restricted_set,
    schedule_service, select_best, Candidate, RescheduleOutcome,
};
pub use standard::{
    enforce_standard, TagVocabulary, VocabularyError, Violation, MAX_DESCRIPTION_CHARS, MAX_TAGS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArbitrationError {
    #[error("no admissible node for service '{0}'")]
    NoAdmissibleNode(ServiceId),
    #[error("node '{0}' is not a cloud")]
    NonCloudNode(NodeId),
    #[error("event for '{service_id}' at {got} ms precedes the previous one at {last} ms")]
    OutOfOrderEvent {
        service_id: ServiceId,
        last: Millis,
        got: Millis,
    },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}
