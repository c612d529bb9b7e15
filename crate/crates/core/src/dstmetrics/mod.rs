//! Dialogue states and tracking metrics: joint goal accuracy, slot F1, slot
//! accuracy, request accuracy, and per-turn error breakdowns.

mod metrics;
mod report;
mod state;

use thiserror::Error;

pub use metrics::{joint_goal_accuracy, request_accuracy, slot_accuracy, slot_f1, turn_f1};
pub use report::{
    evaluate, DialogueBreakdown, EvalOptions, MetricsReport, SlotCounts, TurnBreakdown,
};
pub use state::{normalize_value, DialogueState, Ontology, Scope, SlotValue, TurnRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no turns to evaluate")]
    EmptyEvaluation,
    #[error("slot {0:?} is not in the ontology")]
    UnknownSlot(String),
    #[error("value {value:?} is not permitted for slot {slot:?}")]
    UnknownValue { slot: String, value: String },
    #[error("slot {0:?} has more than one value")]
    DuplicateSlot(String),
    #[error("slot {0:?} is both informable and requestable")]
    OntologyOverlap(String),
    #[error("slot universe of {universe} is smaller than the {informable} informable slots")]
    UniverseTooSmall { universe: usize, informable: usize },
    #[error("dialogue {dialogue_id:?} repeats turn {turn_index}")]
    DuplicateTurn { dialogue_id: String, turn_index: usize },
}

impl MetricsError {
    pub fn code(&self) -> &'static str {
        match self {
            MetricsError::EmptyEvaluation => "EmptyEvaluation",
            MetricsError::UnknownSlot(_) => "UnknownSlot",
            MetricsError::UnknownValue { .. } => "UnknownValue",
            MetricsError::DuplicateSlot(_) => "DuplicateSlot",
            MetricsError::OntologyOverlap(_) => "OntologyOverlap",
            MetricsError::UniverseTooSmall { .. } => "UniverseTooSmall",
            MetricsError::DuplicateTurn { .. } => "DuplicateTurn",
        }
    }
}
