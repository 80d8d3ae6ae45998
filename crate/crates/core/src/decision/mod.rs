//! Coverage rules that trigger reactions, and expert matching for incidents.

mod confidence;
mod experts;
mod rules;

use thiserror::Error;

pub use confidence::ConfidenceCheck;
pub use experts::{
    match_experts, parse_profiles, resolve_assignments, Assignment, Incident, StakeholderProfile,
};
pub use rules::{evaluate_rule, parse_rules, CoverageRule, ReactionTemplate, TriggeredReaction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}
