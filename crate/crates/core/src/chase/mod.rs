//! Universal models by chase saturation, and the semantic entailment,
//! genericity and isolation checks built on them.

mod engine;
mod entail;
mod isolation;
mod relational;

pub use engine::{
    chase, chase_structure, ChaseResult, ChaseStatus, ChaseStep, StepKind, StructureChase, DEFAULT_BUDGET,
};
pub use entail::{entails, entails_formulas, EntailmentVerdict};
pub use isolation::{canonical_isolating_formula, check_isolation, isolation_failure};
pub use relational::{relationalize, Relationalization};

use thiserror::Error;

use crate::logic::LogicError;
use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChaseError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("context mismatch: {0}")]
    Context(String),
}
