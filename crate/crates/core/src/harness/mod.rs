//! Corpora, seeded instance generators, the property suites and the command
//! implementations behind the `rwb` binary.

pub mod commands;
pub mod corpus;
pub mod generate;
mod report;
mod suites;

pub use report::{InstanceReport, Outcome, PropertyResult, SuiteReport, Tallies, VerifyReport, SCHEMA_VERSION};
pub use suites::{GeneratedDiagram, VerifyConfig, Workbench, SUITES};

use thiserror::Error;

use crate::chase::ChaseError;
use crate::logic::LogicError;
use crate::model::ModelError;
use crate::stone::StoneError;
use crate::topology::TopologyError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Chase(#[from] ChaseError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Stone(#[from] StoneError),
    #[error("{0}")]
    Input(String),
}
