//! Symbolic basic opens of the logical topologies: on the space of models,
//! on the space of homomorphisms, and on the total spaces of definable
//! sheaves. Opens are never materialized as point sets; membership is decided
//! by evaluating formulas at named elements.

mod boxes;
mod net;
mod open;
mod section;
mod sheaf;

pub use boxes::{hom_in_box, HomOpenBox};
pub use net::{hom_net_converges, hom_net_tail, net_converges, tail_index};
pub use open::{model_in_open, subbasic_to_formula, PresentedOpen, Subbasic};
pub use section::{check_wellbehaved, wellbehaved_section, Section, WellBehavedReport};
pub use sheaf::{
    action_image_open, check_action_image, inverse_image_open, ActionImageCheck, Certification, Converse, SheafOpen,
    SyntacticMorphism,
};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::chase::ChaseError;
use crate::logic::{Formula, FormulaInContext, LogicError, Signature};
use crate::model::ModelError;
use crate::names::FreshNames;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Chase(#[from] ChaseError),
    #[error("not a functional relation: {0}")]
    NotFunctional(String),
    #[error("mismatched presentation: {0}")]
    Mismatch(String),
}

/// Names already used by symbols or by any variable of the given formulas,
/// so that freshly introduced variables neither clash nor capture.
pub(crate) fn taken_names<'a>(sig: &Signature, fs: impl IntoIterator<Item = &'a FormulaInContext>) -> BTreeSet<String> {
    let mut taken: BTreeSet<String> =
        sig.relations().map(|(r, _)| r.to_string()).chain(sig.functions().map(|(f, _)| f.to_string())).collect();
    for f in fs {
        taken.extend(f.context.vars().map(|v| v.to_string()));
        taken.extend(f.body.all_vars().into_iter().map(|v| v.to_string()));
    }
    taken
}

pub(crate) fn fresh(prefix: &str, taken: &BTreeSet<String>) -> FreshNames {
    FreshNames::avoiding(prefix, taken)
}

pub(crate) fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
    Formula::conj(parts.into_iter().filter(|f| *f != Formula::Top))
}
