use std::sync::Arc;

use serde::Serialize;

use super::{chase, ChaseError, ChaseStatus};
use crate::logic::{FormulaInContext, Sequent, Theory};
use crate::model::{holds_at, Structure};
use crate::names::Elem;

/// Outcome of deciding `T ⊢ φ ⊢_x ψ` by chasing `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntailmentVerdict {
    Proved,
    /// A model of the theory in which the witness satisfies `φ` but not `ψ`.
    Disproved {
        countermodel: Arc<Structure>,
        witness: Vec<Elem>,
    },
    /// The chase of `φ` did not finish within the budget and its partial
    /// model does not already satisfy `ψ` at the generic tuple.
    Unknown {
        steps: usize,
    },
}

impl EntailmentVerdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, EntailmentVerdict::Proved)
    }

    pub fn label(&self) -> &'static str {
        match self {
            EntailmentVerdict::Proved => "proved",
            EntailmentVerdict::Disproved { .. } => "disproved",
            EntailmentVerdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Serialize)]
struct VerdictDoc<'a> {
    verdict: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    countermodel: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a [Elem]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
}

impl EntailmentVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        let doc = match self {
            EntailmentVerdict::Proved => {
                VerdictDoc { verdict: "proved", countermodel: None, witness: None, steps: None }
            }
            EntailmentVerdict::Disproved { countermodel, witness } => VerdictDoc {
                verdict: "disproved",
                countermodel: Some(countermodel.to_json()),
                witness: Some(witness),
                steps: None,
            },
            EntailmentVerdict::Unknown { steps } => {
                VerdictDoc { verdict: "unknown", countermodel: None, witness: None, steps: Some(*steps) }
            }
        };
        serde_json::to_value(doc).expect("verdict serialises")
    }
}

/// Decides a sequent semantically through the universal model of its
/// left-hand side.
///
/// A terminated chase settles the question either way. A chase cut off by
/// the budget still proves the sequent when its partial model already
/// satisfies the right-hand side at the generic tuple: every stage of the
/// chase maps into every model of `φ`, so `ψ` transfers along that map.
pub fn entails(t: &Theory, s: &Sequent, budget: usize) -> Result<EntailmentVerdict, ChaseError> {
    s.check(&t.signature)?;
    let r = chase(&s.lhs_in_context(), t, budget)?;
    let rhs = r.relationalization.formula(&s.rhs_in_context());
    let holds = holds_at(&rhs, &r.model, &r.generic)?;
    Ok(match (r.status, holds) {
        (_, true) => EntailmentVerdict::Proved,
        (ChaseStatus::Terminated, false) => {
            EntailmentVerdict::Disproved { countermodel: r.original_model()?, witness: r.generic.clone() }
        }
        (ChaseStatus::BudgetExhausted(steps), false) => EntailmentVerdict::Unknown { steps },
    })
}

/// Shorthand: does `T` prove `φ ⊢_x ψ` for formulas sharing a context?
pub fn entails_formulas(
    t: &Theory,
    lhs: &FormulaInContext,
    rhs: &FormulaInContext,
    budget: usize,
) -> Result<EntailmentVerdict, ChaseError> {
    if lhs.context != rhs.context {
        return Err(ChaseError::Context("formulas are over different contexts".into()));
    }
    entails(t, &Sequent::new(lhs.context.clone(), lhs.body.clone(), rhs.body.clone()), budget)
}
