//! Syntax of many-sorted regular logic: signatures, formulas-in-context,
//! sequents and finitely presented theories, with the `.rth` parser and
//! printer.

mod formula;
mod parser;
mod print;
mod signature;
mod subst;

pub use formula::{Context, Formula, FormulaInContext, Sequent, Term, Theory};
pub use parser::{parse_formula, parse_sequent, parse_theory};
pub use signature::{FunctionType, Signature};
pub use subst::{is_reduced, reduce_presentation, rename_context, rename_free, substitute};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("sort error: {0}")]
    Sort(String),
    #[error("regularity error at {line}:{column}: `{construct}` is not a regular connective")]
    Regularity { line: usize, column: usize, construct: String },
    #[error("arity error: {0}")]
    Arity(String),
    #[error("declaration error: {0}")]
    Declaration(String),
}
