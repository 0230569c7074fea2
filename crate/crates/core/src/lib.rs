//! A workbench for many-sorted regular logic.
//!
//! * [`logic`]: signatures, regular formulas-in-context, theories and the
//!   `.rth` language.
//! * [`chase`]: universal models with generic tuples built by chase
//!   saturation, and the entailment / isolation checks that read them.
//! * [`model`]: finite structures and homomorphisms, definable sets,
//!   products, directed colimits and model enumeration.
//! * [`topology`]: symbolic basic opens of the logical topologies on models,
//!   homomorphisms and definable sheaves.
//! * [`stone`]: the propositional case over finite meet-semilattices.
//! * [`harness`]: corpora, instance generators, property suites and the
//!   command implementations behind the `rwb` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod chase;
pub mod harness;
pub mod logic;
pub mod model;
pub mod names;
pub mod stone;
pub mod topology;

pub use names::{Elem, Sort, Sym, Var};
