use std::sync::Arc;

use crate::logic::{parse_formula, parse_theory, FormulaInContext, Theory};
use crate::model::{enumerate_models, Structure};

/// A theory of the built-in corpus with the formulas the suites chase.
#[derive(Clone, Debug)]
pub struct CorpusTheory {
    pub name: String,
    pub source: String,
    pub theory: Arc<Theory>,
    pub formulas: Vec<FormulaInContext>,
}

impl CorpusTheory {
    pub fn new(name: &str, source: &str, formulas: &[&str]) -> Result<Self, crate::logic::LogicError> {
        let theory = parse_theory(source)?;
        let formulas = formulas.iter().map(|f| parse_formula(&theory.signature, f)).collect::<Result<_, _>>()?;
        Ok(CorpusTheory { name: name.to_string(), source: source.to_string(), theory: Arc::new(theory), formulas })
    }

    /// Models with at most `bound` elements per sort, one per isomorphism
    /// class.
    pub fn models(&self, bound: usize) -> Vec<Arc<Structure>> {
        enumerate_models(&self.theory, bound).map(Arc::new).collect()
    }
}

const TRANSITIVITY: &str = include_str!("../../theories/transitivity.rth");
const PREORDER: &str = include_str!("../../theories/preorder.rth");
const TYPED_EDGES: &str = include_str!("../../theories/typed_edges.rth");
const FUNCTIONAL: &str = include_str!("../../theories/functional.rth");
const POSET: &str = include_str!("../../theories/poset.rth");
const SUCCESSOR: &str = include_str!("../../theories/successor.rth");

fn entry(name: &str) -> Option<(&'static str, &'static [&'static str])> {
    Some(match name {
        "transitivity" => (
            TRANSITIVITY,
            &[
                "[x:A, y:A] exists z:A. R(x, z) & R(z, y)",
                "[x:A, y:A, z:A] R(x, y) & R(y, z)",
                "[x:A] R(x, x)",
                "[x:A, y:A] R(x, y) & R(y, x)",
            ],
        ),
        "preorder" => (PREORDER, &["[x:A, y:A] R(x, y)", "[x:A] true", "[x:A, y:A, z:A] R(x, z) & R(y, z)"]),
        "typed_edges" => (
            TYPED_EDGES,
            &[
                "[v:V] Mark(v)",
                "[e:E] Mark(src(e))",
                "[v:V, w:V] exists e:E. src(e) = v & tgt(e) = w",
                "[e:E, f:E] tgt(e) = src(f)",
            ],
        ),
        "functional" => (
            FUNCTIONAL,
            &[
                "[x:A, y:A, z:A] R(x, y) & R(x, z)",
                "[x:A, y:A] exists z:A. R(x, z) & R(y, z)",
                "[x:A] exists y:A. R(x, y)",
            ],
        ),
        "poset" => (
            POSET,
            &["[x:A, y:A] R(x, y) & R(y, x)", "[x:A, y:A, z:A] R(x, y) & R(y, z) & R(z, x)", "[x:A, y:A] R(x, y)"],
        ),
        "successor" => (SUCCESSOR, &["[x:A, y:A] R(x, y)", "[x:A] exists y:A. R(y, x)"]),
        _ => return None,
    })
}

/// Names of the chase-terminating corpus theories, in suite order.
pub const CORPUS: [&str; 5] = ["transitivity", "preorder", "typed_edges", "functional", "poset"];

/// A built-in theory by name; `successor` is available too, though its
/// chases never terminate.
pub fn builtin(name: &str) -> Option<CorpusTheory> {
    let (src, formulas) = entry(name)?;
    Some(CorpusTheory::new(name, src, formulas).expect("built-in theories parse"))
}

/// The chase-terminating corpus.
pub fn corpus() -> Vec<CorpusTheory> {
    CORPUS.iter().map(|n| builtin(n).expect("listed")).collect()
}
