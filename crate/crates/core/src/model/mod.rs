//! Finite Σ-structures over the element universe and the homomorphisms
//! between them: definable sets and their functorial action, homomorphism
//! search, products, directed colimits, model enumeration and the
//! iso-then-inclusion factorization.

mod colimit;
mod enumerate;
mod eval;
mod factor;
mod hom;
mod product;
mod structure;

pub use colimit::{check_colimit_preservation, directed_colimit, Colimit, DirectedDiagram, PreservationReport};
pub use enumerate::{enumerate_models, search_space, ModelEnumerator};
pub use eval::{evaluate, holds_at, satisfies, satisfies_theory, violation};
pub use factor::factor_hom;
pub use hom::{exists_hom, find_homs, seed_from_tuples, HomSearch, Homomorphism, Seed};
pub use product::product;
pub use structure::Structure;

use thiserror::Error;

use crate::logic::{FormulaInContext, LogicError};
use crate::names::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("sort error: {0}")]
    Sort(String),
    #[error("invalid structure or map: {0}")]
    Invalid(String),
    #[error("diagram error: {0}")]
    Diagram(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not injective: {0}")]
    NotInjective(String),
}

impl From<LogicError> for ModelError {
    fn from(e: LogicError) -> Self {
        ModelError::Sort(e.to_string())
    }
}

/// The action of the definable-set functor: `h(a)` for `a ∈ ⟦x.φ⟧^{source h}`.
pub fn definable_action(f: &FormulaInContext, h: &Homomorphism, a: &[Elem]) -> Result<Vec<Elem>, ModelError> {
    if !holds_at(f, h.source(), a)? {
        return Err(ModelError::Precondition(format!("{a:?} is not in the extension of {f}")));
    }
    Ok(h.apply_tuple(&f.context.sorts(), a).expect("tuple lies in the source carriers"))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::logic::{parse_formula, parse_theory};
    use crate::names::{Sort, Sym};

    #[test]
    fn action_collapses_an_edge_onto_a_loop() {
        let sig = Arc::new(parse_theory("sort A; rel R(A,A);").unwrap().signature);
        let mut m = Structure::empty(sig.clone());
        let mut n = Structure::empty(sig.clone());
        let a = Sort::new("A");
        for e in ["a", "b"] {
            m.add_element(&a, Elem::new(e)).unwrap();
        }
        m.add_fact(&Sym::new("R"), vec![Elem::new("a"), Elem::new("b")]).unwrap();
        n.add_element(&a, Elem::new("c")).unwrap();
        n.add_fact(&Sym::new("R"), vec![Elem::new("c"), Elem::new("c")]).unwrap();
        let (m, n) = (Arc::new(m), Arc::new(n));
        let h = find_homs(&m, &n, &[]).next().unwrap();
        let f = parse_formula(&sig, "[x:A] exists y:A. R(x, y)").unwrap();
        assert_eq!(definable_action(&f, &h, &[Elem::new("a")]).unwrap(), vec![Elem::new("c")]);
        assert!(matches!(definable_action(&f, &h, &[Elem::new("b")]), Err(ModelError::Precondition(_))));
        let id = Homomorphism::identity(m.clone());
        assert_eq!(definable_action(&f, &id, &[Elem::new("a")]).unwrap(), vec![Elem::new("a")]);
    }
}
