use serde_json::json;

use super::{PresentedOpen, TopologyError};
use crate::model::Homomorphism;
use crate::names::{Elem, Sort};

/// A basic open of the homomorphism space: a domain condition, a list of
/// preservation conditions `b ↦ c` and a codomain condition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomOpenBox {
    pub domain: PresentedOpen,
    /// `(sort, b, c)`: `b` lies in the source carrier and is sent to `c`.
    pub preservation: Vec<(Sort, Elem, Elem)>,
    pub codomain: PresentedOpen,
}

impl HomOpenBox {
    pub fn new(domain: PresentedOpen, preservation: Vec<(Sort, Elem, Elem)>, codomain: PresentedOpen) -> Self {
        HomOpenBox { domain, preservation, codomain }
    }

    /// A box with trivial domain and codomain.
    pub fn preserving(pairs: Vec<(Sort, Elem, Elem)>) -> Self {
        HomOpenBox::new(PresentedOpen::everything(), pairs, PresentedOpen::everything())
    }

    /// `d⁻¹(O)`.
    pub fn with_domain(domain: PresentedOpen) -> Self {
        HomOpenBox::new(domain, Vec::new(), PresentedOpen::everything())
    }

    /// `c⁻¹(O)`.
    pub fn with_codomain(codomain: PresentedOpen) -> Self {
        HomOpenBox::new(PresentedOpen::everything(), Vec::new(), codomain)
    }

    pub fn contains(&self, h: &Homomorphism) -> Result<bool, TopologyError> {
        if !self.domain.contains(h.source())? || !self.codomain.contains(h.target())? {
            return Ok(false);
        }
        Ok(self.preservation.iter().all(|(s, b, c)| h.apply(s, b) == Some(c)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "domain": self.domain.to_json(),
            "preservation": self.preservation.iter()
                .map(|(s, b, c)| json!({"sort": s, "from": b, "to": c}))
                .collect::<Vec<_>>(),
            "codomain": self.codomain.to_json(),
        })
    }
}

/// `h ∈ box`.
pub fn hom_in_box(h: &Homomorphism, b: &HomOpenBox) -> Result<bool, TopologyError> {
    b.contains(h)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::logic::{parse_formula, parse_theory};
    use crate::model::{find_homs, Structure};
    use crate::names::Sym;

    fn a() -> Sort {
        Sort::new("A")
    }

    fn e(n: &str) -> Elem {
        Elem::new(n)
    }

    fn model(elems: &[&str], edges: &[(&str, &str)]) -> Arc<Structure> {
        let sig = Arc::new(parse_theory("sort A; rel R(A,A);").unwrap().signature);
        let mut m = Structure::empty(sig);
        for x in elems {
            m.add_element(&a(), e(x)).unwrap();
        }
        for (x, y) in edges {
            m.add_fact(&Sym::new("R"), vec![e(x), e(y)]).unwrap();
        }
        Arc::new(m)
    }

    #[test]
    fn identity_and_moved_elements() {
        let m = model(&["a", "b"], &[("a", "b")]);
        let id = Homomorphism::identity(m.clone());
        assert!(hom_in_box(&id, &HomOpenBox::preserving(vec![(a(), e("a"), e("a"))])).unwrap());
        let n = model(&["c"], &[("c", "c")]);
        let h = find_homs(&m, &n, &[]).next().unwrap();
        assert!(!hom_in_box(&h, &HomOpenBox::preserving(vec![(a(), e("a"), e("a"))])).unwrap());
        // Elements missing from the source never satisfy a preservation pair.
        assert!(!hom_in_box(&id, &HomOpenBox::preserving(vec![(a(), e("z"), e("z"))])).unwrap());
    }

    /// The neighbourhood used for continuity of the action: `(−, x: a ↦ c,
    /// ⟨⌜x,y.ψ⌝, c, b⟩)`, checked by hand on three small models.
    #[test]
    fn continuity_neighbourhood() {
        let m0 = model(&["a"], &[]);
        let m1 = model(&["a", "b"], &[("a", "b")]);
        let m2 = model(&["c", "b"], &[("c", "b")]);
        let sig = m0.signature().clone();
        let psi = parse_formula(&sig, "[x:A, y:A] R(x, y)").unwrap();
        let bx = HomOpenBox::new(
            PresentedOpen::everything(),
            vec![(a(), e("a"), e("c"))],
            PresentedOpen::new(psi, vec![e("c"), e("b")]).unwrap(),
        );
        let models = [m0, m1, m2];
        let mut members = Vec::new();
        for (i, s) in models.iter().enumerate() {
            for (j, t) in models.iter().enumerate() {
                for h in find_homs(s, t, &[]) {
                    if hom_in_box(&h, &bx).unwrap() {
                        members.push((i, j, h.apply(&a(), &e("a")).cloned()));
                    }
                }
            }
        }
        // Only maps into m2 sending a to c qualify: from m0 (a ↦ c) and from
        // m1 (a ↦ c, b ↦ b, the single edge-preserving choice).
        assert_eq!(members, vec![(0, 2, Some(e("c"))), (1, 2, Some(e("c")))]);
    }
}
