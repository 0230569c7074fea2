use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{PresentedOpen, TopologyError};
use crate::logic::FormulaInContext;
use crate::model::{definable_action, holds_at, Homomorphism, Structure};
use crate::names::Elem;

/// The section `v : ⟨⌜x.φ⌝, a⟩ → ⟦x.φ⟧`, `N ↦ ⟨N, a⟩`, of a definable sheaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    /// The sheaf `⌜x.φ⌝`.
    pub formula: FormulaInContext,
    /// The reduced presentation of `⟨⌜x.φ⌝, a⟩`.
    pub domain: PresentedOpen,
    /// The fixed tuple `a`.
    pub value: Vec<Elem>,
}

impl Section {
    /// `v(N)`, when `N` lies in the domain.
    pub fn at(&self, n: &Structure) -> Result<Option<Vec<Elem>>, TopologyError> {
        Ok(self.domain.contains(n)?.then(|| self.value.clone()))
    }
}

/// The section through the point `⟨m, a⟩` of `⌜x.φ⌝`.
pub fn wellbehaved_section(f: &FormulaInContext, m: &Structure, a: &[Elem]) -> Result<Section, TopologyError> {
    if !holds_at(f, m, a)? {
        return Err(crate::model::ModelError::Precondition(format!("{a:?} is not in the extension of {f}")).into());
    }
    let domain = PresentedOpen::new(f.clone(), a.to_vec())?.reduced();
    Ok(Section { formula: f.clone(), domain, value: a.to_vec() })
}

/// Tally of the well-behavedness contract over a family of homomorphisms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WellBehavedReport {
    /// Homomorphisms out of the domain that fix `a` pointwise.
    pub checked: usize,
    /// Homomorphisms out of the domain that move `a`; the contract says
    /// nothing about them.
    pub vacuous: usize,
    /// Positions (in the input order) of homomorphisms breaking the contract.
    pub failures: Vec<usize>,
}

/// Checks `ρ(g, v(M)) = v(N)` for every `g : M → N` with `M` in the domain
/// and `g(a) = a`.
pub fn check_wellbehaved<'a>(
    s: &Section,
    homs: impl IntoIterator<Item = &'a Homomorphism>,
) -> Result<WellBehavedReport, TopologyError> {
    let sorts = s.formula.context.sorts();
    let mut report = WellBehavedReport::default();
    // Domain membership per structure, keyed by allocation.
    let mut member: HashMap<*const Structure, bool> = HashMap::new();
    let mut inside = |m: &Arc<Structure>| -> Result<bool, TopologyError> {
        if let Some(&b) = member.get(&Arc::as_ptr(m)) {
            return Ok(b);
        }
        let b = s.domain.contains(m)?;
        member.insert(Arc::as_ptr(m), b);
        Ok(b)
    };
    for (i, g) in homs.into_iter().enumerate() {
        if !inside(g.source())? {
            continue;
        }
        if g.apply_tuple(&sorts, &s.value).as_deref() != Some(&s.value[..]) {
            report.vacuous += 1;
            continue;
        }
        report.checked += 1;
        let moved = definable_action(&s.formula, g, &s.value)?;
        if !inside(g.target())? || moved != s.value {
            report.failures.push(i);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, parse_theory};
    use crate::model::{enumerate_models, find_homs, ModelError};
    use crate::topology::TopologyError;

    #[test]
    fn sections_commute_with_fixing_homomorphisms() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);").unwrap();
        let f = parse_formula(&t.signature, "[x:A, y:A] exists z:A. R(x,z) & R(z,y)").unwrap();
        let corpus: Vec<Arc<Structure>> = enumerate_models(&t, 3).map(Arc::new).collect();
        let homs: Vec<Homomorphism> =
            corpus.iter().flat_map(|m| corpus.iter().flat_map(move |n| find_homs(m, n, &[]))).collect();
        let mut checked = 0;
        let mut vacuous = 0;
        for m in &corpus {
            for a in crate::model::evaluate(&f, m).unwrap() {
                let s = wellbehaved_section(&f, m, &a).unwrap();
                let id = Homomorphism::identity(m.clone());
                assert_eq!(check_wellbehaved(&s, [&id]).unwrap().checked, 1);
                let r = check_wellbehaved(&s, &homs).unwrap();
                assert!(r.failures.is_empty());
                checked += r.checked;
                vacuous += r.vacuous;
            }
        }
        assert!(checked > 0 && vacuous > 0);
    }

    #[test]
    fn repeated_elements_give_a_reduced_domain() {
        let t = parse_theory("sort A; rel R(A,A);").unwrap();
        let mut m = Structure::empty(Arc::new(t.signature.clone()));
        m.add_element(&crate::names::Sort::new("A"), Elem::new("a")).unwrap();
        m.add_fact(&crate::names::Sym::new("R"), vec![Elem::new("a"), Elem::new("a")]).unwrap();
        let f = parse_formula(&t.signature, "[x:A, y:A] R(x,y)").unwrap();
        let s = wellbehaved_section(&f, &m, &[Elem::new("a"), Elem::new("a")]).unwrap();
        assert_eq!(s.domain.tuple, vec![Elem::new("a")]);
        assert_eq!(s.at(&m).unwrap(), Some(vec![Elem::new("a"), Elem::new("a")]));
        assert!(matches!(
            wellbehaved_section(&f, &Structure::empty(m.signature().clone()), &[Elem::new("a"), Elem::new("a")]),
            Err(TopologyError::Model(ModelError::Precondition(_)))
        ));
    }
}
