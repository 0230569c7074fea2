use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Homomorphism, ModelError, Structure};

/// Factors an injective homomorphism `h: M → N` as an isomorphism onto its
/// image followed by a carrier inclusion.
///
/// The image structure has carriers `h(M)` and exactly the facts `h(t)` for
/// facts `t` of `M`, so the first factor is an isomorphism of structures and
/// the second merely includes carriers (it need not reflect facts of `N`).
pub fn factor_hom(h: &Homomorphism) -> Result<(Homomorphism, Homomorphism), ModelError> {
    if !h.is_injective() {
        let (sort, map) = h
            .maps()
            .iter()
            .find(|(_, m)| {
                let mut seen = std::collections::HashSet::new();
                !m.values().all(|v| seen.insert(v))
            })
            .expect("some component is not injective");
        return Err(ModelError::NotInjective(format!("component at sort `{sort}` identifies elements: {map:?}")));
    }
    let m = h.source();
    let sig = m.signature().clone();
    let mut image = Structure::empty(sig.clone());
    for (s, e) in m.elements() {
        image.add_element(s, h.apply(s, e).expect("total").clone())?;
    }
    for (r, arity) in sig.relations() {
        for t in m.relation(r) {
            image.add_fact(r, h.apply_tuple(arity, t).expect("total"))?;
        }
    }
    for (f, ty) in sig.functions() {
        for (args, v) in m.function(f) {
            let a = h.apply_tuple(&ty.args, args).expect("total");
            image.set_function(f, a, h.apply(&ty.result, v).expect("total").clone())?;
        }
    }
    image.validate()?;
    let image = Arc::new(image);
    let iso = Homomorphism::new(m.clone(), image.clone(), h.maps().clone())?;
    let incl_maps: BTreeMap<_, _> =
        image.carriers().iter().map(|(s, c)| (s.clone(), c.iter().map(|e| (e.clone(), e.clone())).collect())).collect();
    let incl = Homomorphism::new(image, h.target().clone(), incl_maps)?;
    Ok((iso, incl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_theory;
    use crate::model::find_homs;
    use crate::names::{Elem, Sort, Sym};

    fn model(elems: &[&str], edges: &[(&str, &str)]) -> Arc<Structure> {
        let sig = Arc::new(parse_theory("sort A; rel R(A,A);").unwrap().signature);
        let mut m = Structure::empty(sig);
        for e in elems {
            m.add_element(&Sort::new("A"), Elem::new(e)).unwrap();
        }
        for (x, y) in edges {
            m.add_fact(&Sym::new("R"), vec![Elem::new(x), Elem::new(y)]).unwrap();
        }
        Arc::new(m)
    }

    #[test]
    fn inclusion_factors_through_itself() {
        let m = model(&["a", "b"], &[("a", "b")]);
        let n = model(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let h = find_homs(&m, &n, &[(Sort::new("A"), Elem::new("a"), Elem::new("a"))]).next().unwrap();
        let (iso, incl) = factor_hom(&h).unwrap();
        assert_eq!(**iso.target(), *m);
        assert!(iso.then(&incl).unwrap().same_as(&h));
    }

    #[test]
    fn bijective_renaming_has_identity_inclusion() {
        let m = model(&["a", "b"], &[("a", "b")]);
        let n = model(&["x", "y"], &[("x", "y")]);
        let h = find_homs(&m, &n, &[]).next().unwrap();
        let (iso, incl) = factor_hom(&h).unwrap();
        assert!(incl.same_as(&Homomorphism::identity(n.clone())));
        assert!(iso.then(&incl).unwrap().same_as(&h));
    }

    #[test]
    fn image_of_a_non_full_embedding() {
        let m = model(&["a", "b"], &[("a", "b")]);
        let n = model(&["p", "q", "r"], &[("p", "q"), ("q", "p"), ("q", "r")]);
        for h in find_homs(&m, &n, &[]).filter(Homomorphism::is_injective) {
            let (iso, incl) = factor_hom(&h).unwrap();
            assert_eq!(iso.target().fact_count(), 1);
            assert!(iso.is_surjective());
            assert!(iso.then(&incl).unwrap().same_as(&h));
        }
    }

    #[test]
    fn collapsing_map_is_rejected() {
        let m = model(&["a", "b"], &[]);
        let n = model(&["c"], &[]);
        let h = find_homs(&m, &n, &[]).next().unwrap();
        assert!(matches!(factor_hom(&h), Err(ModelError::NotInjective(_))));
    }
}
