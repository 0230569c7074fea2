use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::logic::{Context, Formula, FormulaInContext, Term};
use crate::model::{evaluate, exists_hom, holds_at, seed_from_tuples, ModelError, Structure};
use crate::names::{Elem, FreshNames, Sort, Var};

/// The positive diagram of `m` seen from the tuple `a`: one context variable
/// per position of `a` (repeats become equalities), an existential for every
/// other element, and every fact of `m` as a conjunct.
pub fn canonical_isolating_formula(m: &Structure, sorts: &[Sort], a: &[Elem]) -> Result<FormulaInContext, ModelError> {
    if sorts.len() != a.len() {
        return Err(ModelError::Sort("tuple and sort list differ in length".into()));
    }
    for (s, e) in sorts.iter().zip(a) {
        if !m.contains(s, e) {
            return Err(ModelError::Sort(format!("`{e}` is not in the carrier of `{s}`")));
        }
    }
    let sig = m.signature();
    let taken: BTreeSet<String> =
        sig.relations().map(|(r, _)| r.to_string()).chain(sig.functions().map(|(f, _)| f.to_string())).collect();
    let mut xs = FreshNames::avoiding("x", &taken);
    let mut ys = FreshNames::avoiding("y", &taken);
    let mut var_of: HashMap<(Sort, Elem), Var> = HashMap::new();
    let mut context = Vec::new();
    let mut equalities = Vec::new();
    for (s, e) in sorts.iter().zip(a) {
        let x = Var::from(xs.next_name());
        context.push((x.clone(), s.clone()));
        match var_of.get(&(s.clone(), e.clone())) {
            Some(first) => equalities.push(Formula::eq(Term::Var(first.clone()), Term::Var(x))),
            None => {
                var_of.insert((s.clone(), e.clone()), x);
            }
        }
    }
    let mut binders = Vec::new();
    for (s, e) in m.elements() {
        if let std::collections::hash_map::Entry::Vacant(e) = var_of.entry((s.clone(), e.clone())) {
            let y = Var::from(ys.next_name());
            e.insert(y.clone());
            binders.push((y, s.clone()));
        }
    }
    let var = |s: &Sort, e: &Elem| Term::Var(var_of[&(s.clone(), e.clone())].clone());
    let mut atoms = equalities;
    for (r, arity) in sig.relations() {
        for t in m.relation(r) {
            atoms.push(Formula::Rel(r.clone(), arity.iter().zip(t).map(|(s, e)| var(s, e)).collect()));
        }
    }
    for (f, ty) in sig.functions() {
        for (args, v) in m.function(f) {
            let app = Term::App(f.clone(), ty.args.iter().zip(args).map(|(s, e)| var(s, e)).collect());
            atoms.push(Formula::eq(app, var(&ty.result, v)));
        }
    }
    let body = Formula::exists_all(&binders, Formula::conj(atoms));
    Ok(FormulaInContext::new(Context(context), body))
}

/// A corpus model and tuple that `a` fails to map to, if any.
pub fn isolation_failure(
    f: &FormulaInContext,
    m: &Arc<Structure>,
    a: &[Elem],
    corpus: &[Arc<Structure>],
) -> Result<Option<(usize, Vec<Elem>)>, ModelError> {
    if !holds_at(f, m, a)? {
        return Err(ModelError::Precondition(format!("{a:?} is not in the extension of {f}")));
    }
    let sorts = f.context.sorts();
    for (i, n) in corpus.iter().enumerate() {
        for b in evaluate(f, n)? {
            if !exists_hom(m, n, &seed_from_tuples(&sorts, a, &b)) {
                return Ok(Some((i, b)));
            }
        }
    }
    Ok(None)
}

/// Whether `f` isolates `a` in `m` relative to `corpus`: every satisfying
/// tuple of every corpus model is the image of `a` under some homomorphism.
pub fn check_isolation(
    f: &FormulaInContext,
    m: &Arc<Structure>,
    a: &[Elem],
    corpus: &[Arc<Structure>],
) -> Result<bool, ModelError> {
    Ok(isolation_failure(f, m, a, corpus)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::{chase, DEFAULT_BUDGET};
    use crate::logic::{parse_formula, parse_theory};
    use crate::model::enumerate_models;
    use crate::names::Sym;

    fn a() -> Sort {
        Sort::new("A")
    }

    fn model(elems: &[&str], edges: &[(&str, &str)]) -> Arc<Structure> {
        let sig = Arc::new(parse_theory("sort A; rel R(A,A);").unwrap().signature);
        let mut m = Structure::empty(sig);
        for e in elems {
            m.add_element(&a(), Elem::new(e)).unwrap();
        }
        for (x, y) in edges {
            m.add_fact(&Sym::new("R"), vec![Elem::new(x), Elem::new(y)]).unwrap();
        }
        Arc::new(m)
    }

    #[test]
    fn diagrams_of_small_structures() {
        let sig = model(&[], &[]).signature().clone();
        let f = canonical_isolating_formula(&model(&["e"], &[]), &[a()], &[Elem::new("e")]).unwrap();
        assert!(f.alpha_eq(&parse_formula(&sig, "[x:A] true").unwrap()));
        let f = canonical_isolating_formula(&model(&["a", "b"], &[("a", "b")]), &[a()], &[Elem::new("a")]).unwrap();
        assert!(f.alpha_eq(&parse_formula(&sig, "[x:A] exists y:A. R(x, y)").unwrap()), "{f}");
    }

    #[test]
    fn diagram_of_the_transitivity_chase() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);").unwrap();
        let phi = parse_formula(&t.signature, "[x:A,y:A,z:A] R(x,y) & R(y,z)").unwrap();
        let r = chase(&phi, &t, DEFAULT_BUDGET).unwrap();
        let f = canonical_isolating_formula(&r.model, &[a(), a(), a()], &r.generic).unwrap();
        let expected = parse_formula(&t.signature, "[x:A,y:A,z:A] R(x,y) & R(x,z) & R(y,z)").unwrap();
        assert!(f.alpha_eq(&expected), "{f}");
    }

    #[test]
    fn chase_models_are_isolated_relative_to_the_enumerated_corpus() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);").unwrap();
        let phi = parse_formula(&t.signature, "[x:A,y:A] exists z:A. R(x,z) & R(z,y)").unwrap();
        let r = chase(&phi, &t, DEFAULT_BUDGET).unwrap();
        let corpus: Vec<Arc<Structure>> = enumerate_models(&t, 3).map(Arc::new).collect();
        assert!(check_isolation(&phi, &r.model, &r.generic, &corpus).unwrap());
    }

    #[test]
    fn an_overdetermined_structure_is_not_isolated_by_top() {
        let m = model(&["a"], &[("a", "a")]);
        let n = model(&["b"], &[]);
        let f = parse_formula(m.signature(), "[x:A] true").unwrap();
        assert!(!check_isolation(&f, &m, &[Elem::new("a")], &[n]).unwrap());
        assert!(check_isolation(&f, &m, &[Elem::new("a")], std::slice::from_ref(&m)).unwrap());
    }

    #[test]
    fn precondition_is_enforced() {
        let m = model(&["a"], &[]);
        let f = parse_formula(m.signature(), "[x:A] R(x, x)").unwrap();
        assert!(matches!(check_isolation(&f, &m, &[Elem::new("a")], &[]), Err(ModelError::Precondition(_))));
    }
}
