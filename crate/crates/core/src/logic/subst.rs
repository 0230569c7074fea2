use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Context, Formula, FormulaInContext, LogicError, Term};
use crate::names::{Elem, Sort, Var};

/// Capture-avoiding variable renaming of a formula in context.
///
/// Context variables missing from `map` keep their name. Several variables
/// may be sent to the same target (identifying them), provided their sorts
/// agree. The new context lists the targets in order of first occurrence.
/// Bound variables that would capture a target are freshened by priming.
pub fn substitute(f: &FormulaInContext, map: &BTreeMap<Var, Var>) -> Result<FormulaInContext, LogicError> {
    let mut new_ctx: Vec<(Var, Sort)> = Vec::new();
    let mut sigma: HashMap<Var, Var> = HashMap::new();
    for (x, s) in f.context.iter() {
        let target = map.get(x).cloned().unwrap_or_else(|| x.clone());
        match new_ctx.iter().find(|(v, _)| *v == target) {
            Some((_, existing)) if existing != s => {
                return Err(LogicError::Sort(format!(
                    "renaming identifies `{target}` at sorts `{existing}` and `{s}`"
                )));
            }
            Some(_) => {}
            None => new_ctx.push((target.clone(), s.clone())),
        }
        sigma.insert(x.clone(), target);
    }
    let mut used: BTreeSet<Var> = f.body.all_vars();
    used.extend(f.context.vars().cloned());
    used.extend(sigma.values().cloned());
    let body = subst_formula(&f.body, &sigma, &mut used);
    Ok(FormulaInContext::new(Context(new_ctx), body))
}

/// Renames the context positionally to `names` (which must be distinct).
pub fn rename_context(f: &FormulaInContext, names: &[Var]) -> FormulaInContext {
    assert_eq!(names.len(), f.context.len(), "rename_context: length mismatch");
    let map: BTreeMap<Var, Var> = f.context.vars().cloned().zip(names.iter().cloned()).collect();
    substitute(f, &map).expect("injective renaming preserves sorts")
}

/// Applies a free-variable renaming to a bare formula, avoiding capture.
pub fn rename_free(body: &Formula, map: &HashMap<Var, Var>) -> Formula {
    let mut used = body.all_vars();
    used.extend(map.keys().cloned());
    used.extend(map.values().cloned());
    subst_formula(body, map, &mut used)
}

fn prime(v: &Var, used: &BTreeSet<Var>) -> Var {
    let mut name = format!("{v}'");
    while used.contains(name.as_str()) {
        name.push('\'');
    }
    Var::from(name)
}

fn subst_term(t: &Term, sigma: &HashMap<Var, Var>) -> Term {
    match t {
        Term::Var(v) => Term::Var(sigma.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| subst_term(a, sigma)).collect()),
    }
}

fn subst_formula(f: &Formula, sigma: &HashMap<Var, Var>, used: &mut BTreeSet<Var>) -> Formula {
    match f {
        Formula::Top => Formula::Top,
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| subst_term(a, sigma)).collect()),
        Formula::Eq(l, r) => Formula::Eq(subst_term(l, sigma), subst_term(r, sigma)),
        Formula::And(l, r) => Formula::and(subst_formula(l, sigma, used), subst_formula(r, sigma, used)),
        Formula::Exists(v, s, body) => {
            let free = body.free_vars();
            let mut inner: HashMap<Var, Var> = sigma
                .iter()
                .filter(|(k, _)| *k != v && free.contains(*k))
                .map(|(k, t)| (k.clone(), t.clone()))
                .collect();
            let captures = inner.values().any(|t| t == v);
            let binder = if captures {
                let fresh = prime(v, used);
                used.insert(fresh.clone());
                inner.insert(v.clone(), fresh.clone());
                fresh
            } else {
                v.clone()
            };
            Formula::Exists(binder, s.clone(), Box::new(subst_formula(body, &inner, used)))
        }
    }
}

/// True iff `a_i = a_j` implies `i = j` or the sorts at `i` and `j` differ.
pub fn is_reduced(context: &Context, tuple: &[Elem]) -> bool {
    let sorts = context.sorts();
    for i in 0..tuple.len() {
        for j in (i + 1)..tuple.len() {
            if tuple[i] == tuple[j] && sorts[i] == sorts[j] {
                return false;
            }
        }
    }
    true
}

/// Produces an equivalent presentation `(⌜x'.φ'⌝, a')` of the basic open
/// `⟨⌜x.φ⌝, a⟩` in which no element repeats at the same sort.
pub fn reduce_presentation(f: &FormulaInContext, tuple: &[Elem]) -> Result<(FormulaInContext, Vec<Elem>), LogicError> {
    if tuple.len() != f.context.len() {
        return Err(LogicError::Arity(format!(
            "tuple of length {} against context of length {}",
            tuple.len(),
            f.context.len()
        )));
    }
    let ctx = &f.context.0;
    let mut map = BTreeMap::new();
    let mut kept = Vec::new();
    for j in 0..tuple.len() {
        let first = (0..j).find(|&i| tuple[i] == tuple[j] && ctx[i].1 == ctx[j].1);
        match first {
            Some(i) => {
                map.insert(ctx[j].0.clone(), ctx[i].0.clone());
            }
            None => kept.push(tuple[j].clone()),
        }
    }
    if map.is_empty() {
        return Ok((f.clone(), tuple.to_vec()));
    }
    Ok((substitute(f, &map)?, kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, parse_theory, Signature};

    fn sig() -> Signature {
        parse_theory("sort A; sort B; rel R(A,A); rel S(A,B);").unwrap().signature
    }

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<Var, Var> {
        pairs.iter().map(|(a, b)| (Var::new(a), Var::new(b))).collect()
    }

    fn elems(names: &[&str]) -> Vec<Elem> {
        names.iter().map(Elem::new).collect()
    }

    #[test]
    fn pure_renaming() {
        let f = parse_formula(&sig(), "[x:A, y:A] R(x, y)").unwrap();
        let g = substitute(&f, &map(&[("x", "u"), ("y", "v")])).unwrap();
        assert_eq!(g, parse_formula(&sig(), "[u:A, v:A] R(u, v)").unwrap());
    }

    #[test]
    fn bound_variable_is_freshened() {
        let f = parse_formula(&sig(), "[x:A] exists y:A. R(x, y)").unwrap();
        let g = substitute(&f, &map(&[("x", "y")])).unwrap();
        assert_eq!(g.to_string(), "[y:A] exists y':A. R(y, y')");
    }

    #[test]
    fn collapsing_substitution() {
        let f = parse_formula(&sig(), "[x:A, y:A] R(x, y)").unwrap();
        let g = substitute(&f, &map(&[("x", "u"), ("y", "u")])).unwrap();
        assert_eq!(g.to_string(), "[u:A] R(u, u)");
    }

    #[test]
    fn sort_violating_identification_is_rejected() {
        let f = parse_formula(&sig(), "[x:A, y:B] S(x, y)").unwrap();
        assert!(matches!(substitute(&f, &map(&[("x", "u"), ("y", "u")])), Err(LogicError::Sort(_))));
    }

    #[test]
    fn reduce_forced_identification() {
        let f = parse_formula(&sig(), "[x:A, y:A] R(x, y)").unwrap();
        let (g, t) = reduce_presentation(&f, &elems(&["a", "a"])).unwrap();
        assert!(g.alpha_eq(&parse_formula(&sig(), "[u:A] R(u, u)").unwrap()));
        assert_eq!(t, elems(&["a"]));
    }

    #[test]
    fn reduce_leaves_reduced_input_alone() {
        let f = parse_formula(&sig(), "[x:A, y:A] R(x, y)").unwrap();
        let (g, t) = reduce_presentation(&f, &elems(&["a", "b"])).unwrap();
        assert_eq!(g, f);
        assert_eq!(t, elems(&["a", "b"]));
    }

    #[test]
    fn reduce_three_positions() {
        let f = parse_formula(&sig(), "[x:A, y:A, z:A] R(x, y) & R(y, z)").unwrap();
        let (g, t) = reduce_presentation(&f, &elems(&["a", "b", "a"])).unwrap();
        assert!(g.alpha_eq(&parse_formula(&sig(), "[u:A, v:A] R(u, v) & R(v, u)").unwrap()));
        assert_eq!(t, elems(&["a", "b"]));
    }

    #[test]
    fn same_element_at_different_sorts_is_already_reduced() {
        let f = parse_formula(&sig(), "[x:A, y:B] S(x, y)").unwrap();
        assert!(is_reduced(&f.context, &elems(&["a", "a"])));
        let (g, _) = reduce_presentation(&f, &elems(&["a", "a"])).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn reduce_rejects_length_mismatch() {
        let f = parse_formula(&sig(), "[x:A, y:A] R(x, y)").unwrap();
        assert!(matches!(reduce_presentation(&f, &elems(&["a"])), Err(LogicError::Arity(_))));
    }
}
