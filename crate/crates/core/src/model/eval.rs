//! Definable sets `⟦x.φ⟧^M`, computed bottom-up as relational-algebra tables.
//!
//! Each subformula evaluates to a table over its free variables: `⊤` is the
//! single empty row, atoms scan relation tables (or enumerate assignments when
//! function terms occur), `∧` is a natural join and `∃` a projection. Bound
//! variables are renamed apart first so joins never confuse them.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{ModelError, Structure};
use crate::logic::{Formula, FormulaInContext, Sequent, Term, Theory};
use crate::names::{Elem, Sort, Var};

/// `⟦x.φ⟧^M` as a set of tuples matched to the context.
pub fn evaluate(f: &FormulaInContext, m: &Structure) -> Result<BTreeSet<Vec<Elem>>, ModelError> {
    f.check(m.signature())?;
    Ok(Evaluator::new(f, m, None).run())
}

/// Whether `tuple ∈ ⟦x.φ⟧^M`. Cheaper than [`evaluate`] since the context
/// variables are pinned before evaluation.
pub fn holds_at(f: &FormulaInContext, m: &Structure, tuple: &[Elem]) -> Result<bool, ModelError> {
    f.check(m.signature())?;
    if tuple.len() != f.arity() {
        return Err(ModelError::Sort(format!("tuple of length {} for a context of length {}", tuple.len(), f.arity())));
    }
    for ((_, s), e) in f.context.iter().zip(tuple) {
        if !m.contains(s, e) {
            return Ok(false);
        }
    }
    Ok(!Evaluator::new(f, m, Some(tuple)).run().is_empty())
}

/// `M ⊨ φ ⊢_x ψ`, i.e. `⟦x.φ⟧ ⊆ ⟦x.ψ⟧`.
pub fn satisfies(m: &Structure, s: &Sequent) -> Result<bool, ModelError> {
    Ok(violation(m, s)?.is_none())
}

/// A tuple in `⟦x.φ⟧ \ ⟦x.ψ⟧`, if any.
pub fn violation(m: &Structure, s: &Sequent) -> Result<Option<Vec<Elem>>, ModelError> {
    let lhs = evaluate(&s.lhs_in_context(), m)?;
    if lhs.is_empty() {
        return Ok(None);
    }
    let rhs = evaluate(&s.rhs_in_context(), m)?;
    Ok(lhs.into_iter().find(|t| !rhs.contains(t)))
}

pub fn satisfies_theory(m: &Structure, t: &Theory) -> Result<bool, ModelError> {
    for a in &t.axioms {
        if !satisfies(m, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug)]
struct Table {
    vars: Vec<Var>,
    rows: Vec<Vec<Elem>>,
}

impl Table {
    fn unit() -> Table {
        Table { vars: Vec::new(), rows: vec![Vec::new()] }
    }

    fn position(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }
}

struct Evaluator<'a> {
    formula: FormulaInContext,
    m: &'a Structure,
    sorts: HashMap<Var, Sort>,
    pinned: HashMap<Var, Elem>,
}

impl<'a> Evaluator<'a> {
    fn new(f: &FormulaInContext, m: &'a Structure, pinned: Option<&[Elem]>) -> Self {
        let formula = f.canonical();
        let mut sorts: HashMap<Var, Sort> = formula.context.iter().cloned().collect();
        collect_binders(&formula.body, &mut sorts);
        let pinned = match pinned {
            Some(t) => formula.context.vars().cloned().zip(t.iter().cloned()).collect(),
            None => HashMap::new(),
        };
        Evaluator { formula, m, sorts, pinned }
    }

    fn run(&self) -> BTreeSet<Vec<Elem>> {
        let table = self.eval(&self.formula.body);
        if table.rows.is_empty() {
            return BTreeSet::new();
        }
        let ctx: Vec<Var> = self.formula.context.vars().cloned().collect();
        let missing: Vec<Var> = ctx.iter().filter(|v| table.position(v).is_none()).cloned().collect();
        let table = if missing.is_empty() { table } else { join(table, self.full_table(&missing)) };
        let positions: Vec<usize> = ctx.iter().map(|v| table.position(v).expect("context var")).collect();
        table.rows.iter().map(|row| positions.iter().map(|&p| row[p].clone()).collect()).collect()
    }

    /// Candidate values for a variable: its pinned value or the whole carrier.
    fn domain(&self, v: &Var) -> Vec<Elem> {
        if let Some(e) = self.pinned.get(v) {
            return vec![e.clone()];
        }
        self.m.carrier(&self.sorts[v]).iter().cloned().collect()
    }

    fn full_table(&self, vars: &[Var]) -> Table {
        let domains: Vec<Vec<Elem>> = vars.iter().map(|v| self.domain(v)).collect();
        let mut rows = Vec::new();
        for_each_assignment(&domains, |row| rows.push(row.to_vec()));
        Table { vars: vars.to_vec(), rows }
    }

    fn eval(&self, f: &Formula) -> Table {
        match f {
            Formula::Top => Table::unit(),
            Formula::Rel(r, args) if args.iter().all(|a| a.as_var().is_some()) => {
                let arg_vars: Vec<&Var> = args.iter().map(|a| a.as_var().unwrap()).collect();
                let mut vars: Vec<Var> = Vec::new();
                for v in &arg_vars {
                    if !vars.contains(v) {
                        vars.push((*v).clone());
                    }
                }
                let slot: Vec<usize> = arg_vars.iter().map(|v| vars.iter().position(|w| w == *v).unwrap()).collect();
                let mut rows = Vec::new();
                'tuples: for t in self.m.relation(r) {
                    let mut row: Vec<Option<&Elem>> = vec![None; vars.len()];
                    for (k, e) in t.iter().enumerate() {
                        let s = slot[k];
                        match row[s] {
                            Some(prev) if prev != e => continue 'tuples,
                            _ => row[s] = Some(e),
                        }
                    }
                    for (v, e) in vars.iter().zip(&row) {
                        if let Some(p) = self.pinned.get(v) {
                            if Some(p) != *e {
                                continue 'tuples;
                            }
                        }
                    }
                    rows.push(row.into_iter().map(|e| e.unwrap().clone()).collect());
                }
                Table { vars, rows }
            }
            Formula::Eq(Term::Var(x), Term::Var(y)) => {
                let rows = self.domain(x).into_iter().filter(|e| x == y || self.pinned.get(y).is_none_or(|p| p == e));
                if x == y {
                    Table { vars: vec![x.clone()], rows: rows.map(|e| vec![e]).collect() }
                } else {
                    Table { vars: vec![x.clone(), y.clone()], rows: rows.map(|e| vec![e.clone(), e]).collect() }
                }
            }
            Formula::Rel(..) | Formula::Eq(..) => self.eval_by_enumeration(f),
            Formula::And(l, r) => {
                let lt = self.eval(l);
                if lt.rows.is_empty() {
                    return lt;
                }
                join(lt, self.eval(r))
            }
            Formula::Exists(v, s, body) => {
                let t = self.eval(body);
                match t.position(v) {
                    Some(p) => {
                        let vars: Vec<Var> = t.vars.iter().filter(|w| *w != v).cloned().collect();
                        let mut seen = HashSet::new();
                        let rows = t
                            .rows
                            .into_iter()
                            .filter_map(|mut row| {
                                row.remove(p);
                                seen.insert(row.clone()).then_some(row)
                            })
                            .collect();
                        Table { vars, rows }
                    }
                    None if self.m.carrier(s).is_empty() => Table { vars: t.vars, rows: Vec::new() },
                    None => t,
                }
            }
        }
    }

    /// Atoms with function terms: enumerate assignments to their variables.
    fn eval_by_enumeration(&self, f: &Formula) -> Table {
        let mut vs = BTreeSet::new();
        match f {
            Formula::Rel(_, args) => args.iter().for_each(|a| a.collect_vars(&mut vs)),
            Formula::Eq(l, r) => {
                l.collect_vars(&mut vs);
                r.collect_vars(&mut vs);
            }
            _ => unreachable!("only atoms are enumerated"),
        }
        let vars: Vec<Var> = vs.into_iter().collect();
        let domains: Vec<Vec<Elem>> = vars.iter().map(|v| self.domain(v)).collect();
        let mut rows = Vec::new();
        for_each_assignment(&domains, |row| {
            let env: HashMap<&Var, &Elem> = vars.iter().zip(row).collect();
            let ok = match f {
                Formula::Rel(r, args) => {
                    let vals: Option<Vec<Elem>> = args.iter().map(|a| self.term_value(a, &env)).collect();
                    vals.is_some_and(|t| self.m.holds(r, &t))
                }
                Formula::Eq(l, r) => match (self.term_value(l, &env), self.term_value(r, &env)) {
                    (Some(a), Some(b)) => a == b,
                    _ => false,
                },
                _ => false,
            };
            if ok {
                rows.push(row.to_vec());
            }
        });
        Table { vars, rows }
    }

    fn term_value(&self, t: &Term, env: &HashMap<&Var, &Elem>) -> Option<Elem> {
        match t {
            Term::Var(v) => env.get(v).map(|e| (*e).clone()),
            Term::App(g, args) => {
                let vals: Option<Vec<Elem>> = args.iter().map(|a| self.term_value(a, env)).collect();
                self.m.apply(g, &vals?).cloned()
            }
        }
    }
}

fn collect_binders(f: &Formula, out: &mut HashMap<Var, Sort>) {
    match f {
        Formula::And(l, r) => {
            collect_binders(l, out);
            collect_binders(r, out);
        }
        Formula::Exists(v, s, body) => {
            out.insert(v.clone(), s.clone());
            collect_binders(body, out);
        }
        _ => {}
    }
}

fn join(l: Table, r: Table) -> Table {
    let shared: Vec<(usize, usize)> =
        l.vars.iter().enumerate().filter_map(|(i, v)| r.position(v).map(|j| (i, j))).collect();
    let r_extra: Vec<usize> = (0..r.vars.len()).filter(|j| !shared.iter().any(|(_, k)| k == j)).collect();
    let mut vars = l.vars.clone();
    vars.extend(r_extra.iter().map(|&j| r.vars[j].clone()));
    let mut index: HashMap<Vec<&Elem>, Vec<usize>> = HashMap::new();
    for (n, row) in r.rows.iter().enumerate() {
        let key: Vec<&Elem> = shared.iter().map(|&(_, j)| &row[j]).collect();
        index.entry(key).or_default().push(n);
    }
    let mut rows = Vec::new();
    for row in &l.rows {
        let key: Vec<&Elem> = shared.iter().map(|&(i, _)| &row[i]).collect();
        if let Some(matches) = index.get(&key) {
            for &n in matches {
                let mut out = row.clone();
                out.extend(r_extra.iter().map(|&j| r.rows[n][j].clone()));
                rows.push(out);
            }
        }
    }
    Table { vars, rows }
}

/// Calls `f` on every tuple of the cartesian product of `domains`, in
/// lexicographic order (last position fastest).
pub(crate) fn for_each_assignment<T: Clone>(domains: &[Vec<T>], mut f: impl FnMut(&[T])) {
    if domains.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; domains.len()];
    let mut row: Vec<T> = domains.iter().map(|d| d[0].clone()).collect();
    loop {
        f(&row);
        let mut k = domains.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                row[k] = domains[k][idx[k]].clone();
                break;
            }
            idx[k] = 0;
            row[k] = domains[k][0].clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::logic::{parse_formula, parse_sequent, parse_theory, Signature};
    use crate::names::Sym;

    fn sig() -> Arc<Signature> {
        Arc::new(parse_theory("sort A; rel R(A,A); rel P; fun f(A): A;").unwrap().signature)
    }

    fn model(elems: &[&str], edges: &[(&str, &str)]) -> Structure {
        let mut m = Structure::empty(sig());
        let a = Sort::new("A");
        for e in elems {
            m.add_element(&a, Elem::new(e)).unwrap();
        }
        for e in elems {
            m.set_function(&Sym::new("f"), vec![Elem::new(e)], Elem::new(elems[0])).unwrap();
        }
        for (x, y) in edges {
            m.add_fact(&Sym::new("R"), vec![Elem::new(x), Elem::new(y)]).unwrap();
        }
        m
    }

    fn tuples(rows: &[&[&str]]) -> BTreeSet<Vec<Elem>> {
        rows.iter().map(|r| r.iter().map(Elem::new).collect()).collect()
    }

    fn ev(src: &str, m: &Structure) -> BTreeSet<Vec<Elem>> {
        evaluate(&parse_formula(&sig(), src).unwrap(), m).unwrap()
    }

    #[test]
    fn top_is_the_full_extension() {
        let m = model(&["a", "b"], &[]);
        assert_eq!(ev("[x:A] true", &m), tuples(&[&["a"], &["b"]]));
    }

    #[test]
    fn existential_projects() {
        let m = model(&["a", "b"], &[("a", "b")]);
        assert_eq!(ev("[x:A] exists y:A. R(x, y)", &m), tuples(&[&["a"]]));
    }

    #[test]
    fn two_step_paths_match_brute_force() {
        let m = model(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("b", "d")]);
        let got = ev("[x:A, z:A] exists y:A. R(x, y) & R(y, z)", &m);
        let mut oracle = BTreeSet::new();
        for x in m.carrier(&Sort::new("A")) {
            for z in m.carrier(&Sort::new("A")) {
                let hit = m.carrier(&Sort::new("A")).iter().any(|y| {
                    m.holds(&Sym::new("R"), &[x.clone(), y.clone()]) && m.holds(&Sym::new("R"), &[y.clone(), z.clone()])
                });
                if hit {
                    oracle.insert(vec![x.clone(), z.clone()]);
                }
            }
        }
        assert_eq!(got, oracle);
        assert_eq!(got, tuples(&[&["a", "c"], &["a", "d"]]));
    }

    #[test]
    fn nullary_atoms_and_empty_contexts() {
        let mut m = model(&["a"], &[]);
        assert!(ev("[] P", &m).is_empty());
        m.add_fact(&Sym::new("P"), vec![]).unwrap();
        assert_eq!(ev("[] P", &m), tuples(&[&[]]));
        assert_eq!(ev("[x:A] P", &m), tuples(&[&["a"]]));
    }

    #[test]
    fn existential_over_empty_carrier_is_false() {
        let m = Structure::empty(sig());
        assert!(ev("[] exists y:A. true", &m).is_empty());
        assert_eq!(ev("[] true", &m), tuples(&[&[]]));
    }

    #[test]
    fn function_terms_and_equalities() {
        let m = model(&["a", "b"], &[("b", "a")]);
        assert_eq!(ev("[x:A] f(x) = x", &m), tuples(&[&["a"]]));
        assert_eq!(ev("[x:A] R(x, f(x))", &m), tuples(&[&["b"]]));
        assert_eq!(ev("[x:A, y:A] x = y", &m), tuples(&[&["a", "a"], &["b", "b"]]));
        assert_eq!(ev("[x:A, y:A] x = x", &m).len(), 4);
    }

    #[test]
    fn holds_at_agrees_with_evaluate() {
        let m = model(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "c")]);
        let f = parse_formula(&sig(), "[x:A, y:A] exists z:A. R(x, z) & R(z, y)").unwrap();
        let ext = evaluate(&f, &m).unwrap();
        for x in ["a", "b", "c", "zz"] {
            for y in ["a", "b", "c"] {
                let t = vec![Elem::new(x), Elem::new(y)];
                assert_eq!(holds_at(&f, &m, &t).unwrap(), ext.contains(&t));
            }
        }
    }

    #[test]
    fn satisfaction_of_sequents() {
        let s = parse_sequent(&sig(), "[x:A, y:A] R(x, y) |- R(y, x)").unwrap();
        assert!(!satisfies(&model(&["a", "b"], &[("a", "b")]), &s).unwrap());
        let t = parse_sequent(&sig(), "[x:A, y:A, z:A] R(x, y) & R(y, z) |- R(x, z)").unwrap();
        assert!(satisfies(&model(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]), &t).unwrap());
        let refl = parse_sequent(&sig(), "[x:A] R(x, x) |- R(x, x)").unwrap();
        assert!(satisfies(&model(&["a"], &[("a", "a")]), &refl).unwrap());
    }

    #[test]
    fn signature_mismatch_is_a_sort_error() {
        let m = model(&["a"], &[]);
        let other = parse_theory("sort B; rel Q(B);").unwrap().signature;
        let f = parse_formula(&other, "[x:B] Q(x)").unwrap();
        assert!(matches!(evaluate(&f, &m), Err(ModelError::Sort(_))));
    }
}
