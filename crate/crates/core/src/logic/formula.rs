use std::collections::{BTreeSet, HashMap};

use super::{LogicError, Signature};
use crate::names::{Sort, Sym, Var};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// Function application; constants are applications to no arguments.
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<Var>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: impl Into<Sym>, args: Vec<Term>) -> Term {
        Term::App(f.into(), args)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    fn sort_in(&self, sig: &Signature, scope: &[(Var, Sort)]) -> Result<Sort, LogicError> {
        match self {
            Term::Var(v) => scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| LogicError::Sort(format!("variable `{v}` is not in context"))),
            Term::App(f, args) => {
                let ty = sig.function(f).ok_or_else(|| LogicError::Sort(format!("unknown function symbol `{f}`")))?;
                if ty.args.len() != args.len() {
                    return Err(LogicError::Sort(format!(
                        "`{f}` expects {} arguments, got {}",
                        ty.args.len(),
                        args.len()
                    )));
                }
                for (a, want) in args.iter().zip(&ty.args) {
                    let got = a.sort_in(sig, scope)?;
                    if &got != want {
                        return Err(LogicError::Sort(format!("argument of `{f}` has sort `{got}`, expected `{want}`")));
                    }
                }
                Ok(ty.result.clone())
            }
        }
    }
}

/// A regular formula: built from `⊤`, atoms, `∧` and `∃` only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Rel(Sym, Vec<Term>),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Exists(Var, Sort, Box<Formula>),
}

impl Formula {
    pub fn rel(r: impl Into<Sym>, args: Vec<Term>) -> Formula {
        Formula::Rel(r.into(), args)
    }

    /// Relation atom whose arguments are all variables.
    pub fn rel_vars(r: impl Into<Sym>, vars: &[&str]) -> Formula {
        Formula::Rel(r.into(), vars.iter().map(|v| Term::var(*v)).collect())
    }

    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn exists(v: impl Into<Var>, s: impl Into<Sort>, body: Formula) -> Formula {
        Formula::Exists(v.into(), s.into(), Box::new(body))
    }

    /// Left-nested conjunction, `⊤` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// `∃v1 ... ∃vn. body`, outermost quantifier first.
    pub fn exists_all(vars: &[(Var, Sort)], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, (v, s)| Formula::Exists(v.clone(), s.clone(), Box::new(acc)))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Top => {}
            Formula::Rel(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|a| a.collect_vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Eq(l, r) => {
                let mut vs = BTreeSet::new();
                l.collect_vars(&mut vs);
                r.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::And(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Exists(v, _, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut out);
        out
    }

    fn visit_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Top => {}
            Formula::Rel(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Formula::Eq(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Formula::And(l, r) => {
                l.visit_vars(out);
                r.visit_vars(out);
            }
            Formula::Exists(v, _, body) => {
                out.insert(v.clone());
                body.visit_vars(out);
            }
        }
    }

    /// Flattens nested conjunctions (not descending under quantifiers).
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Formula::Top => {}
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn mentions_functions(&self) -> bool {
        fn term_has_app(t: &Term) -> bool {
            matches!(t, Term::App(..))
        }
        match self {
            Formula::Top => false,
            Formula::Rel(_, args) => args.iter().any(term_has_app),
            Formula::Eq(l, r) => term_has_app(l) || term_has_app(r),
            Formula::And(l, r) => l.mentions_functions() || r.mentions_functions(),
            Formula::Exists(_, _, b) => b.mentions_functions(),
        }
    }

    pub(crate) fn check(&self, sig: &Signature, scope: &mut Vec<(Var, Sort)>) -> Result<(), LogicError> {
        match self {
            Formula::Top => Ok(()),
            Formula::Rel(r, args) => {
                let arity =
                    sig.relation(r).ok_or_else(|| LogicError::Sort(format!("unknown relation symbol `{r}`")))?;
                if arity.len() != args.len() {
                    return Err(LogicError::Sort(format!(
                        "`{r}` expects {} arguments, got {}",
                        arity.len(),
                        args.len()
                    )));
                }
                for (a, want) in args.iter().zip(arity) {
                    let got = a.sort_in(sig, scope)?;
                    if &got != want {
                        return Err(LogicError::Sort(format!("argument of `{r}` has sort `{got}`, expected `{want}`")));
                    }
                }
                Ok(())
            }
            Formula::Eq(l, r) => {
                let ls = l.sort_in(sig, scope)?;
                let rs = r.sort_in(sig, scope)?;
                if ls != rs {
                    return Err(LogicError::Sort(format!("equation between sorts `{ls}` and `{rs}`")));
                }
                Ok(())
            }
            Formula::And(l, r) => {
                l.check(sig, scope)?;
                r.check(sig, scope)
            }
            Formula::Exists(v, s, body) => {
                if !sig.has_sort(s) {
                    return Err(LogicError::Sort(format!("undeclared sort `{s}`")));
                }
                if sig.is_symbol(v.as_str()) {
                    return Err(LogicError::Sort(format!("bound variable `{v}` clashes with a symbol name")));
                }
                scope.push((v.clone(), s.clone()));
                let res = body.check(sig, scope);
                scope.pop();
                res
            }
        }
    }
}

/// An ordered list of pairwise-distinct typed variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(pub Vec<(Var, Sort)>);

impl Context {
    pub fn new(vars: Vec<(Var, Sort)>) -> Self {
        Context(vars)
    }

    /// Builds a context from `(name, sort)` string pairs.
    pub fn of(vars: &[(&str, &str)]) -> Self {
        Context(vars.iter().map(|(v, s)| (Var::new(v), Sort::new(s))).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> + '_ {
        self.0.iter().map(|(v, _)| v)
    }

    pub fn sorts(&self) -> Vec<Sort> {
        self.0.iter().map(|(_, s)| s.clone()).collect()
    }

    pub fn position(&self, v: &Var) -> Option<usize> {
        self.0.iter().position(|(n, _)| n == v)
    }

    pub fn sort_of(&self, v: &Var) -> Option<&Sort> {
        self.0.iter().find(|(n, _)| n == v).map(|(_, s)| s)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (Var, Sort)> {
        self.0.iter()
    }

    pub fn concat(&self, other: &Context) -> Context {
        Context(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub(crate) fn check(&self, sig: &Signature) -> Result<(), LogicError> {
        for (i, (v, s)) in self.0.iter().enumerate() {
            if !sig.has_sort(s) {
                return Err(LogicError::Sort(format!("undeclared sort `{s}` in context")));
            }
            if sig.is_symbol(v.as_str()) {
                return Err(LogicError::Sort(format!("context variable `{v}` clashes with a symbol name")));
            }
            if self.0[..i].iter().any(|(w, _)| w == v) {
                return Err(LogicError::Sort(format!("variable `{v}` repeated in context")));
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Context {
    type Item = &'a (Var, Sort);
    type IntoIter = std::slice::Iter<'a, (Var, Sort)>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A regular formula paired with an explicit typed context `⌜x.φ⌝`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaInContext {
    pub context: Context,
    pub body: Formula,
}

impl FormulaInContext {
    /// Unchecked constructor; see [`FormulaInContext::checked`].
    pub fn new(context: Context, body: Formula) -> Self {
        FormulaInContext { context, body }
    }

    pub fn checked(sig: &Signature, context: Context, body: Formula) -> Result<Self, LogicError> {
        let f = FormulaInContext { context, body };
        f.check(sig)?;
        Ok(f)
    }

    pub fn top(context: Context) -> Self {
        FormulaInContext { context, body: Formula::Top }
    }

    /// Validates sort-correctness and that every free variable is in context.
    pub fn check(&self, sig: &Signature) -> Result<(), LogicError> {
        self.context.check(sig)?;
        let mut scope = self.context.0.clone();
        self.body.check(sig, &mut scope)?;
        for v in self.body.free_vars() {
            if self.context.position(&v).is_none() {
                return Err(LogicError::Sort(format!("free variable `{v}` not in context")));
            }
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.context.len()
    }

    /// α-normal form: context variables become `#0, #1, ...` positionally and
    /// bound variables `#b0, #b1, ...` in order of binding.
    pub fn canonical(&self) -> FormulaInContext {
        let mut map: HashMap<Var, Var> = HashMap::new();
        let context = Context(
            self.context
                .iter()
                .enumerate()
                .map(|(i, (v, s))| {
                    let n = Var::new(format!("#{i}"));
                    map.insert(v.clone(), n.clone());
                    (n, s.clone())
                })
                .collect(),
        );
        let mut counter = 0;
        let body = canon_formula(&self.body, &mut map, &mut counter);
        FormulaInContext { context, body }
    }

    pub fn alpha_eq(&self, other: &FormulaInContext) -> bool {
        self.canonical() == other.canonical()
    }
}

fn canon_term(t: &Term, map: &HashMap<Var, Var>) -> Term {
    match t {
        Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| canon_term(a, map)).collect()),
    }
}

fn canon_formula(f: &Formula, map: &mut HashMap<Var, Var>, counter: &mut usize) -> Formula {
    match f {
        Formula::Top => Formula::Top,
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(|a| canon_term(a, map)).collect()),
        Formula::Eq(l, r) => Formula::Eq(canon_term(l, map), canon_term(r, map)),
        Formula::And(l, r) => Formula::and(canon_formula(l, map, counter), canon_formula(r, map, counter)),
        Formula::Exists(v, s, body) => {
            let fresh = Var::new(format!("#b{counter}"));
            *counter += 1;
            let old = map.insert(v.clone(), fresh.clone());
            let b = canon_formula(body, map, counter);
            match old {
                Some(o) => {
                    map.insert(v.clone(), o);
                }
                None => {
                    map.remove(v);
                }
            }
            Formula::Exists(fresh, s.clone(), Box::new(b))
        }
    }
}

/// A regular sequent `φ ⊢_x ψ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub context: Context,
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Sequent {
    pub fn new(context: Context, lhs: Formula, rhs: Formula) -> Self {
        Sequent { context, lhs, rhs }
    }

    pub fn check(&self, sig: &Signature) -> Result<(), LogicError> {
        self.lhs_in_context().check(sig)?;
        self.rhs_in_context().check(sig)
    }

    pub fn lhs_in_context(&self) -> FormulaInContext {
        FormulaInContext::new(self.context.clone(), self.lhs.clone())
    }

    pub fn rhs_in_context(&self) -> FormulaInContext {
        FormulaInContext::new(self.context.clone(), self.rhs.clone())
    }
}

/// A finite presentation of a regular theory.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Sequent>,
}

impl Theory {
    pub fn new(signature: Signature, axioms: Vec<Sequent>) -> Result<Self, LogicError> {
        for a in &axioms {
            a.check(&signature)?;
        }
        Ok(Theory { signature, axioms })
    }

    pub fn empty(signature: Signature) -> Self {
        Theory { signature, axioms: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_sort("A").unwrap();
        s.add_sort("B").unwrap();
        s.add_relation("R", vec![Sort::new("A"), Sort::new("A")]).unwrap();
        s.add_function("f", vec![Sort::new("A")], "B").unwrap();
        s
    }

    #[test]
    fn free_variable_outside_context_is_rejected() {
        let f = FormulaInContext::new(Context::of(&[("x", "A")]), Formula::rel_vars("R", &["x", "y"]));
        assert!(matches!(f.check(&sig()), Err(LogicError::Sort(_))));
    }

    #[test]
    fn ill_sorted_atom_is_rejected() {
        let body = Formula::eq(Term::app("f", vec![Term::var("x")]), Term::var("x"));
        let f = FormulaInContext::new(Context::of(&[("x", "A")]), body);
        assert!(matches!(f.check(&sig()), Err(LogicError::Sort(_))));
    }

    #[test]
    fn repeated_context_variable_is_rejected() {
        let f = FormulaInContext::top(Context::of(&[("x", "A"), ("x", "A")]));
        assert!(f.check(&sig()).is_err());
    }

    #[test]
    fn alpha_equivalence_ignores_names() {
        let a = FormulaInContext::new(
            Context::of(&[("x", "A")]),
            Formula::exists("y", "A", Formula::rel_vars("R", &["x", "y"])),
        );
        let b = FormulaInContext::new(
            Context::of(&[("u", "A")]),
            Formula::exists("v", "A", Formula::rel_vars("R", &["u", "v"])),
        );
        let c = FormulaInContext::new(
            Context::of(&[("u", "A")]),
            Formula::exists("v", "A", Formula::rel_vars("R", &["v", "u"])),
        );
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn shadowed_binder_canonicalises_correctly() {
        // ∃y.∃y.R(y,y) where the inner binder shadows the outer one
        let inner = Formula::exists("y", "A", Formula::rel_vars("R", &["y", "y"]));
        let f = FormulaInContext::new(Context::default(), Formula::exists("y", "A", inner));
        let canon = f.canonical();
        let expected =
            Formula::exists("#b0", "A", Formula::exists("#b1", "A", Formula::rel_vars("R", &["#b1", "#b1"])));
        assert_eq!(canon.body, expected);
    }
}
