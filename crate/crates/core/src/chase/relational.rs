//! Replacing function symbols by their graphs.
//!
//! Each function `f: A1 ... An → B` becomes a relation `G_f(A1, ..., An, B)`
//! together with a functionality and a totality axiom, and every term in a
//! formula is flattened into graph atoms under fresh existentials.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::logic::{Context, Formula, FormulaInContext, Sequent, Signature, Term, Theory};
use crate::model::{ModelError, Structure};
use crate::names::{FreshNames, Sort, Sym, Var};

/// The relational counterpart of a theory, with the translations of formulas
/// and structures between the two signatures.
#[derive(Clone, Debug)]
pub struct Relationalization {
    original: Arc<Signature>,
    relational: Arc<Signature>,
    theory: Theory,
    graphs: BTreeMap<Sym, Sym>,
}

/// The relational theory alone; see [`Relationalization`].
pub fn relationalize(t: &Theory) -> Theory {
    Relationalization::new(t).theory
}

impl Relationalization {
    pub fn new(t: &Theory) -> Self {
        let original = Arc::new(t.signature.clone());
        if t.signature.is_relational() {
            return Relationalization {
                relational: original.clone(),
                original,
                theory: t.clone(),
                graphs: BTreeMap::new(),
            };
        }
        let mut sig = Signature::new();
        for s in t.signature.sorts() {
            sig.add_sort(s.clone()).expect("fresh sort");
        }
        for (r, arity) in t.signature.relations() {
            sig.add_relation(r.clone(), arity.to_vec()).expect("fresh relation");
        }
        let mut graphs = BTreeMap::new();
        for (f, ty) in t.signature.functions() {
            let mut name = format!("G_{f}");
            while t.signature.is_symbol(&name) || sig.is_symbol(&name) {
                name.push('\'');
            }
            let mut arity = ty.args.clone();
            arity.push(ty.result.clone());
            sig.add_relation(name.as_str(), arity).expect("fresh graph symbol");
            graphs.insert(f.clone(), Sym::from(name));
        }
        let mut r =
            Relationalization { original, relational: Arc::new(sig), theory: Theory::empty(Signature::new()), graphs };
        let mut axioms: Vec<Sequent> = t.axioms.iter().map(|a| r.sequent(a)).collect();
        for (f, ty) in t.signature.functions() {
            let g = r.graphs[f].clone();
            let xs: Vec<(Var, Sort)> =
                ty.args.iter().enumerate().map(|(i, s)| (Var::new(format!("x{i}")), s.clone())).collect();
            let atom = |y: &str| {
                let mut args: Vec<Term> = xs.iter().map(|(v, _)| Term::Var(v.clone())).collect();
                args.push(Term::var(y));
                Formula::Rel(g.clone(), args)
            };
            let mut ctx = xs.clone();
            ctx.push((Var::new("y"), ty.result.clone()));
            ctx.push((Var::new("z"), ty.result.clone()));
            axioms.push(Sequent::new(
                Context(ctx),
                Formula::and(atom("y"), atom("z")),
                Formula::eq(Term::var("y"), Term::var("z")),
            ));
            axioms.push(Sequent::new(
                Context(xs.clone()),
                Formula::Top,
                Formula::exists("y", ty.result.clone(), atom("y")),
            ));
        }
        r.theory = Theory::new((*r.relational).clone(), axioms).expect("relationalized axioms are well-formed");
        r
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn original_signature(&self) -> &Arc<Signature> {
        &self.original
    }

    pub fn relational_signature(&self) -> &Arc<Signature> {
        &self.relational
    }

    /// The graph relation standing for function `f`.
    pub fn graph_of(&self, f: &Sym) -> Option<&Sym> {
        self.graphs.get(f)
    }

    pub fn is_trivial(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Flattens all function terms of a formula into graph atoms.
    pub fn formula(&self, f: &FormulaInContext) -> FormulaInContext {
        if self.graphs.is_empty() {
            return f.clone();
        }
        let mut fresh = self.fresh_for(&f.body, f.context.vars());
        FormulaInContext::new(f.context.clone(), self.flatten(&f.body, &mut fresh))
    }

    pub fn sequent(&self, s: &Sequent) -> Sequent {
        if self.graphs.is_empty() {
            return s.clone();
        }
        let mut used = s.lhs.all_vars();
        used.extend(s.rhs.all_vars());
        let mut fresh = self.fresh_for(&Formula::Top, used.iter().chain(s.context.vars()));
        Sequent::new(s.context.clone(), self.flatten(&s.lhs, &mut fresh), self.flatten(&s.rhs, &mut fresh))
    }

    fn fresh_for<'a>(&self, body: &Formula, extra: impl Iterator<Item = &'a Var>) -> FreshNames {
        let mut taken: BTreeSet<String> = body.all_vars().iter().map(|v| v.to_string()).collect();
        taken.extend(extra.map(|v| v.to_string()));
        for s in self.relational.relations().map(|(r, _)| r.to_string()) {
            taken.insert(s);
        }
        for s in self.original.functions().map(|(f, _)| f.to_string()) {
            taken.insert(s);
        }
        FreshNames::avoiding("v", taken)
    }

    fn flatten(&self, f: &Formula, fresh: &mut FreshNames) -> Formula {
        match f {
            Formula::Top => Formula::Top,
            Formula::And(l, r) => Formula::and(self.flatten(l, fresh), self.flatten(r, fresh)),
            Formula::Exists(v, s, b) => Formula::Exists(v.clone(), s.clone(), Box::new(self.flatten(b, fresh))),
            Formula::Rel(r, args) => {
                let mut binders = Vec::new();
                let mut atoms = Vec::new();
                let flat: Vec<Term> =
                    args.iter().map(|a| Term::Var(self.flatten_term(a, fresh, &mut binders, &mut atoms))).collect();
                atoms.push(Formula::Rel(r.clone(), flat));
                Formula::exists_all(&binders, Formula::conj(atoms))
            }
            Formula::Eq(l, r) => {
                let mut binders = Vec::new();
                let mut atoms = Vec::new();
                match (l, r) {
                    (Term::Var(_), Term::Var(_)) => return f.clone(),
                    (Term::App(g, gargs), Term::Var(v)) | (Term::Var(v), Term::App(g, gargs)) => {
                        self.graph_atom(g, gargs, v.clone(), fresh, &mut binders, &mut atoms);
                    }
                    (Term::App(..), Term::App(g, gargs)) => {
                        let lv = self.flatten_term(l, fresh, &mut binders, &mut atoms);
                        self.graph_atom(g, gargs, lv, fresh, &mut binders, &mut atoms);
                    }
                }
                Formula::exists_all(&binders, Formula::conj(atoms))
            }
        }
    }

    /// Adds `G_g(args..., result)` after flattening the arguments.
    fn graph_atom(
        &self,
        g: &Sym,
        args: &[Term],
        result: Var,
        fresh: &mut FreshNames,
        binders: &mut Vec<(Var, Sort)>,
        atoms: &mut Vec<Formula>,
    ) {
        let mut flat: Vec<Term> = args.iter().map(|a| Term::Var(self.flatten_term(a, fresh, binders, atoms))).collect();
        flat.push(Term::Var(result));
        atoms.push(Formula::Rel(self.graphs[g].clone(), flat));
    }

    fn flatten_term(
        &self,
        t: &Term,
        fresh: &mut FreshNames,
        binders: &mut Vec<(Var, Sort)>,
        atoms: &mut Vec<Formula>,
    ) -> Var {
        match t {
            Term::Var(v) => v.clone(),
            Term::App(g, args) => {
                let y = Var::from(fresh.next_name());
                let sort = self.original.function(g).expect("declared function").result.clone();
                binders.push((y.clone(), sort));
                self.graph_atom(g, args, y.clone(), fresh, binders, atoms);
                y
            }
        }
    }

    /// The relational structure with each function replaced by its graph.
    pub fn structure_to_relational(&self, m: &Structure) -> Result<Structure, ModelError> {
        if **m.signature() != *self.original {
            return Err(ModelError::Sort("structure is not over the original signature".into()));
        }
        if self.graphs.is_empty() {
            return m.clone().with_signature(self.relational.clone());
        }
        let mut out = Structure::empty(self.relational.clone());
        for (s, e) in m.elements() {
            out.add_element(s, e.clone())?;
        }
        for (r, t) in m.relations() {
            for tuple in t {
                out.add_fact(r, tuple.clone())?;
            }
        }
        for (f, g) in m.functions() {
            for (args, v) in g {
                let mut tuple = args.clone();
                tuple.push(v.clone());
                out.add_fact(&self.graphs[f], tuple)?;
            }
        }
        Ok(out)
    }

    /// Reads functions back off their graphs; fails unless every graph is
    /// functional and total.
    pub fn structure_from_relational(&self, m: &Structure) -> Result<Structure, ModelError> {
        if **m.signature() != *self.relational {
            return Err(ModelError::Sort("structure is not over the relational signature".into()));
        }
        if self.graphs.is_empty() {
            return m.clone().with_signature(self.original.clone());
        }
        let mut out = Structure::empty(self.original.clone());
        for (s, e) in m.elements() {
            out.add_element(s, e.clone())?;
        }
        for (r, _) in self.original.relations() {
            for tuple in m.relation(r) {
                out.add_fact(r, tuple.clone())?;
            }
        }
        for (f, g) in &self.graphs {
            for tuple in m.relation(g) {
                let (args, v) = tuple.split_at(tuple.len() - 1);
                out.set_function(f, args.to_vec(), v[0].clone())?;
            }
        }
        out.validate()?;
        Ok(out)
    }
}
