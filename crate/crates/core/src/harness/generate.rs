//! Seeded instance generators.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::chase::{chase_structure, ChaseError, ChaseStatus};
use crate::logic::{Context, Formula, FormulaInContext, Signature, Term, Theory};
use crate::model::{DirectedDiagram, Homomorphism, Structure};
use crate::names::{Elem, FreshNames, Sort, Sym, Var};

/// A random regular formula over `ctx`: a conjunction of one to `max_atoms`
/// atoms (relations, function graphs, equalities) on the context variables
/// and at most one existentially bound variable. Falls back to `true` when
/// the signature offers no atom over these sorts.
pub fn random_formula<R: Rng>(sig: &Signature, ctx: &Context, max_atoms: usize, rng: &mut R) -> FormulaInContext {
    let taken: BTreeSet<String> = ctx.vars().map(|v| v.to_string()).chain(symbol_names(sig)).collect();
    let mut pool: Vec<(Var, Sort)> = ctx.0.clone();
    let mut binder = None;
    if rng.random_bool(0.4) {
        let sorts: Vec<&Sort> = sig.sorts().collect();
        if let Some(s) = sorts.choose(rng) {
            let w = Var::from(FreshNames::avoiding("w", &taken).next_name());
            pool.push((w.clone(), (*s).clone()));
            binder = Some((w, (*s).clone()));
        }
    }
    let n = rng.random_range(1..=max_atoms.max(1));
    let atoms: Vec<Formula> = (0..n).filter_map(|_| random_atom(sig, &pool, rng)).collect();
    let mut body = Formula::conj(atoms);
    if let Some((w, s)) = binder {
        if body.free_vars().contains(&w) {
            body = Formula::exists(w, s, body);
        }
    }
    FormulaInContext::new(ctx.clone(), body)
}

fn symbol_names(sig: &Signature) -> impl Iterator<Item = String> + '_ {
    sig.relations().map(|(r, _)| r.to_string()).chain(sig.functions().map(|(f, _)| f.to_string()))
}

fn pick_var<R: Rng>(pool: &[(Var, Sort)], s: &Sort, rng: &mut R) -> Option<Term> {
    let vs: Vec<&Var> = pool.iter().filter(|(_, t)| t == s).map(|(v, _)| v).collect();
    vs.choose(rng).map(|v| Term::Var((*v).clone()))
}

fn random_atom<R: Rng>(sig: &Signature, pool: &[(Var, Sort)], rng: &mut R) -> Option<Formula> {
    let rels: Vec<(&Sym, &Vec<Sort>)> = sig.relations().collect();
    let funs: Vec<_> = sig.functions().collect();
    for _ in 0..8 {
        let roll = rng.random_range(0..10);
        if roll < 6 && !rels.is_empty() {
            let (r, arity) = rels.choose(rng).unwrap();
            let args: Option<Vec<Term>> = arity.iter().map(|s| pick_var(pool, s, rng)).collect();
            if let Some(args) = args {
                return Some(Formula::Rel((*r).clone(), args));
            }
        } else if roll < 8 && !funs.is_empty() {
            let (f, ty) = funs.choose(rng).unwrap();
            let args: Option<Vec<Term>> = ty.args.iter().map(|s| pick_var(pool, s, rng)).collect();
            if let (Some(args), Some(v)) = (args, pick_var(pool, &ty.result, rng)) {
                return Some(Formula::eq(Term::App((*f).clone(), args), v));
            }
        } else if let Some((v, s)) = pool.choose(rng) {
            if let Some(w) = pick_var(pool, s, rng) {
                return Some(Formula::eq(Term::Var(v.clone()), w));
            }
        }
    }
    None
}

/// A formula over `ctx` that holds at `generic` in `m`: up to `facts` facts
/// of `m` read back as atoms, with context variables for the generic
/// elements and existentials for everything else.
pub fn formula_true_at<R: Rng>(
    m: &Structure,
    ctx: &Context,
    generic: &[Elem],
    facts: usize,
    rng: &mut R,
) -> FormulaInContext {
    let sig = m.signature();
    let mut atoms: Vec<(Sym, Vec<(Sort, Elem)>, Option<(Sort, Elem)>)> = Vec::new();
    for (r, arity) in sig.relations() {
        for t in m.relation(r) {
            atoms.push((r.clone(), arity.iter().cloned().zip(t.iter().cloned()).collect(), None));
        }
    }
    for (f, ty) in sig.functions() {
        for (args, v) in m.function(f) {
            let a = ty.args.iter().cloned().zip(args.iter().cloned()).collect();
            atoms.push((f.clone(), a, Some((ty.result.clone(), v.clone()))));
        }
    }
    atoms.shuffle(rng);
    atoms.truncate(facts);
    let taken: BTreeSet<String> = ctx.vars().map(|v| v.to_string()).chain(symbol_names(sig)).collect();
    let mut fresh = FreshNames::avoiding("w", &taken);
    let mut var_of: BTreeMap<(Sort, Elem), Var> = BTreeMap::new();
    for ((v, s), e) in ctx.iter().zip(generic) {
        var_of.entry((s.clone(), e.clone())).or_insert_with(|| v.clone());
    }
    let mut binders = Vec::new();
    let mut term = |s: &Sort, e: &Elem| -> Term {
        let v = var_of.entry((s.clone(), e.clone())).or_insert_with(|| {
            let w = Var::from(fresh.next_name());
            binders.push((w.clone(), s.clone()));
            w
        });
        Term::Var(v.clone())
    };
    let mut body = Vec::new();
    for (sym, args, value) in &atoms {
        let ts: Vec<Term> = args.iter().map(|(s, e)| term(s, e)).collect();
        body.push(match value {
            None => Formula::Rel(sym.clone(), ts),
            Some((s, e)) => Formula::eq(Term::App(sym.clone(), ts), term(s, e)),
        });
    }
    FormulaInContext::new(ctx.clone(), Formula::exists_all(&binders, Formula::conj(body)))
}

/// A tuple of the given sorts drawn from `names` (the same names are used
/// for every sort).
pub fn random_tuple<R: Rng>(sorts: &[Sort], names: &[Elem], rng: &mut R) -> Vec<Elem> {
    sorts.iter().map(|_| names.choose(rng).expect("names").clone()).collect()
}

/// Bounds for [`random_diagram`].
#[derive(Clone, Copy, Debug)]
pub struct DiagramBounds {
    pub max_stages: usize,
    pub max_per_sort: usize,
    pub budget: usize,
}

/// How the index poset of a generated diagram looks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `0 → 1 → … → n-1`.
    Chain,
    /// Two roots `0, 1` joined at stage `2`, then a chain.
    Fork,
}

/// A seeded directed diagram of models of `t`.
///
/// Each stage is obtained from its predecessors by copying them, merging a
/// pair of elements now and then (relational signatures only), adding a
/// few elements and facts, and chasing the result. Elements are then renamed
/// so that every element keeps the least `(first stage, name)` among the
/// elements that map onto it, and fresh names are never reused. The colimit
/// therefore carries exactly the names of the top stage.
///
/// Returns `None` when no attempt stays within the bounds.
pub fn random_diagram<R: Rng>(
    t: &Theory,
    bounds: DiagramBounds,
    rng: &mut R,
) -> Result<Option<(Shape, DirectedDiagram)>, ChaseError> {
    for _ in 0..64 {
        let stages = rng.random_range(2..=bounds.max_stages.max(2));
        let shape = if stages >= 3 && rng.random_bool(0.3) { Shape::Fork } else { Shape::Chain };
        if let Some(d) = try_diagram(t, bounds, stages, shape, rng)? {
            return Ok(Some((shape, d)));
        }
    }
    Ok(None)
}

type Maps = BTreeMap<Sort, BTreeMap<Elem, Elem>>;

struct Builder<'a> {
    t: &'a Theory,
    sig: Arc<Signature>,
    bounds: DiagramBounds,
    fresh: FreshNames,
    origin: BTreeMap<(Sort, Elem), usize>,
}

fn try_diagram<R: Rng>(
    t: &Theory,
    bounds: DiagramBounds,
    stages: usize,
    shape: Shape,
    rng: &mut R,
) -> Result<Option<DirectedDiagram>, ChaseError> {
    let mut b =
        Builder { t, sig: Arc::new(t.signature.clone()), bounds, fresh: FreshNames::new("v"), origin: BTreeMap::new() };
    let mut models: Vec<Arc<Structure>> = Vec::new();
    let mut arrows = Vec::new();
    for k in 0..stages {
        let preds: Vec<usize> = match (shape, k) {
            (_, 0) | (Shape::Fork, 1) => vec![],
            (Shape::Fork, 2) => vec![0, 1],
            _ => vec![k - 1],
        };
        let pred_models: Vec<Arc<Structure>> = preds.iter().map(|&p| models[p].clone()).collect();
        let Some((m, maps)) = b.stage(k, &pred_models, rng)? else {
            return Ok(None);
        };
        let m = Arc::new(m);
        for (&p, map) in preds.iter().zip(maps) {
            let h = Homomorphism::new(models[p].clone(), m.clone(), map).expect("chase maps are homomorphisms");
            arrows.push(((p, k), h));
        }
        models.push(m);
    }
    Ok(Some(DirectedDiagram::new(models, arrows).expect("generated diagrams are well formed")))
}

impl Builder<'_> {
    fn stage<R: Rng>(
        &mut self,
        k: usize,
        preds: &[Arc<Structure>],
        rng: &mut R,
    ) -> Result<Option<(Structure, Vec<Maps>)>, ChaseError> {
        let sig = self.sig.clone();
        let mut p = Structure::empty(sig.clone());
        for m in preds {
            copy_into(&mut p, m, &|_, e| e.clone());
        }
        // Merge y into x, remembering where every element went.
        let mut subst: BTreeMap<(Sort, Elem), Elem> = BTreeMap::new();
        if sig.functions().next().is_none() && rng.random_bool(0.25) {
            let sorts: Vec<Sort> = sig.sorts().filter(|s| p.carrier(s).len() >= 2).cloned().collect();
            if let Some(s) = sorts.choose(rng) {
                let pair: Vec<Elem> =
                    p.carrier(s).iter().cloned().collect::<Vec<_>>().choose_multiple(rng, 2).cloned().collect();
                let (keep, drop) = self.order(s, &pair[0], &pair[1]);
                subst.insert((s.clone(), drop), keep);
                let mut q = Structure::empty(sig.clone());
                copy_into(&mut q, &p, &|s, e| subst.get(&(s.clone(), e.clone())).cloned().unwrap_or_else(|| e.clone()));
                p = q;
            }
        }
        let sorts: Vec<Sort> = sig.sorts().cloned().collect();
        let new = if k == 0 || preds.is_empty() { rng.random_range(1..=3) } else { rng.random_range(0..=2) };
        for _ in 0..new {
            let s = sorts.choose(rng).expect("a sort");
            let e = Elem::from(self.fresh.next_name());
            p.add_element(s, e).expect("declared sort");
        }
        self.random_facts(&mut p, rng);

        let r = chase_structure(&p, self.t, self.bounds.budget)?;
        if r.status != ChaseStatus::Terminated
            || sorts.iter().any(|s| r.model.carrier(s).len() > self.bounds.max_per_sort)
        {
            return Ok(None);
        }
        // Name each output element after its least preimage.
        let mut best: BTreeMap<(Sort, Elem), (usize, Elem)> = BTreeMap::new();
        for (s, m) in &r.embedding {
            for (x, y) in m {
                let o = self.origin.get(&(s.clone(), x.clone())).copied().unwrap_or(k);
                let cand = (o, x.clone());
                best.entry((s.clone(), y.clone()))
                    .and_modify(|c| {
                        if cand < *c {
                            *c = cand.clone();
                        }
                    })
                    .or_insert(cand);
            }
        }
        let mut rename: BTreeMap<(Sort, Elem), Elem> = BTreeMap::new();
        for (s, y) in r.model.elements() {
            let name = match best.get(&(s.clone(), y.clone())) {
                Some((_, x)) => x.clone(),
                None => Elem::from(self.fresh.next_name()),
            };
            let o = best.get(&(s.clone(), y.clone())).map_or(k, |(o, _)| *o);
            self.origin.entry((s.clone(), name.clone())).or_insert(o);
            rename.insert((s.clone(), y.clone()), name);
        }
        let mut out = Structure::empty(sig.clone());
        copy_into(&mut out, &r.model, &|s, e| rename[&(s.clone(), e.clone())].clone());
        let maps = preds
            .iter()
            .map(|m| {
                m.carriers()
                    .iter()
                    .map(|(s, c)| {
                        let f = c
                            .iter()
                            .map(|x| {
                                let merged = subst.get(&(s.clone(), x.clone())).unwrap_or(x);
                                let y = &r.embedding[s][merged];
                                (x.clone(), rename[&(s.clone(), y.clone())].clone())
                            })
                            .collect();
                        (s.clone(), f)
                    })
                    .collect()
            })
            .collect();
        Ok(Some((out, maps)))
    }

    /// `(keep, drop)` by least `(first stage, name)`.
    fn order(&self, s: &Sort, a: &Elem, b: &Elem) -> (Elem, Elem) {
        let key = |e: &Elem| (self.origin.get(&(s.clone(), e.clone())).copied().unwrap_or(usize::MAX), e.clone());
        if key(a) <= key(b) {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    fn random_facts<R: Rng>(&self, p: &mut Structure, rng: &mut R) {
        let sig = self.sig.clone();
        let rels: Vec<(Sym, Vec<Sort>)> = sig.relations().map(|(r, a)| (r.clone(), a.clone())).collect();
        let pick = |p: &Structure, s: &Sort, rng: &mut R| -> Option<Elem> {
            p.carrier(s).iter().cloned().collect::<Vec<_>>().choose(rng).cloned()
        };
        for _ in 0..rng.random_range(0..=3) {
            let Some((r, arity)) = rels.choose(rng) else { break };
            let args: Option<Vec<Elem>> = arity.iter().map(|s| pick(p, s, rng)).collect();
            if let Some(args) = args {
                p.add_fact(r, args).expect("typed tuple");
            }
        }
        // Fill in most undefined function values with existing elements; the
        // chase supplies the rest.
        for (f, ty) in sig.functions() {
            let mut tuples: Vec<Vec<Elem>> = vec![vec![]];
            for s in &ty.args {
                let c: Vec<Elem> = p.carrier(s).iter().cloned().collect();
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| c.iter().map(move |e| [t.clone(), vec![e.clone()]].concat()))
                    .collect();
            }
            for args in tuples {
                if p.apply(f, &args).is_none() && rng.random_bool(0.7) {
                    if let Some(v) = pick(p, &ty.result, rng) {
                        p.set_function(f, args, v).expect("undefined entry");
                    }
                }
            }
        }
    }
}

/// Copies the elements and facts of `m` into `out` through `name`.
fn copy_into(out: &mut Structure, m: &Structure, name: &dyn Fn(&Sort, &Elem) -> Elem) {
    let sig = m.signature().clone();
    for (s, e) in m.elements() {
        out.add_element(s, name(s, e)).expect("same signature");
    }
    for (r, arity) in sig.relations() {
        for t in m.relation(r) {
            out.add_fact(r, arity.iter().zip(t).map(|(s, e)| name(s, e)).collect()).expect("typed tuple");
        }
    }
    for (f, ty) in sig.functions() {
        for (args, v) in m.function(f) {
            let a = ty.args.iter().zip(args).map(|(s, e)| name(s, e)).collect();
            out.set_function(f, a, name(&ty.result, v)).expect("functions are only copied without merging");
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::harness::corpus::corpus;
    use crate::model::{directed_colimit, holds_at, satisfies_theory};

    #[test]
    fn random_formulas_are_well_typed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for c in corpus() {
            for f in &c.formulas {
                for _ in 0..20 {
                    let g = random_formula(&c.theory.signature, &f.context, 3, &mut rng);
                    g.check(&c.theory.signature).unwrap();
                }
            }
        }
    }

    #[test]
    fn formulas_true_at_a_tuple_hold_there() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for c in corpus() {
            for m in c.models(2).into_iter().take(30) {
                let sorts: Vec<Sort> = c.formulas[0].context.sorts();
                let names: Vec<Elem> = (0..2).map(|i| Elem::new(format!("e{i}"))).collect();
                let a = random_tuple(&sorts, &names, &mut rng);
                if sorts.iter().zip(&a).any(|(s, e)| !m.contains(s, e)) {
                    continue;
                }
                let f = formula_true_at(&m, &c.formulas[0].context, &a, 3, &mut rng);
                f.check(&c.theory.signature).unwrap();
                assert!(holds_at(&f, &m, &a).unwrap(), "{f} at {a:?} in {m}");
            }
        }
    }

    #[test]
    fn diagrams_are_models_with_name_faithful_colimits() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bounds = DiagramBounds { max_stages: 5, max_per_sort: 5, budget: 2000 };
        let mut forks = 0;
        for c in corpus() {
            for _ in 0..12 {
                let (shape, d) = random_diagram(&c.theory, bounds, &mut rng).unwrap().expect("a diagram");
                forks += (shape == Shape::Fork) as usize;
                for m in d.models() {
                    assert!(satisfies_theory(m, &c.theory).unwrap());
                    assert!(m.carriers().values().all(|c| c.len() <= 5));
                }
                let top = d.models().last().unwrap();
                let colim = directed_colimit(&d).unwrap();
                assert_eq!(*colim.structure, **top, "{}", c.name);
            }
        }
        assert!(forks > 0);
    }
}
