use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use super::{conj, fresh, taken_names, HomOpenBox, TopologyError};
use crate::chase::{chase, entails, EntailmentVerdict};
use crate::logic::{rename_context, Context, Formula, FormulaInContext, Sequent, Signature, Term, Theory};
use crate::model::{evaluate, find_homs, holds_at, seed_from_tuples, Structure};
use crate::names::{Elem, FreshNames, Sort, Var};

/// A basic open `⟨⌜x,y.ψ⌝, b⟩ = {⟨M,a⟩ : (a,b) ∈ ⟦x,y.φ∧ψ⟧^M}` of the
/// definable sheaf `⌜x.φ⌝`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SheafOpen {
    /// The sheaf `⌜x.φ⌝`.
    pub base: FormulaInContext,
    /// `⌜x,y.ψ⌝`, whose context starts with the base context.
    pub side: FormulaInContext,
    /// `b`, matched to the `y` part of the side context.
    pub tuple: Vec<Elem>,
}

impl SheafOpen {
    /// Builds an open, renaming the first `|x|` side variables to the base's
    /// names (their sorts must agree) and the rest away from them.
    pub fn new(base: FormulaInContext, side: FormulaInContext, tuple: Vec<Elem>) -> Result<Self, TopologyError> {
        let k = base.arity();
        if side.arity() != k + tuple.len() {
            return Err(TopologyError::Mismatch(format!(
                "side context of length {} for a base of length {k} and a tuple of length {}",
                side.arity(),
                tuple.len()
            )));
        }
        if side.context.0[..k].iter().map(|(_, s)| s).ne(base.context.iter().map(|(_, s)| s)) {
            return Err(TopologyError::Mismatch("side context does not extend the base context".into()));
        }
        let base_names: Vec<Var> = base.context.vars().cloned().collect();
        let side = if side.context.vars().take(k).eq(base_names.iter()) {
            side
        } else {
            let mut taken: BTreeSet<String> = base_names.iter().map(|v| v.to_string()).collect();
            taken.extend(side.context.vars().map(|v| v.to_string()));
            let mut ys = FreshNames::avoiding("y", &taken);
            let names: Vec<Var> =
                base_names.iter().cloned().chain((k..side.arity()).map(|_| Var::from(ys.next_name()))).collect();
            rename_context(&side, &names)
        };
        Ok(SheafOpen { base, side, tuple })
    }

    /// The image of the section `M ↦ ⟨M,a⟩` over `⟨⌜x.φ⌝, a⟩`, presented as
    /// `⟨⌜x,y. x=y⌝, a⟩`.
    pub fn section_image(base: FormulaInContext, a: Vec<Elem>, sig: &Signature) -> Result<Self, TopologyError> {
        let taken = taken_names(sig, [&base]);
        let mut ys = fresh("y", &taken);
        let ys: Vec<(Var, Sort)> = base.context.iter().map(|(_, s)| (Var::from(ys.next_name()), s.clone())).collect();
        let eqs = base
            .context
            .iter()
            .zip(&ys)
            .map(|((x, _), (y, _))| Formula::eq(Term::Var(x.clone()), Term::Var(y.clone())));
        let side = FormulaInContext::new(base.context.concat(&Context(ys.clone())), conj(eqs));
        SheafOpen::new(base, side, a)
    }

    /// The part `⌜x,y. φ∧ψ⌝` that membership evaluates.
    pub fn full_formula(&self) -> FormulaInContext {
        FormulaInContext::new(self.side.context.clone(), conj([self.base.body.clone(), self.side.body.clone()]))
    }

    pub fn contains(&self, m: &Structure, a: &[Elem]) -> Result<bool, TopologyError> {
        if a.len() != self.base.arity() {
            return Err(TopologyError::Mismatch("point tuple does not match the base context".into()));
        }
        let t: Vec<Elem> = a.iter().chain(&self.tuple).cloned().collect();
        Ok(holds_at(&self.full_formula(), m, &t)?)
    }

    /// All `a` with `⟨M,a⟩` in the open.
    pub fn points_in(&self, m: &Structure) -> Result<BTreeSet<Vec<Elem>>, TopologyError> {
        let k = self.base.arity();
        Ok(evaluate(&self.full_formula(), m)?
            .into_iter()
            .filter(|t| t[k..] == self.tuple[..])
            .map(|mut t| {
                t.truncate(k);
                t
            })
            .collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "base": self.base.to_string(), "formula": self.side.to_string(), "tuple": self.tuple })
    }
}

/// How far the functionality of a syntactic morphism was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "steps", rename_all = "snake_case")]
pub enum Certification {
    Proved,
    /// Some condition could not be settled within the budget.
    Unknown(usize),
}

/// An arrow `⌜x,y.σ⌝ : ⌜x.φ⌝ → ⌜y.ψ⌝` of the syntactic category, with its
/// three functionality conditions checked by the chase.
#[derive(Clone, Debug)]
pub struct SyntacticMorphism {
    pub domain: FormulaInContext,
    pub codomain: FormulaInContext,
    /// Over the context `x, y` (domain names, then codomain names).
    pub graph: FormulaInContext,
    pub certification: Certification,
}

impl SyntacticMorphism {
    /// Checks, with `budget` chase steps per condition, that `T` proves
    /// `σ ⊢ φ(x) ∧ ψ(y)`, `φ ⊢ ∃y. σ` and `σ(x,y) ∧ σ(x,y') ⊢ y = y'`.
    /// The domain and codomain are renamed to the graph's variables.
    pub fn new(
        t: &Theory,
        domain: &FormulaInContext,
        codomain: &FormulaInContext,
        graph: &FormulaInContext,
        budget: usize,
    ) -> Result<Self, TopologyError> {
        let (n, k) = (domain.arity(), codomain.arity());
        if graph.arity() != n + k
            || graph.context.sorts() != [domain.context.sorts(), codomain.context.sorts()].concat()
        {
            return Err(TopologyError::Mismatch(
                "graph context is not domain context followed by codomain context".into(),
            ));
        }
        graph.check(&t.signature)?;
        let xs: Vec<Var> = graph.context.vars().take(n).cloned().collect();
        let ys: Vec<Var> = graph.context.vars().skip(n).cloned().collect();
        let domain = rename_context(domain, &xs);
        let codomain = rename_context(codomain, &ys);
        let taken = taken_names(&t.signature, [&domain, &codomain, graph]);
        let mut primes = fresh("y", &taken);
        let ys2: Vec<(Var, Sort)> =
            codomain.context.iter().map(|(_, s)| (Var::from(primes.next_name()), s.clone())).collect();
        let graph2 =
            rename_context(graph, &xs.iter().cloned().chain(ys2.iter().map(|(v, _)| v.clone())).collect::<Vec<_>>());
        let typed =
            Sequent::new(graph.context.clone(), graph.body.clone(), conj([domain.body.clone(), codomain.body.clone()]));
        let total = Sequent::new(
            domain.context.clone(),
            domain.body.clone(),
            Formula::exists_all(&codomain.context.0, graph.body.clone()),
        );
        let single = Sequent::new(
            graph.context.concat(&Context(ys2.clone())),
            conj([graph.body.clone(), graph2.body]),
            conj(ys.iter().zip(&ys2).map(|(y, (y2, _))| Formula::eq(Term::Var(y.clone()), Term::Var(y2.clone())))),
        );
        let mut certification = Certification::Proved;
        for (label, s) in [("typing", typed), ("totality", total), ("single-valuedness", single)] {
            match entails(t, &s, budget)? {
                EntailmentVerdict::Proved => {}
                EntailmentVerdict::Disproved { witness, .. } => {
                    return Err(TopologyError::NotFunctional(format!("{label} fails at {witness:?}: {s}")));
                }
                EntailmentVerdict::Unknown { steps } => certification = Certification::Unknown(steps),
            }
        }
        Ok(SyntacticMorphism { domain, codomain, graph: graph.clone(), certification })
    }

    /// The `σ`-images of `a` in `m` (exactly one in a model of the theory).
    pub fn images(&self, m: &Structure, a: &[Elem]) -> Result<Vec<Vec<Elem>>, TopologyError> {
        let n = self.domain.arity();
        Ok(evaluate(&self.graph, m)?.into_iter().filter(|t| t[..n] == *a).map(|t| t[n..].to_vec()).collect())
    }
}

/// `f_σ⁻¹(⟨⌜y,z.ξ⌝, c⟩) = ⟨⌜x,z. ∃y. σ ∧ ξ⌝, c⟩`.
pub fn inverse_image_open(
    sigma: &SyntacticMorphism,
    o: &SheafOpen,
    sig: &Signature,
) -> Result<SheafOpen, TopologyError> {
    if !o.base.alpha_eq(&sigma.codomain) {
        return Err(TopologyError::Mismatch(format!("open lives over {} rather than {}", o.base, sigma.codomain)));
    }
    let n = sigma.domain.arity();
    let k = sigma.codomain.arity();
    let ys: Vec<(Var, Sort)> = sigma.graph.context.0[n..].to_vec();
    let taken = taken_names(sig, [&sigma.graph, &o.side]);
    let mut zs = fresh("z", &taken);
    let znames: Vec<Var> = (k..o.side.arity()).map(|_| Var::from(zs.next_name())).collect();
    let xi =
        rename_context(&o.side, &ys.iter().map(|(v, _)| v.clone()).chain(znames.iter().cloned()).collect::<Vec<_>>());
    let zctx: Vec<(Var, Sort)> = xi.context.0[k..].to_vec();
    let body = Formula::exists_all(&ys, conj([sigma.graph.body.clone(), xi.body]));
    let side = FormulaInContext::new(sigma.domain.context.concat(&Context(zctx)), body);
    SheafOpen::new(sigma.domain.clone(), side, o.tuple.clone())
}

/// Variable bookkeeping shared by the image formula and its converse check.
struct ImageParts {
    x: Vec<(Var, Sort)>,
    y1: Vec<(Var, Sort)>,
    y2: Vec<(Var, Sort)>,
    y3: Vec<(Var, Sort)>,
    y4: Vec<(Var, Sort)>,
    chi: Formula,
    psi: Formula,
    vartheta: Formula,
    xi: Formula,
    /// `b₁ * b₂ * b₄`, matched to `y₁, y₂, y₄`.
    bs: Vec<Elem>,
}

fn image_parts(bx: &HomOpenBox, o: &SheafOpen, sig: &Signature) -> Result<ImageParts, TopologyError> {
    let taken = taken_names(sig, [&o.base, &o.side, &bx.domain.formula, &bx.codomain.formula]);
    let mut names = fresh("u", &taken);
    let mut fresh_ctx = |sorts: Vec<Sort>| -> Vec<(Var, Sort)> {
        sorts.into_iter().map(|s| (Var::from(names.next_name()), s)).collect()
    };
    let x = o.base.context.0.clone();
    let k = x.len();
    let y1 = fresh_ctx(bx.domain.sorts());
    let y2 = fresh_ctx(bx.preservation.iter().map(|(s, _, _)| s.clone()).collect());
    let y3 = fresh_ctx(bx.codomain.sorts());
    let y4 = fresh_ctx(o.side.context.sorts()[k..].to_vec());
    let vars = |c: &[(Var, Sort)]| c.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>();
    let psi = rename_context(&bx.domain.formula, &vars(&y1)).body;
    let vartheta = rename_context(&bx.codomain.formula, &vars(&y3)).body;
    let xi = rename_context(&o.side, &[vars(&x), vars(&y4)].concat()).body;
    let bs: Vec<Elem> =
        bx.domain.tuple.iter().chain(bx.preservation.iter().map(|(_, b, _)| b)).chain(&o.tuple).cloned().collect();
    let ys: Vec<(Var, Sort)> = [y1.clone(), y2.clone(), y4.clone()].concat();
    let mut chi = Vec::new();
    for j in 0..bs.len() {
        if let Some(i) = (0..j).find(|&i| bs[i] == bs[j] && ys[i].1 == ys[j].1) {
            chi.push(Formula::eq(Term::Var(ys[i].0.clone()), Term::Var(ys[j].0.clone())));
        }
    }
    Ok(ImageParts { x, y1, y2, y3, y4, chi: conj(chi), psi, vartheta, xi, bs })
}

/// The open `V = ⟨⌜x,y₂,y₃. ∃y₁,y₄. χ∧ψ∧ϑ∧ξ⌝, c*b₃⟩` containing the action
/// image of `U = (⟨ψ,b₁⟩, y₂: b₂ ↦ c, ⟨ϑ,b₃⟩) ×_M ⟨⌜x,y₄.ξ⌝, b₄⟩`, where `χ`
/// equates the variables of `y₁,y₂,y₄` whose elements coincide at one sort.
pub fn action_image_open(bx: &HomOpenBox, o: &SheafOpen, sig: &Signature) -> Result<SheafOpen, TopologyError> {
    let p = image_parts(bx, o, sig)?;
    let body = Formula::exists_all(&[p.y1.clone(), p.y4.clone()].concat(), conj([p.chi, p.psi, p.vartheta, p.xi]));
    let ctx = Context([p.x, p.y2, p.y3].concat());
    let tuple = bx.preservation.iter().map(|(_, _, c)| c.clone()).chain(bx.codomain.tuple.iter().cloned()).collect();
    SheafOpen::new(o.base.clone(), FormulaInContext::new(ctx, body), tuple)
}

/// Outcome of the converse inclusion `V ⊆ θ(U)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Converse {
    /// Every corpus point of `V` was reached from the universal member of `U`.
    Verified { points: usize },
    /// A corpus point of `V` that is not in the image.
    Failed { model: usize, point: Vec<Elem> },
    /// The universal model needed for the argument was not built in budget.
    Conditional { steps: usize },
    /// `U` is empty (the theory identifies elements that the box keeps
    /// apart), so the converse is not claimed.
    NotApplicable { reason: String },
}

/// Both inclusions between `θ(U)` and `V`, decided over a corpus of models.
#[derive(Clone, Debug)]
pub struct ActionImageCheck {
    pub image: SheafOpen,
    /// Number of `(f, ⟨M,a⟩) ∈ U` found among corpus homomorphisms.
    pub forward_instances: usize,
    /// A member of `U` (source index, target index, point) whose image
    /// escapes `V`, if any.
    pub forward_failure: Option<(usize, usize, Vec<Elem>)>,
    pub converse: Converse,
}

impl ActionImageCheck {
    pub fn forward_holds(&self) -> bool {
        self.forward_failure.is_none()
    }
}

/// Computes `V` and checks `θ(U) ⊆ V` on every corpus homomorphism; then
/// checks `V ⊆ θ(U)` on every corpus point by mapping the universal model
/// of `⌜x,y₁,y₂,y₄. φ∧χ∧ψ∧ξ⌝`, named so that its generic `y` part is
/// `b₁*b₂*b₄`, onto the point.
pub fn check_action_image(
    t: &Theory,
    bx: &HomOpenBox,
    o: &SheafOpen,
    corpus: &[Arc<Structure>],
    budget: usize,
) -> Result<ActionImageCheck, TopologyError> {
    let sig = &t.signature;
    let image = action_image_open(bx, o, sig)?;
    let sorts_x = o.base.context.sorts();

    let mut forward_instances = 0;
    let mut forward_failure = None;
    let seed: Vec<(Sort, Elem, Elem)> = bx.preservation.clone();
    'outer: for (i, m) in corpus.iter().enumerate() {
        if !bx.domain.contains(m)? {
            continue;
        }
        let points = o.points_in(m)?;
        if points.is_empty() {
            continue;
        }
        for (j, n) in corpus.iter().enumerate() {
            if !bx.codomain.contains(n)? {
                continue;
            }
            for h in find_homs(m, n, &seed) {
                for a in &points {
                    forward_instances += 1;
                    let fa = h.apply_tuple(&sorts_x, a).expect("point lies in the source");
                    if !image.contains(n, &fa)? {
                        forward_failure = Some((i, j, a.clone()));
                        break 'outer;
                    }
                }
            }
        }
    }

    let converse = converse(t, bx, o, &image, corpus, budget)?;
    Ok(ActionImageCheck { image, forward_instances, forward_failure, converse })
}

fn converse(
    t: &Theory,
    bx: &HomOpenBox,
    o: &SheafOpen,
    image: &SheafOpen,
    corpus: &[Arc<Structure>],
    budget: usize,
) -> Result<Converse, TopologyError> {
    let sig = &t.signature;
    let p = image_parts(bx, o, sig)?;
    let k = p.x.len();
    let ys: Vec<(Var, Sort)> = [p.y1.clone(), p.y2.clone(), p.y4.clone()].concat();
    let ctx = Context([p.x.clone(), ys.clone()].concat());
    let phi = o.base.body.clone();
    let f = FormulaInContext::new(ctx, conj([phi, p.chi, p.psi, p.xi]));
    let r = chase(&f, t, budget)?;
    if !r.terminated() {
        return Ok(Converse::Conditional { steps: r.trace.len() });
    }
    let model = r.original_model()?;
    let generic = &r.generic;
    let gy = &generic[k..];
    // A coincidence among the generic y's that the b's do not share means
    // no model carries U's data with these distinct names.
    for i in 0..ys.len() {
        for j in (i + 1)..ys.len() {
            if ys[i].1 == ys[j].1 && gy[i] == gy[j] && p.bs[i] != p.bs[j] {
                return Ok(Converse::NotApplicable { reason: format!("the theory forces {} = {}", p.bs[i], p.bs[j]) });
            }
        }
    }
    // Rename: generic y's become the b's, everything else gets a fresh name.
    let mut rename: BTreeMap<(Sort, Elem), Elem> = BTreeMap::new();
    for ((_, s), (g, b)) in ys.iter().zip(gy.iter().zip(&p.bs)) {
        rename.insert((s.clone(), g.clone()), b.clone());
    }
    let mut names = FreshNames::avoiding("n", p.bs.iter().map(|b| b.to_string()));
    for (s, e) in model.elements() {
        rename.entry((s.clone(), e.clone())).or_insert_with(|| Elem::from(names.next_name()));
    }
    let m = Arc::new(rename_structure(&model, &rename)?);
    let sorts_x: Vec<Sort> = p.x.iter().map(|(_, s)| s.clone()).collect();
    let a: Vec<Elem> =
        generic[..k].iter().zip(&sorts_x).map(|(g, s)| rename[&(s.clone(), g.clone())].clone()).collect();
    debug_assert!(bx.domain.contains(&m)?);
    debug_assert!(o.contains(&m, &a)?);

    let y2_sorts: Vec<Sort> = p.y2.iter().map(|(_, s)| s.clone()).collect();
    let b2: Vec<Elem> = bx.preservation.iter().map(|(_, b, _)| b.clone()).collect();
    let c: Vec<Elem> = bx.preservation.iter().map(|(_, _, c)| c.clone()).collect();
    let mut points = 0;
    for (j, n) in corpus.iter().enumerate() {
        for target in image.points_in(n)? {
            points += 1;
            let mut seed = seed_from_tuples(&sorts_x, &a, &target);
            seed.extend(seed_from_tuples(&y2_sorts, &b2, &c));
            if find_homs(&m, n, &seed).next().is_none() {
                return Ok(Converse::Failed { model: j, point: target });
            }
        }
    }
    Ok(Converse::Verified { points })
}

/// A copy of `m` with elements renamed (injectively per sort).
fn rename_structure(m: &Structure, rename: &BTreeMap<(Sort, Elem), Elem>) -> Result<Structure, TopologyError> {
    let sig = m.signature();
    let mut out = Structure::empty(sig.clone());
    let r = |s: &Sort, e: &Elem| rename[&(s.clone(), e.clone())].clone();
    for (s, e) in m.elements() {
        out.add_element(s, r(s, e))?;
    }
    for (rel, arity) in sig.relations() {
        for t in m.relation(rel) {
            out.add_fact(rel, arity.iter().zip(t).map(|(s, e)| r(s, e)).collect())?;
        }
    }
    for (f, ty) in sig.functions() {
        for (args, v) in m.function(f) {
            out.set_function(f, ty.args.iter().zip(args).map(|(s, e)| r(s, e)).collect(), r(&ty.result, v))?;
        }
    }
    Ok(out)
}

/// Homomorphisms between corpus models, as `(source, target, hom)`.
#[cfg(test)]
fn corpus_homs(corpus: &[Arc<Structure>]) -> Vec<(usize, usize, crate::model::Homomorphism)> {
    let mut out = Vec::new();
    for (i, m) in corpus.iter().enumerate() {
        for (j, n) in corpus.iter().enumerate() {
            out.extend(find_homs(m, n, &[]).map(|h| (i, j, h)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::DEFAULT_BUDGET;
    use crate::logic::{parse_formula, parse_theory};
    use crate::model::enumerate_models;
    use crate::topology::PresentedOpen;

    fn e(n: &str) -> Elem {
        Elem::new(n)
    }

    fn corpus(t: &Theory, bound: usize) -> Vec<Arc<Structure>> {
        enumerate_models(t, bound).map(Arc::new).collect()
    }

    /// Brute-force preimage: `⟨M,a⟩ ∈ f_σ⁻¹(O)` iff `⟨M, σ(a)⟩ ∈ O`.
    fn assert_preimage(t: &Theory, sigma: &SyntacticMorphism, o: &SheafOpen, bound: usize) -> usize {
        let pre = inverse_image_open(sigma, o, &t.signature).unwrap();
        let mut points = 0;
        for m in corpus(t, bound) {
            for a in evaluate(&sigma.domain, &m).unwrap() {
                let images = sigma.images(&m, &a).unwrap();
                assert_eq!(images.len(), 1, "σ is functional on models");
                let expected = o.contains(&m, &images[0]).unwrap();
                assert_eq!(pre.contains(&m, &a).unwrap(), expected, "{m} at {a:?}");
                points += 1;
            }
        }
        points
    }

    #[test]
    fn inverse_image_along_a_projection() {
        let t = parse_theory("sort A; rel R(A,A);").unwrap();
        let sig = &t.signature;
        let dom = parse_formula(sig, "[x1:A, x2:A] true").unwrap();
        let cod = parse_formula(sig, "[y:A] true").unwrap();
        let graph = parse_formula(sig, "[x1:A, x2:A, y:A] y = x1").unwrap();
        let sigma = SyntacticMorphism::new(&t, &dom, &cod, &graph, DEFAULT_BUDGET).unwrap();
        assert_eq!(sigma.certification, Certification::Proved);
        let o = SheafOpen::new(cod.clone(), parse_formula(sig, "[y:A, z:A] R(y, z)").unwrap(), vec![e("e1")]).unwrap();
        let pre = inverse_image_open(&sigma, &o, sig).unwrap();
        let expected = parse_formula(sig, "[x1:A, x2:A, z:A] exists y:A. y = x1 & R(y, z)").unwrap();
        assert!(pre.side.alpha_eq(&expected), "{}", pre.side);
        assert!(assert_preimage(&t, &sigma, &o, 3) > 50);
    }

    #[test]
    fn inverse_image_along_the_identity_and_of_the_whole_sheaf() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);").unwrap();
        let sig = &t.signature;
        let phi = parse_formula(sig, "[x:A] exists y:A. R(x,y)").unwrap();
        let graph = parse_formula(sig, "[x:A, y:A] x = y & exists w:A. R(x,w)").unwrap();
        let sigma = SyntacticMorphism::new(&t, &phi, &phi, &graph, DEFAULT_BUDGET).unwrap();
        let o = SheafOpen::new(phi.clone(), parse_formula(sig, "[x:A, z:A] R(z, x)").unwrap(), vec![e("e0")]).unwrap();
        assert_preimage(&t, &sigma, &o, 3);
        let everything = SheafOpen::new(phi.clone(), parse_formula(sig, "[x:A] true").unwrap(), vec![]).unwrap();
        let pre = inverse_image_open(&sigma, &everything, sig).unwrap();
        for m in corpus(&t, 3) {
            for a in evaluate(&phi, &m).unwrap() {
                assert!(pre.contains(&m, &a).unwrap());
            }
        }
    }

    #[test]
    fn non_functional_graphs_are_rejected() {
        let t = parse_theory("sort A; rel R(A,A);").unwrap();
        let sig = &t.signature;
        let top = parse_formula(sig, "[x:A] true").unwrap();
        let graph = parse_formula(sig, "[x:A, y:A] R(x, y)").unwrap();
        assert!(matches!(
            SyntacticMorphism::new(&t, &top, &top, &graph, DEFAULT_BUDGET),
            Err(TopologyError::NotFunctional(_))
        ));
    }

    #[test]
    fn chi_records_shared_elements() {
        let t = parse_theory("sort A; rel R(A,A);").unwrap();
        let sig = &t.signature;
        let base = parse_formula(sig, "[x:A] true").unwrap();
        let bx = HomOpenBox::new(
            PresentedOpen::new(parse_formula(sig, "[u:A] exists v:A. R(u, v)").unwrap(), vec![e("b")]).unwrap(),
            vec![(Sort::new("A"), e("b"), e("c"))],
            PresentedOpen::everything(),
        );
        let o = SheafOpen::new(base.clone(), parse_formula(sig, "[x:A] true").unwrap(), vec![]).unwrap();
        let v = action_image_open(&bx, &o, sig).unwrap();
        let expected = parse_formula(sig, "[x:A, p:A] exists q:A. q = p & exists v:A. R(q, v)").unwrap();
        assert!(v.side.alpha_eq(&expected), "{}", v.side);
        assert_eq!(v.tuple, vec![e("c")]);
    }

    #[test]
    fn trivial_box_gives_an_existential_closure() {
        let t = parse_theory("sort A; rel R(A,A);").unwrap();
        let sig = &t.signature;
        let base = parse_formula(sig, "[x:A] exists y:A. R(x, y)").unwrap();
        let o = SheafOpen::new(base, parse_formula(sig, "[x:A, y:A] true").unwrap(), vec![e("b")]).unwrap();
        let bx = HomOpenBox::preserving(vec![]);
        let check = check_action_image(&t, &bx, &o, &corpus(&t, 2), DEFAULT_BUDGET).unwrap();
        assert!(check.image.side.alpha_eq(&parse_formula(sig, "[x:A] exists y:A. true").unwrap()));
        assert!(check.forward_holds());
        assert!(matches!(check.converse, Converse::Verified { .. }));
    }

    /// `θ(U)` computed by brute force over every homomorphism among corpus
    /// models must equal `V` on every corpus point.
    #[test]
    fn action_image_equals_brute_force_image_for_transitivity() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);").unwrap();
        let sig = &t.signature;
        let base = parse_formula(sig, "[x:A, y:A] R(x, y)").unwrap();
        let o = SheafOpen::new(base.clone(), parse_formula(sig, "[x:A, y:A] true").unwrap(), vec![]).unwrap();
        let bx = HomOpenBox::new(
            PresentedOpen::everything(),
            vec![(Sort::new("A"), e("e0"), e("e1"))],
            PresentedOpen::new(parse_formula(sig, "[w:A] R(w, w)").unwrap(), vec![e("e1")]).unwrap(),
        );
        let models = corpus(&t, 3);
        let check = check_action_image(&t, &bx, &o, &models, DEFAULT_BUDGET).unwrap();
        assert!(check.forward_holds());
        assert!(check.forward_instances > 0);
        assert!(matches!(check.converse, Converse::Verified { .. }), "{:?}", check.converse);
        let mut image: BTreeSet<(usize, Vec<Elem>)> = BTreeSet::new();
        for (i, j, h) in corpus_homs(&models) {
            if !bx.contains(&h).unwrap() {
                continue;
            }
            for a in o.points_in(&models[i]).unwrap() {
                image.insert((j, h.apply_tuple(&base.context.sorts(), &a).unwrap()));
            }
        }
        let mut v: BTreeSet<(usize, Vec<Elem>)> = BTreeSet::new();
        for (j, n) in models.iter().enumerate() {
            for p in check.image.points_in(n).unwrap() {
                v.insert((j, p));
            }
        }
        assert!(!v.is_empty());
        assert_eq!(image, v);
    }

    #[test]
    fn an_empty_u_is_not_claimed() {
        let t = parse_theory("sort A; rel P(A); axiom [x:A,y:A] P(x) & P(y) |- x = y;").unwrap();
        let sig = &t.signature;
        let base = parse_formula(sig, "[x:A] P(x)").unwrap();
        let o = SheafOpen::new(base, parse_formula(sig, "[x:A, y:A] P(y)").unwrap(), vec![e("b")]).unwrap();
        let bx = HomOpenBox::new(
            PresentedOpen::new(parse_formula(sig, "[u:A] P(u)").unwrap(), vec![e("a")]).unwrap(),
            vec![],
            PresentedOpen::everything(),
        );
        let check = check_action_image(&t, &bx, &o, &corpus(&t, 2), DEFAULT_BUDGET).unwrap();
        assert!(check.forward_holds());
        assert_eq!(check.forward_instances, 0);
        assert!(matches!(check.converse, Converse::NotApplicable { .. }));
    }

    #[test]
    fn a_non_terminating_converse_is_conditional() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A] R(x,y) |- exists z:A. R(y,z);").unwrap();
        let sig = &t.signature;
        let base = parse_formula(sig, "[x:A, y:A] R(x, y)").unwrap();
        let o = SheafOpen::new(base, parse_formula(sig, "[x:A, y:A] true").unwrap(), vec![]).unwrap();
        let check = check_action_image(&t, &HomOpenBox::preserving(vec![]), &o, &corpus(&t, 2), 50).unwrap();
        assert!(check.forward_holds());
        assert_eq!(check.converse, Converse::Conditional { steps: 50 });
    }
}
