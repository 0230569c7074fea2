//! The property suites run by `rwb verify`.
//!
//! Instances are generated sequentially from a per-suite random stream and
//! checked in parallel; results come back in generation order and are then
//! sorted by instance id, so a report depends only on the seed and bounds.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::corpus::{builtin, CorpusTheory};
use super::generate::{formula_true_at, random_diagram, random_formula, random_tuple, DiagramBounds, Shape};
use super::{HarnessError, InstanceReport, Outcome, PropertyResult, SuiteReport};
use crate::chase::{chase, entails, ChaseResult, EntailmentVerdict, DEFAULT_BUDGET};
use crate::logic::{Context, Formula, FormulaInContext, Sequent, Term};
use crate::model::{
    check_colimit_preservation, definable_action, directed_colimit, evaluate, factor_hom, find_homs, holds_at,
    satisfies_theory, seed_from_tuples, DirectedDiagram, Homomorphism, ModelError, Structure,
};
use crate::names::{Elem, FreshNames, Sort, Var};
use crate::stone::{all_filters, all_semilattices, check_equivalence};
use crate::topology::{
    check_action_image, check_wellbehaved, hom_net_tail, inverse_image_open, tail_index, wellbehaved_section,
    Certification, Converse, HomOpenBox, PresentedOpen, SheafOpen, SyntacticMorphism,
};

/// Suite ids, in the order `all` runs them.
pub const SUITES: [&str; 10] = [
    "stone",
    "universal",
    "genericity",
    "colimit",
    "continuity",
    "action",
    "sections",
    "convergence",
    "support",
    "factorization",
];

/// Size bounds and counts for instance generation. The defaults are the
/// sizes the acceptance tests use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest meet-semilattice for the `stone` suite.
    pub max_size: usize,
    /// Most stages in a generated diagram.
    pub stages: usize,
    /// Most elements per sort in a diagram stage.
    pub model_size: usize,
    /// Elements per sort for the corpus of the `universal` and `genericity`
    /// suites.
    pub corpus_bound: usize,
    /// Elements per sort for the suites that range over homomorphisms.
    pub hom_bound: usize,
    pub diagrams: usize,
    /// Sampled right-hand sides for `genericity`.
    pub samples: usize,
    pub budget: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            max_size: 5,
            stages: 5,
            model_size: 5,
            corpus_bound: 4,
            hom_bound: 3,
            diagrams: 200,
            samples: 100,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Theories with lazily built model corpora.
pub struct Workbench {
    pub config: VerifyConfig,
    theories: Vec<TheoryData>,
}

struct TheoryData {
    corpus: CorpusTheory,
    large: OnceLock<Vec<Arc<Structure>>>,
    small: OnceLock<Vec<Arc<Structure>>>,
}

impl TheoryData {
    fn new(corpus: CorpusTheory) -> Self {
        TheoryData { corpus, large: OnceLock::new(), small: OnceLock::new() }
    }
}

fn salt(name: &str) -> u64 {
    // FNV-1a, so stream seeds do not depend on the standard hasher.
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

fn point_json(p: &[Elem]) -> Value {
    json!(p)
}

impl Workbench {
    pub fn new(config: VerifyConfig, theories: Vec<CorpusTheory>) -> Self {
        Workbench { config, theories: theories.into_iter().map(TheoryData::new).collect() }
    }

    pub fn theories(&self) -> impl Iterator<Item = &CorpusTheory> + '_ {
        self.theories.iter().map(|t| &t.corpus)
    }

    fn large(&self, i: usize) -> &[Arc<Structure>] {
        let t = &self.theories[i];
        t.large.get_or_init(|| t.corpus.models(self.config.corpus_bound))
    }

    fn small(&self, i: usize) -> &[Arc<Structure>] {
        let t = &self.theories[i];
        t.small.get_or_init(|| t.corpus.models(self.config.hom_bound))
    }

    fn rng(&self, stream: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed ^ salt(stream))
    }

    /// Runs the named suites in parallel; `all` expands to every suite.
    pub fn run(&self, selector: &str) -> Result<Vec<SuiteReport>, HarnessError> {
        let ids: Vec<&str> = if selector == "all" {
            SUITES.to_vec()
        } else {
            let ids: Vec<&str> = selector.split(',').map(str::trim).collect();
            for id in &ids {
                if !SUITES.contains(id) {
                    return Err(HarnessError::Input(format!(
                        "unknown suite `{id}` (known: all, {})",
                        SUITES.join(", ")
                    )));
                }
            }
            ids
        };
        ids.par_iter().map(|id| self.run_suite(id)).collect()
    }

    pub fn run_suite(&self, id: &str) -> Result<SuiteReport, HarnessError> {
        let start = Instant::now();
        let mut report = match id {
            "stone" => self.stone()?,
            "universal" => self.universal()?,
            "genericity" => self.genericity()?,
            "colimit" => self.colimit()?,
            "continuity" => self.continuity()?,
            "action" => self.action()?,
            "sections" => self.sections()?,
            "convergence" => self.convergence()?,
            "support" => self.support()?,
            "factorization" => self.factorization()?,
            _ => return Err(HarnessError::Input(format!("unknown suite `{id}`"))),
        };
        report.elapsed = start.elapsed();
        Ok(report)
    }

    fn stone(&self) -> Result<SuiteReport, HarnessError> {
        let lattices = all_semilattices(self.config.max_size);
        let instances = lattices
            .par_iter()
            .enumerate()
            .map(|(k, s)| -> Result<InstanceReport, HarnessError> {
                let r = check_equivalence(s)?;
                let mut inst = InstanceReport::new(format!("n{}/{k}", s.len()), json!({ "semilattice": s.to_json() }));
                inst.push(PropertyResult::check("dj-preserving-equals-continuous", r.equal, r.dj_preserving, || {
                    json!(r)
                }));
                let filters = all_filters(s);
                let principal =
                    filters.len() == s.len() && (0..s.len()).all(|a| filters.iter().any(|f| f.0 == s.up(a)));
                inst.push(PropertyResult::check("filters-are-principal", principal, filters.len(), || json!(filters)));
                Ok(inst)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("stone", instances, vec![]))
    }

    fn chase_jobs(&self) -> Vec<(usize, usize)> {
        (0..self.theories.len())
            .flat_map(|t| (0..self.theories[t].corpus.formulas.len()).map(move |f| (t, f)))
            .collect()
    }

    fn universal(&self) -> Result<SuiteReport, HarnessError> {
        let instances = self
            .chase_jobs()
            .par_iter()
            .map(|&(ti, fi)| self.universal_instance(ti, fi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("universal", instances, vec![]))
    }

    fn universal_instance(&self, ti: usize, fi: usize) -> Result<InstanceReport, HarnessError> {
        let c = &self.theories[ti].corpus;
        let phi = &c.formulas[fi];
        let mut inst =
            InstanceReport::new(format!("{}/{fi}", c.name), json!({"theory": c.name, "formula": phi.to_string()}));
        let r = chase(phi, &c.theory, self.config.budget)?;
        if !r.terminated() {
            inst.push(PropertyResult::new("terminated", Outcome::BudgetExhausted, r.trace.len()));
            return Ok(inst);
        }
        inst.push(PropertyResult::new("terminated", Outcome::Pass, r.trace.len()));
        let u = r.original_model()?;
        let model_ok = satisfies_theory(&u, &c.theory)?;
        inst.push(PropertyResult::check("model-of-theory", model_ok, 1, || u.to_json()));
        let gen_ok = holds_at(phi, &u, &r.generic)?;
        inst.push(PropertyResult::check("generic-satisfies-formula", gen_ok, 1, || point_json(&r.generic)));
        let sorts = phi.context.sorts();
        let mut checks = 0;
        let mut failure = None;
        'models: for (j, n) in self.large(ti).iter().enumerate() {
            for b in evaluate(phi, n)? {
                checks += 1;
                if find_homs(&u, n, &seed_from_tuples(&sorts, &r.generic, &b)).next().is_none() {
                    failure = Some(json!({"model": j, "structure": n.to_json(), "point": b}));
                    break 'models;
                }
            }
        }
        inst.push(PropertyResult::check("maps-into-every-model", failure.is_none(), checks, || failure.unwrap()));
        Ok(inst)
    }

    fn genericity(&self) -> Result<SuiteReport, HarnessError> {
        let mut rng = self.rng("genericity");
        let nt = self.theories.len().max(1);
        let per_theory = self.config.samples.div_ceil(nt);
        let mut chased: BTreeMap<(usize, usize), Arc<(ChaseResult, Arc<Structure>)>> = BTreeMap::new();
        let mut jobs = Vec::new();
        for ti in 0..self.theories.len() {
            let c = &self.theories[ti].corpus;
            for k in 0..per_theory {
                let fi = k % c.formulas.len();
                let phi = &c.formulas[fi];
                let entry = match chased.get(&(ti, fi)) {
                    Some(e) => e.clone(),
                    None => {
                        let r = chase(phi, &c.theory, self.config.budget)?;
                        let u = r.original_model()?;
                        let e = Arc::new((r, u));
                        chased.insert((ti, fi), e.clone());
                        e
                    }
                };
                let psi = if entry.0.terminated() && rng.random_bool(0.5) {
                    let f =
                        formula_true_at(&entry.1, &phi.context, &entry.0.generic, rng.random_range(1..=3), &mut rng);
                    if rng.random_bool(0.3) {
                        let extra = random_formula(&c.theory.signature, &phi.context, 1, &mut rng);
                        conjoin(&f, &extra)
                    } else {
                        f
                    }
                } else {
                    random_formula(&c.theory.signature, &phi.context, 3, &mut rng)
                };
                jobs.push((ti, fi, k, psi, entry));
            }
        }
        let instances = jobs
            .par_iter()
            .map(|(ti, fi, k, psi, entry)| self.genericity_instance(*ti, *fi, *k, psi, &entry.0, &entry.1))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("genericity", instances, vec![]))
    }

    fn genericity_instance(
        &self,
        ti: usize,
        fi: usize,
        k: usize,
        psi: &FormulaInContext,
        r: &ChaseResult,
        u: &Arc<Structure>,
    ) -> Result<InstanceReport, HarnessError> {
        let c = &self.theories[ti].corpus;
        let phi = &c.formulas[fi];
        let sequent = Sequent::new(phi.context.clone(), phi.body.clone(), psi.body.clone());
        let verdict = entails(&c.theory, &sequent, self.config.budget)?;
        let mut inst = InstanceReport::new(
            format!("{}/{k}", c.name),
            json!({"theory": c.name, "sequent": sequent.to_string(), "verdict": verdict.label()}),
        );
        if !r.terminated() {
            inst.push(PropertyResult::new("generic-iff-proved", Outcome::BudgetExhausted, 1));
        } else if matches!(verdict, EntailmentVerdict::Unknown { .. }) {
            inst.push(PropertyResult::new("generic-iff-proved", Outcome::Unknown, 1));
        } else {
            let generic = holds_at(psi, u, &r.generic)?;
            inst.push(PropertyResult::check(
                "generic-iff-proved",
                generic == verdict.is_proved(),
                1,
                || json!({"generic_satisfies": generic, "verdict": verdict.to_json()}),
            ));
        }
        match &verdict {
            EntailmentVerdict::Proved => {
                let mut checks = 0;
                let mut failure = None;
                'models: for (j, n) in self.large(ti).iter().enumerate() {
                    for b in evaluate(phi, n)? {
                        checks += 1;
                        if !holds_at(psi, n, &b)? {
                            failure = Some(json!({"model": j, "structure": n.to_json(), "point": b}));
                            break 'models;
                        }
                    }
                }
                inst.push(PropertyResult::check("proved-holds-on-corpus", failure.is_none(), checks, || {
                    failure.unwrap()
                }));
                inst.push(PropertyResult::new("countermodel-refutes", Outcome::NotApplicable, 0));
            }
            EntailmentVerdict::Disproved { countermodel, witness } => {
                inst.push(PropertyResult::new("proved-holds-on-corpus", Outcome::NotApplicable, 0));
                let ok = satisfies_theory(countermodel, &c.theory)?
                    && holds_at(phi, countermodel, witness)?
                    && !holds_at(psi, countermodel, witness)?;
                inst.push(PropertyResult::check("countermodel-refutes", ok, 1, || verdict.to_json()));
            }
            EntailmentVerdict::Unknown { steps } => {
                inst.push(PropertyResult::new("proved-holds-on-corpus", Outcome::Unknown, *steps));
                inst.push(PropertyResult::new("countermodel-refutes", Outcome::Unknown, *steps));
            }
        }
        Ok(inst)
    }

    /// The formulas checked on diagrams of theory `ti`: the corpus formulas
    /// and two random ones.
    fn diagram_formulas(&self, ti: usize) -> Vec<FormulaInContext> {
        let c = &self.theories[ti].corpus;
        let mut rng = self.rng(&format!("diagram-formulas/{}", c.name));
        let mut out = c.formulas.clone();
        for k in 0..2 {
            let ctx = c.formulas[k % c.formulas.len()].context.clone();
            out.push(random_formula(&c.theory.signature, &ctx, 3, &mut rng));
        }
        out
    }

    /// The seeded diagrams shared by the `colimit` and `convergence` suites.
    pub fn diagrams(&self) -> Result<Vec<GeneratedDiagram>, HarnessError> {
        let nt = self.theories.len().max(1);
        let per_theory = self.config.diagrams.div_ceil(nt);
        let bounds = DiagramBounds {
            max_stages: self.config.stages,
            max_per_sort: self.config.model_size,
            budget: self.config.budget.min(2_000),
        };
        let mut rng = self.rng("diagrams");
        let mut out = Vec::new();
        for ti in 0..self.theories.len() {
            let c = &self.theories[ti].corpus;
            for k in 0..per_theory {
                if let Some((shape, diagram)) = random_diagram(&c.theory, bounds, &mut rng)? {
                    out.push(GeneratedDiagram { id: format!("{}/{k}", c.name), theory: ti, shape, diagram });
                }
            }
        }
        Ok(out)
    }

    fn colimit(&self) -> Result<SuiteReport, HarnessError> {
        let diagrams = self.diagrams()?;
        let formulas: Vec<Vec<FormulaInContext>> = (0..self.theories.len()).map(|t| self.diagram_formulas(t)).collect();
        let instances = diagrams
            .par_iter()
            .map(|g| -> Result<InstanceReport, HarnessError> {
                let mut inst = InstanceReport::new(g.id.clone(), g.descriptor(&self.theories[g.theory].corpus.name));
                for (k, f) in formulas[g.theory].iter().enumerate() {
                    let r = check_colimit_preservation(f, &g.diagram)?;
                    let checks = r.extension_of_colimit;
                    inst.push(PropertyResult::check(&format!("bijection/{k}"), r.is_bijection(), checks, || json!(r)));
                }
                Ok(inst)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("colimit", instances, vec![]))
    }

    fn convergence(&self) -> Result<SuiteReport, HarnessError> {
        let diagrams = self.diagrams()?;
        let formulas: Vec<Vec<FormulaInContext>> = (0..self.theories.len()).map(|t| self.diagram_formulas(t)).collect();
        let instances = diagrams
            .par_iter()
            .map(|g| convergence_instance(g, &formulas[g.theory], &self.theories[g.theory].corpus.name))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("convergence", instances, vec![]))
    }

    /// Morphisms out of each formula: the identity, every projection and a
    /// swap of the first two variables, all given by graphs `φ(x) ∧ y = x_sel`,
    /// plus the graphs of binary relations and unary functions that the
    /// theory proves functional.
    fn morphisms(&self, ti: usize) -> Result<Vec<SyntacticMorphism>, HarnessError> {
        let c = &self.theories[ti].corpus;
        let sig = &c.theory.signature;
        let mut out = Vec::new();
        for phi in &c.formulas {
            let n = phi.arity();
            let sorts = phi.context.sorts();
            let mut sels: Vec<Vec<usize>> = vec![(0..n).collect()];
            sels.extend((0..n).map(|i| vec![i]));
            if n >= 2 && sorts[0] == sorts[1] {
                sels.push([vec![1, 0], (2..n).collect()].concat());
            }
            for sel in sels {
                let (dom, cod, graph) = selection_morphism(sig, phi, &sel);
                let m = SyntacticMorphism::new(&c.theory, &dom, &cod, &graph, self.config.budget)?;
                out.push(m);
            }
        }
        let taken: BTreeSet<String> =
            sig.relations().map(|(r, _)| r.to_string()).chain(sig.functions().map(|(f, _)| f.to_string())).collect();
        let mut names = FreshNames::avoiding("x", &taken);
        let (x, y) = (Var::from(names.next_name()), Var::from(names.next_name()));
        let tx = || Term::Var(x.clone());
        let ty = || Term::Var(y.clone());
        let mut candidates = Vec::new();
        for (r, arity) in sig.relations() {
            if let [a, b] = arity.as_slice() {
                let atom = Formula::Rel(r.clone(), vec![tx(), ty()]);
                candidates.push((a.clone(), b.clone(), atom));
            }
        }
        for (f, fty) in sig.functions() {
            if let [a] = fty.args.as_slice() {
                let atom = Formula::eq(Term::App(f.clone(), vec![tx()]), ty());
                candidates.push((a.clone(), fty.result.clone(), atom));
            }
        }
        for (a, b, atom) in candidates {
            let dom = FormulaInContext::new(
                Context(vec![(x.clone(), a.clone())]),
                Formula::exists(y.clone(), b.clone(), atom.clone()),
            );
            let cod = FormulaInContext::new(
                Context(vec![(y.clone(), b.clone())]),
                Formula::exists(x.clone(), a.clone(), atom.clone()),
            );
            let graph = FormulaInContext::new(Context(vec![(x.clone(), a.clone()), (y.clone(), b.clone())]), atom);
            match SyntacticMorphism::new(&c.theory, &dom, &cod, &graph, self.config.budget) {
                Ok(m) => out.push(m),
                Err(crate::topology::TopologyError::NotFunctional(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(out)
    }

    fn continuity(&self) -> Result<SuiteReport, HarnessError> {
        let mut rng = self.rng("continuity");
        let names: Vec<Elem> = (0..self.config.hom_bound.max(1)).map(|i| Elem::new(format!("e{i}"))).collect();
        let mut jobs = Vec::new();
        for ti in 0..self.theories.len() {
            let sig = &self.theories[ti].corpus.theory.signature;
            let sorts: Vec<Sort> = sig.sorts().cloned().collect();
            for (mi, sigma) in self.morphisms(ti)?.into_iter().enumerate() {
                for k in 0..2 {
                    let mut ctx = sigma.codomain.context.clone();
                    let extra = rng.random_range(0..=1);
                    let taken: BTreeSet<String> = ctx.vars().map(|v| v.to_string()).collect();
                    let mut zs = FreshNames::avoiding("z", &taken);
                    let mut zsorts = Vec::new();
                    for _ in 0..extra {
                        let s = sorts.choose(&mut rng).expect("a sort").clone();
                        ctx.0.push((Var::from(zs.next_name()), s.clone()));
                        zsorts.push(s);
                    }
                    let xi = random_formula(sig, &ctx, 2, &mut rng);
                    let c = random_tuple(&zsorts, &names, &mut rng);
                    let o = SheafOpen::new(sigma.codomain.clone(), xi, c)?;
                    jobs.push((format!("{}/{mi}/{k}", self.theories[ti].corpus.name), ti, sigma.clone(), o));
                }
            }
        }
        let instances = jobs
            .par_iter()
            .map(|(id, ti, sigma, o)| self.continuity_instance(id, *ti, sigma, o))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("continuity", instances, vec![]))
    }

    fn continuity_instance(
        &self,
        id: &str,
        ti: usize,
        sigma: &SyntacticMorphism,
        o: &SheafOpen,
    ) -> Result<InstanceReport, HarnessError> {
        let sig = &self.theories[ti].corpus.theory.signature;
        let pre = inverse_image_open(sigma, o, sig)?;
        let mut inst = InstanceReport::new(
            id,
            json!({
                "theory": self.theories[ti].corpus.name,
                "sigma": sigma.graph.to_string(),
                "domain": sigma.domain.to_string(),
                "codomain": sigma.codomain.to_string(),
                "open": o.to_json(),
                "preimage": pre.to_json(),
            }),
        );
        if let Certification::Unknown(steps) = sigma.certification {
            inst.push(PropertyResult::new("functional", Outcome::Unknown, steps));
        } else {
            inst.push(PropertyResult::new("functional", Outcome::Pass, 3));
        }
        let mut checks = 0;
        let mut failure = None;
        'models: for (j, m) in self.small(ti).iter().enumerate() {
            for a in evaluate(&sigma.domain, m)? {
                checks += 1;
                let images = sigma.images(m, &a)?;
                if images.len() != 1 {
                    failure = Some(json!({"model": j, "point": a, "images": images}));
                    break 'models;
                }
                let expected = o.contains(m, &images[0])?;
                let got = pre.contains(m, &a)?;
                if expected != got {
                    failure = Some(json!({"model": j, "structure": m.to_json(), "point": a, "expected": expected}));
                    break 'models;
                }
            }
        }
        inst.push(PropertyResult::check("preimage-exact", failure.is_none(), checks, || failure.unwrap()));
        Ok(inst)
    }

    fn action(&self) -> Result<SuiteReport, HarnessError> {
        let mut rng = self.rng("action");
        let mut jobs: Vec<(String, Arc<CorpusTheory>, HomOpenBox, SheafOpen)> = Vec::new();
        let mut groups: Vec<(Arc<CorpusTheory>, usize)> =
            self.theories.iter().map(|t| (Arc::new(t.corpus.clone()), 6)).collect();
        // A theory whose chases never stop, so that the conditional path is
        // exercised by the designed set.
        if self.theories.iter().all(|t| t.corpus.name != "successor") {
            groups.push((Arc::new(builtin("successor").expect("built in")), 2));
        }
        let names: Vec<Elem> = (0..self.config.hom_bound.max(1)).map(|i| Elem::new(format!("e{i}"))).collect();
        for (c, count) in &groups {
            let sig = &c.theory.signature;
            let sorts: Vec<Sort> = sig.sorts().cloned().collect();
            for k in 0..*count {
                let base = c.formulas[k % c.formulas.len()].clone();
                let mut side_ctx = base.context.clone();
                let mut ws = FreshNames::avoiding("w", side_ctx.vars().map(|v| v.to_string()));
                let mut ysorts = Vec::new();
                if rng.random_bool(0.5) {
                    let s = sorts.choose(&mut rng).expect("a sort").clone();
                    side_ctx.0.push((Var::from(ws.next_name()), s.clone()));
                    ysorts.push(s);
                }
                // Over `successor` a trivial side keeps the auxiliary chase
                // infinite; elsewhere the side is random.
                let side = if c.name == "successor" {
                    FormulaInContext::top(side_ctx)
                } else {
                    random_formula(sig, &side_ctx, 2, &mut rng)
                };
                // Distinct names throughout keep the presentations reduced.
                let mut pool = names.clone();
                let mut draw = |rng: &mut ChaCha8Rng| -> Elem {
                    let i = rng.random_range(0..pool.len());
                    if pool.len() > 1 {
                        pool.remove(i)
                    } else {
                        pool[0].clone()
                    }
                };
                let b: Vec<Elem> = ysorts.iter().map(|_| draw(&mut rng)).collect();
                let o = SheafOpen::new(base, side, b)?;
                let domain = if rng.random_bool(0.5) {
                    let s = sorts.choose(&mut rng).expect("a sort").clone();
                    let f = random_formula(sig, &Context(vec![(Var::new("u"), s)]), 2, &mut rng);
                    PresentedOpen::new(f, vec![draw(&mut rng)])?
                } else {
                    PresentedOpen::everything()
                };
                let pres = if rng.random_bool(0.7) {
                    let s = sorts.choose(&mut rng).expect("a sort").clone();
                    vec![(s, draw(&mut rng), names.choose(&mut rng).expect("names").clone())]
                } else {
                    vec![]
                };
                let codomain = if rng.random_bool(0.5) {
                    let s = sorts.choose(&mut rng).expect("a sort").clone();
                    let f = random_formula(sig, &Context(vec![(Var::new("u"), s)]), 2, &mut rng);
                    PresentedOpen::new(f, vec![names.choose(&mut rng).expect("names").clone()])?
                } else {
                    PresentedOpen::everything()
                };
                jobs.push((format!("{}/{k}", c.name), c.clone(), HomOpenBox::new(domain, pres, codomain), o));
            }
        }
        let bound = self.config.hom_bound;
        let corpora: BTreeMap<String, Vec<Arc<Structure>>> = groups
            .iter()
            .map(|(c, _)| {
                let models = match self.theories.iter().position(|t| t.corpus.name == c.name) {
                    Some(i) => self.small(i).to_vec(),
                    None => c.models(bound.min(2)),
                };
                (c.name.clone(), models)
            })
            .collect();
        let budget = self.config.budget.min(500);
        let results = jobs
            .par_iter()
            .map(|(id, c, bx, o)| -> Result<InstanceReport, HarnessError> {
                let check = check_action_image(&c.theory, bx, o, &corpora[&c.name], budget)?;
                let mut inst = InstanceReport::new(
                    id.clone(),
                    json!({"theory": c.name, "box": bx.to_json(), "open": o.to_json(), "image": check.image.to_json()}),
                );
                inst.push(PropertyResult::check(
                    "forward-inclusion",
                    check.forward_holds(),
                    check.forward_instances,
                    || json!(check.forward_failure),
                ));
                let conv = match &check.converse {
                    Converse::Verified { points } => PropertyResult::new("converse-inclusion", Outcome::Pass, *points),
                    Converse::Failed { .. } => {
                        PropertyResult::new("converse-inclusion", Outcome::Fail, 1).with_witness(json!(check.converse))
                    }
                    Converse::Conditional { steps } => {
                        PropertyResult::new("converse-inclusion", Outcome::BudgetExhausted, *steps)
                    }
                    Converse::NotApplicable { .. } => {
                        PropertyResult::new("converse-inclusion", Outcome::NotApplicable, 0)
                            .with_witness(json!(check.converse))
                    }
                };
                inst.push(conv);
                Ok(inst)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let total = results.len();
        let conditional =
            results.iter().filter(|i| i.properties.iter().any(|p| p.outcome == Outcome::BudgetExhausted)).count();
        let terminated = total - conditional;
        let rate_ok = terminated * 5 >= total * 4;
        let req = PropertyResult::check(
            "terminating-fraction-at-least-80-percent",
            rate_ok,
            total,
            || json!({"terminated": terminated, "total": total}),
        );
        Ok(SuiteReport::new("action", results, vec![req]))
    }

    /// Points `(model, tuple)` of each corpus formula, at most `per` of them,
    /// drawn from the hom-bound corpus.
    fn sample_points(
        &self,
        ti: usize,
        fi: usize,
        per: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<(usize, Vec<Elem>)>, HarnessError> {
        let phi = &self.theories[ti].corpus.formulas[fi];
        let mut all = Vec::new();
        for (j, m) in self.small(ti).iter().enumerate() {
            for a in evaluate(phi, m)? {
                all.push((j, a));
            }
        }
        Ok(all.choose_multiple(rng, per).cloned().collect())
    }

    fn sections(&self) -> Result<SuiteReport, HarnessError> {
        let mut rng = self.rng("sections");
        let mut jobs = Vec::new();
        for (ti, fi) in self.chase_jobs() {
            for (k, (j, a)) in self.sample_points(ti, fi, 3, &mut rng)?.into_iter().enumerate() {
                jobs.push((ti, fi, k, j, a));
            }
        }
        let instances = jobs
            .par_iter()
            .map(|(ti, fi, k, j, a)| -> Result<InstanceReport, HarnessError> {
                let c = &self.theories[*ti].corpus;
                let phi = &c.formulas[*fi];
                let models = self.small(*ti);
                let section = wellbehaved_section(phi, &models[*j], a)?;
                let mut inst = InstanceReport::new(
                    format!("{}/{fi}/{k}", c.name),
                    json!({"theory": c.name, "formula": phi.to_string(), "model": j, "tuple": a, "domain": section.domain.to_json()}),
                );
                let sources: Vec<&Arc<Structure>> =
                    models.iter().filter(|m| section.domain.contains(m).unwrap_or(false)).collect();
                let homs = sources.iter().flat_map(|m| models.iter().flat_map(move |n| find_homs(m, n, &[])));
                let homs: Vec<Homomorphism> = homs.collect();
                let r = check_wellbehaved(&section, &homs)?;
                let ok = r.failures.is_empty() && r.checked > 0;
                inst.push(PropertyResult::check("maps-section-values-to-section-values", ok, r.checked, || {
                    json!({"report": r, "first": r.failures.first().map(|&i| homs[i].to_json())})
                }));
                Ok(inst)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("sections", instances, vec![]))
    }

    fn support(&self) -> Result<SuiteReport, HarnessError> {
        let instances = self
            .chase_jobs()
            .par_iter()
            .map(|&(ti, fi)| -> Result<InstanceReport, HarnessError> {
                let c = &self.theories[ti].corpus;
                let phi = &c.formulas[fi];
                let sorts = phi.context.sorts();
                let models = self.small(ti);
                let mut inst = InstanceReport::new(
                    format!("{}/{fi}", c.name),
                    json!({"theory": c.name, "formula": phi.to_string()}),
                );
                let mut checks = 0;
                let mut failure = None;
                'pairs: for (i, m) in models.iter().enumerate() {
                    let points: Vec<Vec<Elem>> = evaluate(phi, m)?.into_iter().collect();
                    if points.is_empty() {
                        continue;
                    }
                    for (j, n) in models.iter().enumerate() {
                        let homs: Vec<Homomorphism> = find_homs(m, n, &[]).collect();
                        for a in &points {
                            // Group by the restriction to the support of `a`;
                            // inside a group the action must be constant.
                            let mut seen: BTreeMap<Vec<Elem>, Vec<Elem>> = BTreeMap::new();
                            for h in &homs {
                                let on_support = h.apply_tuple(&sorts, a).expect("point in source");
                                let acted = definable_action(phi, h, a)?;
                                checks += 1;
                                match seen.get(&on_support) {
                                    Some(prev) if *prev != acted => {
                                        failure = Some(
                                            json!({"source": i, "target": j, "point": a, "actions": [prev, acted]}),
                                        );
                                        break 'pairs;
                                    }
                                    Some(_) => {}
                                    None => {
                                        seen.insert(on_support, acted);
                                    }
                                }
                            }
                        }
                    }
                }
                inst.push(PropertyResult::check("agreeing-homs-act-alike", failure.is_none(), checks, || {
                    failure.unwrap()
                }));
                Ok(inst)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("support", instances, vec![]))
    }

    fn factorization(&self) -> Result<SuiteReport, HarnessError> {
        let jobs: Vec<(usize, usize)> =
            (0..self.theories.len()).flat_map(|ti| (0..self.small(ti).len()).map(move |i| (ti, i))).collect();
        let instances = jobs
            .par_iter()
            .map(|&(ti, i)| -> Result<InstanceReport, HarnessError> {
                let c = &self.theories[ti].corpus;
                let models = self.small(ti);
                let m = &models[i];
                let mut inst =
                    InstanceReport::new(format!("{}/{i}", c.name), json!({"theory": c.name, "source": m.to_json()}));
                let (mut injective, mut rejected) = (0, 0);
                let mut failure = None;
                let mut wrong_rejection = None;
                for n in models {
                    for h in find_homs(m, n, &[]) {
                        if !h.is_injective() {
                            rejected += 1;
                            if !matches!(factor_hom(&h), Err(ModelError::NotInjective(_))) && wrong_rejection.is_none()
                            {
                                wrong_rejection = Some(h.to_json());
                            }
                            continue;
                        }
                        injective += 1;
                        let (iso, incl) = factor_hom(&h)?;
                        let back = iso.then(&incl)?;
                        let ok = back.same_as(&h)
                            && iso.source() == h.source()
                            && incl.target() == h.target()
                            && iso.is_injective()
                            && iso.is_surjective()
                            && incl.maps().values().all(|f| f.iter().all(|(x, y)| x == y));
                        if !ok && failure.is_none() {
                            failure = Some(h.to_json());
                        }
                    }
                }
                inst.push(PropertyResult::check("iso-then-inclusion-recomposes", failure.is_none(), injective, || {
                    failure.unwrap()
                }));
                inst.push(PropertyResult::check("non-injective-rejected", wrong_rejection.is_none(), rejected, || {
                    wrong_rejection.unwrap()
                }));
                Ok(inst)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SuiteReport::new("factorization", instances, vec![]))
    }
}

/// A diagram produced for the `colimit` and `convergence` suites.
#[derive(Clone, Debug)]
pub struct GeneratedDiagram {
    pub id: String,
    pub theory: usize,
    pub shape: Shape,
    pub diagram: DirectedDiagram,
}

impl GeneratedDiagram {
    fn descriptor(&self, theory: &str) -> Value {
        json!({
            "theory": theory,
            "shape": self.shape,
            "stages": self.diagram.models().iter().map(|m| m.to_json()).collect::<Vec<_>>(),
        })
    }
}

fn conjoin(f: &FormulaInContext, g: &FormulaInContext) -> FormulaInContext {
    FormulaInContext::new(f.context.clone(), Formula::conj([f.body.clone(), g.body.clone()]))
}

/// `⌜x,y. φ(x) ∧ ⋀ y_j = x_{sel_j}⌝ : ⌜x.φ⌝ → ⌜y. ∃x. φ(x) ∧ ⋀ y_j = x_{sel_j}⌝`.
fn selection_morphism(
    sig: &crate::logic::Signature,
    phi: &FormulaInContext,
    sel: &[usize],
) -> (FormulaInContext, FormulaInContext, FormulaInContext) {
    let mut taken: BTreeSet<String> = phi.body.all_vars().iter().map(|v| v.to_string()).collect();
    taken.extend(phi.context.vars().map(|v| v.to_string()));
    taken.extend(sig.relations().map(|(r, _)| r.to_string()).chain(sig.functions().map(|(f, _)| f.to_string())));
    let mut ys = FreshNames::avoiding("y", &taken);
    let ctx_y: Vec<(Var, Sort)> =
        sel.iter().map(|&i| (Var::from(ys.next_name()), phi.context.0[i].1.clone())).collect();
    let eqs: Vec<Formula> = ctx_y
        .iter()
        .zip(sel)
        .map(|((y, _), &i)| Formula::eq(Term::Var(y.clone()), Term::Var(phi.context.0[i].0.clone())))
        .collect();
    let link = Formula::conj(std::iter::once(phi.body.clone()).chain(eqs));
    let graph = FormulaInContext::new(phi.context.concat(&Context(ctx_y.clone())), link.clone());
    let cod = FormulaInContext::new(Context(ctx_y), Formula::exists_all(&phi.context.0, link));
    (phi.clone(), cod, graph)
}

fn convergence_instance(
    g: &GeneratedDiagram,
    formulas: &[FormulaInContext],
    theory: &str,
) -> Result<InstanceReport, HarnessError> {
    let d = &g.diagram;
    let colim = directed_colimit(d)?;
    let mut inst = InstanceReport::new(g.id.clone(), json!({"theory": theory, "shape": g.shape, "stages": d.len()}));
    // Every basic open met along the way: ⟨φ, a⟩ for a in some stage.
    let mut seen: HashSet<PresentedOpen> = HashSet::new();
    let mut opens: Vec<PresentedOpen> = Vec::new();
    for m in d.models() {
        for f in formulas {
            for a in evaluate(f, m)? {
                let o = PresentedOpen::new(f.clone(), a)?;
                if seen.insert(o.clone()) {
                    opens.push(o);
                }
            }
        }
    }
    let mut containing = Vec::new();
    let mut failure = None;
    for o in &opens {
        if o.contains(&colim.structure)? {
            containing.push(o.clone());
            if tail_index(d, o)?.is_none() && failure.is_none() {
                failure = Some(o.to_json());
            }
        }
    }
    inst.descriptor["opens"] = json!(opens.len());
    inst.descriptor["opens_containing_colimit"] = json!(containing.len());
    inst.push(PropertyResult::check("model-net-has-tails", failure.is_none(), containing.len(), || failure.unwrap()));

    // Boxes: single preservation pairs read off the cocone, codomain
    // conditions from the opens above, and domain conditions from the stage.
    let mut checks = 0;
    let mut failure = None;
    'stages: for stage in 0..d.len() {
        let f = &colim.cocone[stage];
        let mut boxes: Vec<HomOpenBox> = Vec::new();
        for (s, e) in d.model(stage).elements() {
            let c = f.apply(s, e).expect("cocone is total").clone();
            boxes.push(HomOpenBox::preserving(vec![(s.clone(), e.clone(), c)]));
        }
        for o in &containing {
            boxes.push(HomOpenBox::with_codomain(o.clone()));
        }
        for o in &opens {
            if o.contains(d.model(stage))? {
                boxes.push(HomOpenBox::with_domain(o.clone()));
            }
        }
        for b in &boxes {
            if b.contains(f)? {
                checks += 1;
                if hom_net_tail(d, stage, b)?.is_none() {
                    failure = Some(json!({"stage": stage, "box": b.to_json()}));
                    break 'stages;
                }
            }
        }
    }
    inst.push(PropertyResult::check("hom-net-has-tails", failure.is_none(), checks, || failure.unwrap()));
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::corpus::corpus;

    fn small_config() -> VerifyConfig {
        VerifyConfig {
            max_size: 4,
            diagrams: 10,
            samples: 10,
            corpus_bound: 2,
            hom_bound: 2,
            stages: 3,
            model_size: 3,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn every_suite_runs_and_passes_on_small_bounds() {
        let wb = Workbench::new(small_config(), corpus());
        let reports = wb.run("all").unwrap();
        assert_eq!(reports.iter().map(|r| r.suite.as_str()).collect::<Vec<_>>(), SUITES);
        for r in &reports {
            assert!(r.passed, "{}: {:?}", r.suite, r.failures());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = Workbench::new(small_config(), corpus()).run("genericity,colimit,action").unwrap();
        let b = Workbench::new(small_config(), corpus()).run("genericity,colimit,action").unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = Workbench::new(VerifyConfig { seed: 1, ..small_config() }, corpus()).run("genericity").unwrap();
        assert_ne!(serde_json::to_string(&a[0]).unwrap(), serde_json::to_string(&c[0]).unwrap());
    }

    #[test]
    fn unknown_suites_are_rejected() {
        let wb = Workbench::new(small_config(), corpus());
        assert!(matches!(wb.run("nope"), Err(HarnessError::Input(_))));
    }

    #[test]
    fn selection_morphisms_are_functional() {
        let c = &corpus()[0];
        let (dom, cod, graph) = selection_morphism(&c.theory.signature, &c.formulas[1], &[2, 0]);
        let m = SyntacticMorphism::new(&c.theory, &dom, &cod, &graph, DEFAULT_BUDGET).unwrap();
        assert_eq!(m.certification, Certification::Proved);
    }
}
