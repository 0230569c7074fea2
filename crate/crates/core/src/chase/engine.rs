//! The restricted chase over relational theories.
//!
//! The workspace keeps elements as integer ids in creation order, facts as
//! id tuples, and a union-find forest whose roots are always the least id of
//! their class. Rounds visit the axioms in order; within an axiom the triggers
//! found at the start of its turn are processed in id order, each one being
//! re-checked (and skipped if already satisfied) just before it fires.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use super::{ChaseError, Relationalization};
use crate::logic::{Formula, FormulaInContext, Signature, Theory};
use crate::model::Structure;
use crate::names::{Elem, FreshNames, Sort, Sym, Var};

/// Default step budget.
pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "steps", rename_all = "snake_case")]
pub enum ChaseStatus {
    Terminated,
    BudgetExhausted(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    WitnessAdded,
    FactsAdded,
    ElementsMerged,
}

/// One firing of an axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChaseStep {
    /// Index of the axiom in the relationalized theory.
    pub axiom: usize,
    /// The trigger, as element names at the time of firing.
    pub trigger: Vec<Elem>,
    pub kind: StepKind,
    pub created: Vec<Elem>,
    /// `(kept, absorbed)` pairs.
    pub merged: Vec<(Elem, Elem)>,
    pub facts_added: usize,
}

/// A conjunctive query: variables `0..ctx` are the context, the rest are
/// existentially bound.
#[derive(Clone, Debug)]
pub(crate) struct Cq {
    pub sorts: Vec<Sort>,
    pub ctx: usize,
    pub atoms: Vec<CqAtom>,
}

#[derive(Clone, Debug)]
pub(crate) enum CqAtom {
    Rel(Sym, Vec<usize>),
    Eq(usize, usize),
}

impl Cq {
    /// Compiles a function-free formula in context into prenex form.
    pub(crate) fn compile(f: &FormulaInContext) -> Cq {
        let canon = f.canonical();
        let mut vars: Vec<Var> = Vec::new();
        let mut sorts: Vec<Sort> = Vec::new();
        for (v, s) in canon.context.iter() {
            vars.push(v.clone());
            sorts.push(s.clone());
        }
        let mut atoms = Vec::new();
        fn go(f: &Formula, vars: &mut Vec<Var>, sorts: &mut Vec<Sort>, atoms: &mut Vec<CqAtom>) {
            let idx = |vars: &Vec<Var>, t: &crate::logic::Term| {
                let v = t.as_var().expect("relational formula");
                vars.iter().position(|w| w == v).expect("bound or context variable")
            };
            match f {
                Formula::Top => {}
                Formula::Rel(r, args) => {
                    let ids = args.iter().map(|a| idx(vars, a)).collect();
                    atoms.push(CqAtom::Rel(r.clone(), ids));
                }
                Formula::Eq(l, r) => {
                    let (a, b) = (idx(vars, l), idx(vars, r));
                    atoms.push(CqAtom::Eq(a, b));
                }
                Formula::And(l, r) => {
                    go(l, vars, sorts, atoms);
                    go(r, vars, sorts, atoms);
                }
                Formula::Exists(v, s, body) => {
                    vars.push(v.clone());
                    sorts.push(s.clone());
                    go(body, vars, sorts, atoms);
                }
            }
        }
        go(&canon.body, &mut vars, &mut sorts, &mut atoms);
        Cq { sorts, ctx: canon.context.len(), atoms }
    }
}

/// One relation's facts: insertion log, membership stamps and a
/// per-position index.
#[derive(Default)]
struct Table {
    stamp: HashMap<Vec<usize>, u64>,
    log: Vec<(u64, Vec<usize>)>,
    index: HashMap<(usize, usize), Vec<usize>>,
}

impl Table {
    fn insert(&mut self, t: Vec<usize>, clock: &mut u64) -> bool {
        if self.stamp.contains_key(&t) {
            return false;
        }
        *clock += 1;
        let row = self.log.len();
        for (p, &x) in t.iter().enumerate() {
            self.index.entry((p, x)).or_default().push(row);
        }
        self.stamp.insert(t.clone(), *clock);
        self.log.push((*clock, t));
        true
    }

    fn rows(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.log.iter().map(|(_, t)| t)
    }
}

/// Mutable chase state. Element ids are creation order.
pub(crate) struct Workspace {
    signature: Arc<Signature>,
    names: Vec<Elem>,
    sorts: Vec<Sort>,
    parent: Vec<usize>,
    tables: BTreeMap<Sym, Table>,
    clock: u64,
    fresh: FreshNames,
    pub(crate) created: Vec<(Elem, Sort)>,
    pub(crate) merges: Vec<(Elem, Elem)>,
}

/// Which rows an atom may match during a search.
#[derive(Clone, Copy)]
enum Rows {
    All,
    /// Only rows stamped at or after the given clock value.
    Since(u64),
}

impl Workspace {
    pub(crate) fn new(signature: Arc<Signature>, taken: impl IntoIterator<Item = String>) -> Self {
        let tables = signature.relations().map(|(r, _)| (r.clone(), Table::default())).collect();
        Workspace {
            signature,
            names: Vec::new(),
            sorts: Vec::new(),
            parent: Vec::new(),
            tables,
            clock: 0,
            fresh: FreshNames::avoiding("d", taken),
            created: Vec::new(),
            merges: Vec::new(),
        }
    }

    pub(crate) fn add_named(&mut self, name: Elem, sort: Sort) -> usize {
        self.fresh.reserve(name.as_str());
        self.names.push(name);
        self.sorts.push(sort);
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    pub(crate) fn add_fresh(&mut self, sort: Sort) -> usize {
        let name = Elem::from(self.fresh.next_name());
        self.created.push((name.clone(), sort.clone()));
        self.add_named(name, sort)
    }

    pub(crate) fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn name(&self, x: usize) -> &Elem {
        &self.names[self.find(x)]
    }

    /// Adds a fact (ids are canonicalised); true if it is new.
    pub(crate) fn add_fact(&mut self, r: &Sym, tuple: &[usize]) -> bool {
        let t: Vec<usize> = tuple.iter().map(|&x| self.find(x)).collect();
        self.tables.get_mut(r).expect("declared relation").insert(t, &mut self.clock)
    }

    /// Merges two classes, keeping the older root; true if they differed.
    pub(crate) fn merge(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        self.merges.push((self.names[keep].clone(), self.names[gone].clone()));
        true
    }

    /// Rewrites every fact through the union-find after merges. Every fact
    /// gets a fresh stamp, so the next search of each axiom is a full one.
    pub(crate) fn normalize(&mut self) {
        let parent: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        self.parent = parent.clone();
        for table in self.tables.values_mut() {
            let old = std::mem::take(table);
            for (_, t) in old.log {
                table.insert(t.into_iter().map(|x| parent[x]).collect(), &mut self.clock);
            }
        }
    }

    fn live(&self, sort: &Sort) -> Vec<usize> {
        (0..self.parent.len()).filter(|&x| self.parent[x] == x && self.sorts[x] == *sort).collect()
    }

    /// All solutions of `q` extending `pinned`, projected to the context and
    /// sorted; at most one if `first_only`.
    pub(crate) fn solve(&self, q: &Cq, pinned: &[Option<usize>], first_only: bool) -> Vec<Vec<usize>> {
        let mut binding = self.pin(q, pinned);
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut filter = vec![Rows::All; q.atoms.len()];
        let mut done = vec![false; q.atoms.len()];
        self.search(q, &mut binding, &mut done, &mut filter, first_only, &mut out);
        out.into_iter().collect()
    }

    /// The solutions of `q` that use at least one fact stamped at or after
    /// `since`. Only meaningful when every variable of `q` occurs in a
    /// relational atom.
    fn solve_since(&self, q: &Cq, since: u64) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut filter = vec![Rows::All; q.atoms.len()];
        let mut done = vec![false; q.atoms.len()];
        for i in 0..q.atoms.len() {
            if matches!(q.atoms[i], CqAtom::Rel(..)) {
                let mut binding = vec![None; q.sorts.len()];
                filter[i] = Rows::Since(since);
                self.search(q, &mut binding, &mut done, &mut filter, false, &mut out);
                filter[i] = Rows::All;
            }
        }
        out.into_iter().collect()
    }

    fn pin(&self, q: &Cq, pinned: &[Option<usize>]) -> Vec<Option<usize>> {
        let mut binding: Vec<Option<usize>> = vec![None; q.sorts.len()];
        for (i, p) in pinned.iter().enumerate() {
            binding[i] = p.map(|x| self.find(x));
        }
        binding
    }

    fn search(
        &self,
        q: &Cq,
        binding: &mut Vec<Option<usize>>,
        done: &mut Vec<bool>,
        filter: &mut Vec<Rows>,
        first_only: bool,
        out: &mut BTreeSet<Vec<usize>>,
    ) -> bool {
        let score = |i: usize, binding: &Vec<Option<usize>>| match &q.atoms[i] {
            CqAtom::Rel(_, vs) => {
                let delta = matches!(filter[i], Rows::Since(_)) as usize;
                (vs.iter().filter(|&&v| binding[v].is_some()).count() * 2 + 1 + delta * 1000, std::cmp::Reverse(i))
            }
            CqAtom::Eq(x, y) => {
                ((binding[*x].is_some() as usize + binding[*y].is_some() as usize) * 3, std::cmp::Reverse(i))
            }
        };
        let next = (0..q.atoms.len()).filter(|&i| !done[i]).max_by_key(|&i| score(i, binding));
        let Some(i) = next else {
            return self.finish(q, binding, 0, first_only, out);
        };
        done[i] = true;
        let stop = match &q.atoms[i] {
            CqAtom::Rel(r, vs) => {
                let table = &self.tables[r];
                let bound: Vec<(usize, usize)> =
                    vs.iter().enumerate().filter_map(|(p, &v)| binding[v].map(|x| (p, x))).collect();
                let candidates: Box<dyn Iterator<Item = &Vec<usize>>> = match filter[i] {
                    Rows::Since(since) => {
                        let from = table.log.partition_point(|(s, _)| *s < since);
                        Box::new(table.log[from..].iter().map(|(_, t)| t))
                    }
                    Rows::All if bound.len() == vs.len() => {
                        let t: Vec<usize> = bound.iter().map(|&(_, x)| x).collect();
                        Box::new(table.stamp.get_key_value(&t).map(|(k, _)| k).into_iter())
                    }
                    Rows::All => {
                        match bound.iter().map(|pos| table.index.get(pos)).min_by_key(|l| l.map_or(0, Vec::len)) {
                            Some(None) => Box::new(std::iter::empty()),
                            Some(Some(rows)) => Box::new(rows.iter().map(|&k| &table.log[k].1)),
                            None => Box::new(table.rows()),
                        }
                    }
                };
                let mut stop = false;
                for row in candidates {
                    let saved = binding.clone();
                    let mut ok = true;
                    for (&v, &x) in vs.iter().zip(row) {
                        match binding[v] {
                            Some(y) if y != x => {
                                ok = false;
                                break;
                            }
                            _ => binding[v] = Some(x),
                        }
                    }
                    if ok && self.search(q, binding, done, filter, first_only, out) {
                        stop = true;
                    }
                    *binding = saved;
                    if stop {
                        break;
                    }
                }
                stop
            }
            CqAtom::Eq(x, y) => match (binding[*x], binding[*y]) {
                (Some(a), Some(b)) => a == b && self.search(q, binding, done, filter, first_only, out),
                (Some(a), None) | (None, Some(a)) => {
                    let free = if binding[*x].is_none() { *x } else { *y };
                    binding[free] = Some(a);
                    let stop = self.search(q, binding, done, filter, first_only, out);
                    binding[free] = None;
                    stop
                }
                (None, None) => {
                    let mut stop = false;
                    for a in self.live(&q.sorts[*x]) {
                        binding[*x] = Some(a);
                        binding[*y] = Some(a);
                        if self.search(q, binding, done, filter, first_only, out) {
                            stop = true;
                        }
                        binding[*x] = None;
                        binding[*y] = None;
                        if stop {
                            break;
                        }
                    }
                    stop
                }
            },
        };
        done[i] = false;
        stop
    }

    /// Enumerates variables that occur in no atom, then records the solution.
    fn finish(
        &self,
        q: &Cq,
        binding: &mut Vec<Option<usize>>,
        from: usize,
        first_only: bool,
        out: &mut BTreeSet<Vec<usize>>,
    ) -> bool {
        match (from..q.sorts.len()).find(|&v| binding[v].is_none()) {
            None => {
                out.insert(binding[..q.ctx].iter().map(|b| b.unwrap()).collect());
                first_only
            }
            Some(v) => {
                for a in self.live(&q.sorts[v]) {
                    binding[v] = Some(a);
                    let stop = self.finish(q, binding, v + 1, first_only, out);
                    binding[v] = None;
                    if stop {
                        return true;
                    }
                }
                false
            }
        }
    }

    /// Materializes the current state; also returns the name of each id.
    pub(crate) fn structure(&self) -> Structure {
        let mut m = Structure::empty(self.signature.clone());
        for x in 0..self.parent.len() {
            if self.parent[x] == x {
                m.add_element(&self.sorts[x], self.names[x].clone()).expect("declared sort");
            }
        }
        for (r, table) in &self.tables {
            for t in table.rows() {
                m.add_fact(r, t.iter().map(|&x| self.names[self.find(x)].clone()).collect()).expect("well-sorted fact");
            }
        }
        m
    }

    /// Adds the canonical structure of `q`: one element per variable, atoms as
    /// facts, equalities as merges. Returns the ids of all variables.
    pub(crate) fn add_canonical(&mut self, q: &Cq) -> Vec<usize> {
        let ids: Vec<usize> = q.sorts.iter().map(|s| self.add_fresh(s.clone())).collect();
        for a in &q.atoms {
            match a {
                CqAtom::Rel(r, vs) => {
                    let t: Vec<usize> = vs.iter().map(|&v| ids[v]).collect();
                    self.add_fact(r, &t);
                }
                CqAtom::Eq(x, y) => {
                    self.merge(ids[*x], ids[*y]);
                }
            }
        }
        self.normalize();
        ids
    }

    /// Runs the chase to a fixpoint or until `budget` steps have fired.
    ///
    /// A trigger found in an earlier turn of the same axiom was either
    /// satisfied or fired then, and stays satisfied, so later turns only look
    /// for triggers touching facts added since. Axioms with a variable outside
    /// every relational atom are always searched in full.
    pub(crate) fn run(&mut self, theory: &Theory, budget: usize) -> (ChaseStatus, Vec<ChaseStep>) {
        let axioms: Vec<(Cq, Cq, bool)> = theory
            .axioms
            .iter()
            .map(|a| {
                let lhs = Cq::compile(&a.lhs_in_context());
                let covered = (0..lhs.sorts.len())
                    .all(|v| lhs.atoms.iter().any(|at| matches!(at, CqAtom::Rel(_, vs) if vs.contains(&v))));
                (lhs, Cq::compile(&a.rhs_in_context()), covered)
            })
            .collect();
        let mut seen: Vec<Option<u64>> = vec![None; axioms.len()];
        let mut trace = Vec::new();
        loop {
            let mut fired = false;
            for (ai, (lhs, rhs, covered)) in axioms.iter().enumerate() {
                let since = seen[ai];
                seen[ai] = Some(self.clock + 1);
                let triggers = match since {
                    Some(s) if *covered => self.solve_since(lhs, s),
                    _ => self.solve(lhs, &[], false),
                };
                for trig in triggers {
                    let trig: Vec<usize> = trig.iter().map(|&x| self.find(x)).collect();
                    let pinned: Vec<Option<usize>> = trig.iter().map(|&x| Some(x)).collect();
                    if !self.solve(rhs, &pinned, true).is_empty() {
                        continue;
                    }
                    if trace.len() >= budget {
                        return (ChaseStatus::BudgetExhausted(trace.len()), trace);
                    }
                    let step = self.fire(ai, rhs, &trig);
                    trace.push(step);
                    fired = true;
                }
            }
            if !fired {
                return (ChaseStatus::Terminated, trace);
            }
        }
    }

    fn fire(&mut self, axiom: usize, rhs: &Cq, trig: &[usize]) -> ChaseStep {
        let trigger: Vec<Elem> = trig.iter().map(|&x| self.names[x].clone()).collect();
        let n = rhs.sorts.len();
        // Group the head's variables by its equalities.
        let mut group: Vec<usize> = (0..n).collect();
        fn root(g: &mut [usize], mut x: usize) -> usize {
            while g[x] != x {
                x = g[x];
            }
            x
        }
        for a in &rhs.atoms {
            if let CqAtom::Eq(x, y) = a {
                let (rx, ry) = (root(&mut group, *x), root(&mut group, *y));
                if rx != ry {
                    group[rx.max(ry)] = rx.min(ry);
                }
            }
        }
        let merges_before = self.merges.len();
        let created_before = self.created.len();
        let mut value: Vec<Option<usize>> = vec![None; n];
        for v in 0..rhs.ctx {
            let r = root(&mut group, v);
            match value[r] {
                None => value[r] = Some(trig[v]),
                Some(existing) => {
                    self.merge(existing, trig[v]);
                }
            }
        }
        for v in 0..n {
            let r = root(&mut group, v);
            if value[r].is_none() {
                value[r] = Some(self.add_fresh(rhs.sorts[r].clone()));
            }
        }
        let mut facts_added = 0;
        for a in &rhs.atoms {
            if let CqAtom::Rel(r, vs) = a {
                let t: Vec<usize> = vs.iter().map(|&v| value[root(&mut group, v)].unwrap()).collect();
                if self.add_fact(r, &t) {
                    facts_added += 1;
                }
            }
        }
        let merged = self.merges[merges_before..].to_vec();
        if !merged.is_empty() {
            self.normalize();
        }
        let created: Vec<Elem> = self.created[created_before..].iter().map(|(e, _)| e.clone()).collect();
        let kind = if !created.is_empty() {
            StepKind::WitnessAdded
        } else if !merged.is_empty() {
            StepKind::ElementsMerged
        } else {
            StepKind::FactsAdded
        };
        ChaseStep { axiom, trigger, kind, created, merged, facts_added }
    }
}

/// The universal model of a formula, with its generic tuple.
#[derive(Clone, Debug)]
pub struct ChaseResult {
    /// The model over the relational signature (graphs in place of functions).
    pub model: Arc<Structure>,
    pub generic: Vec<Elem>,
    pub status: ChaseStatus,
    pub trace: Vec<ChaseStep>,
    /// Elements in creation order.
    pub created: Vec<(Elem, Sort)>,
    /// `(kept, absorbed)` pairs in the order they happened.
    pub merges: Vec<(Elem, Elem)>,
    pub relationalization: Arc<Relationalization>,
    pub formula: FormulaInContext,
}

impl ChaseResult {
    pub fn terminated(&self) -> bool {
        self.status == ChaseStatus::Terminated
    }

    /// The model over the theory's own signature, reading functions off their
    /// graphs. Only defined when those graphs are functional and total, which
    /// is guaranteed for terminated chases.
    pub fn original_model(&self) -> Result<Arc<Structure>, ChaseError> {
        if self.relationalization.is_trivial() {
            return Ok(self.model.clone());
        }
        Ok(Arc::new(self.relationalization.structure_from_relational(&self.model)?))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "formula": self.formula.to_string(),
            "status": self.status,
            "generic": self.generic,
            "model": self.model.to_json(),
            "steps": self.trace,
            "created": self.created.iter().map(|(e, s)| serde_json::json!({"element": e, "sort": s})).collect::<Vec<_>>(),
            "merges": self.merges.iter().map(|(k, a)| serde_json::json!({"kept": k, "absorbed": a})).collect::<Vec<_>>(),
        })
    }
}

/// Chases the canonical structure of `f` with the axioms of `t`.
///
/// Theories and formulas with function symbols are relationalized first; the
/// resulting model is over the relational signature (see
/// [`ChaseResult::original_model`]). Fresh elements are named `d0, d1, ...`
/// in creation order, and merged classes keep the name of their oldest member.
pub fn chase(f: &FormulaInContext, t: &Theory, budget: usize) -> Result<ChaseResult, ChaseError> {
    f.check(&t.signature)?;
    let rel = Arc::new(Relationalization::new(t));
    let rf = rel.formula(f);
    let q = Cq::compile(&rf);
    let mut ws = Workspace::new(rel.relational_signature().clone(), std::iter::empty());
    let ids = ws.add_canonical(&q);
    let (status, trace) = ws.run(rel.theory(), budget);
    let generic = ids[..q.ctx].iter().map(|&x| ws.name(x).clone()).collect();
    Ok(ChaseResult {
        model: Arc::new(ws.structure()),
        generic,
        status,
        trace,
        created: ws.created.clone(),
        merges: ws.merges.clone(),
        relationalization: rel,
        formula: f.clone(),
    })
}

/// Result of chasing an existing structure.
#[derive(Clone, Debug)]
pub struct StructureChase {
    /// Over the same signature as the input when the chase terminated;
    /// otherwise over the relational signature.
    pub model: Arc<Structure>,
    /// Where each input element ended up, per sort.
    pub embedding: BTreeMap<Sort, BTreeMap<Elem, Elem>>,
    pub status: ChaseStatus,
    pub trace: Vec<ChaseStep>,
}

/// Chases a structure with the axioms of `t`, keeping its element names and
/// drawing fresh names that avoid them.
pub fn chase_structure(m: &Structure, t: &Theory, budget: usize) -> Result<StructureChase, ChaseError> {
    let rel = Relationalization::new(t);
    let rm = rel.structure_to_relational(m)?;
    let taken: Vec<String> = m.elements().map(|(_, e)| e.to_string()).collect();
    let mut ws = Workspace::new(rel.relational_signature().clone(), taken);
    let mut ids: BTreeMap<(Sort, Elem), usize> = BTreeMap::new();
    for (s, e) in rm.elements() {
        ids.insert((s.clone(), e.clone()), ws.add_named(e.clone(), s.clone()));
    }
    for (r, arity) in rel.relational_signature().relations() {
        for tuple in rm.relation(r) {
            let t: Vec<usize> = arity.iter().zip(tuple).map(|(s, e)| ids[&(s.clone(), e.clone())]).collect();
            ws.add_fact(r, &t);
        }
    }
    let (status, trace) = ws.run(rel.theory(), budget);
    let mut embedding: BTreeMap<Sort, BTreeMap<Elem, Elem>> =
        m.signature().sorts().map(|s| (s.clone(), BTreeMap::new())).collect();
    for ((s, e), &x) in &ids {
        embedding.get_mut(s).unwrap().insert(e.clone(), ws.name(x).clone());
    }
    let out = ws.structure();
    let model = if status == ChaseStatus::Terminated { rel.structure_from_relational(&out)? } else { out };
    Ok(StructureChase { model: Arc::new(model), embedding, status, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, parse_theory};
    use crate::model::{evaluate, holds_at, satisfies_theory};

    fn names(v: &[Elem]) -> Vec<&str> {
        v.iter().map(Elem::as_str).collect()
    }

    #[test]
    fn transitivity_fires_once() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);").unwrap();
        let f = parse_formula(&t.signature, "[x:A, y:A, z:A] R(x,y) & R(y,z)").unwrap();
        let r = chase(&f, &t, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, ChaseStatus::Terminated);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.trace[0].kind, StepKind::FactsAdded);
        assert_eq!(names(&r.generic), ["d0", "d1", "d2"]);
        let facts: Vec<Vec<&str>> = r.model.relation(&Sym::new("R")).iter().map(|t| names(t)).collect();
        assert_eq!(facts, [["d0", "d1"], ["d0", "d2"], ["d1", "d2"]]);
    }

    #[test]
    fn empty_formula_empty_theory() {
        let t = parse_theory("sort A;").unwrap();
        let r = chase(&FormulaInContext::top(Default::default()), &t, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, ChaseStatus::Terminated);
        assert_eq!(r.model.size(), 0);
    }

    #[test]
    fn successor_chain_exhausts_budget() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A] R(x,y) |- exists z:A. R(y,z);").unwrap();
        let f = parse_formula(&t.signature, "[x:A, y:A] R(x,y)").unwrap();
        let r = chase(&f, &t, 5).unwrap();
        assert_eq!(r.status, ChaseStatus::BudgetExhausted(5));
        assert_eq!(r.trace.len(), 5);
        assert!(r.trace.iter().all(|s| s.kind == StepKind::WitnessAdded && s.created.len() == 1));
        assert_eq!(r.model.size(), 7);
    }

    #[test]
    fn equality_heads_merge_into_the_oldest_element() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(x,z) |- y = z;").unwrap();
        let f = parse_formula(&t.signature, "[x:A, y:A, z:A] R(x,y) & R(x,z)").unwrap();
        let r = chase(&f, &t, DEFAULT_BUDGET).unwrap();
        assert!(r.terminated());
        assert_eq!(names(&r.generic), ["d0", "d1", "d1"]);
        assert_eq!(r.merges, vec![(Elem::new("d1"), Elem::new("d2"))]);
        assert_eq!(r.trace.iter().filter(|s| s.kind == StepKind::ElementsMerged).count(), 1);
        assert_eq!(r.model.size(), 2);
    }

    #[test]
    fn functions_are_chased_through_their_graphs() {
        let t = parse_theory("sort A; rel P(A); fun s(A): A; axiom [x:A] true |- s(s(x)) = x;").unwrap();
        let f = parse_formula(&t.signature, "[x:A] P(x)").unwrap();
        let r = chase(&f, &t, DEFAULT_BUDGET).unwrap();
        assert!(r.terminated());
        let m = r.original_model().unwrap();
        assert!(satisfies_theory(&m, &t).unwrap());
        assert!(holds_at(&f, &m, &r.generic).unwrap());
        assert_eq!(m.size(), 2);
    }

    #[test]
    fn terminated_models_satisfy_the_theory() {
        let t = parse_theory(
            "sort A; rel R(A,A); rel P(A);
             axiom [x:A,y:A] R(x,y) |- R(y,x);
             axiom [x:A] P(x) |- exists y:A. R(x,y);",
        )
        .unwrap();
        let f = parse_formula(&t.signature, "[x:A] P(x)").unwrap();
        let r = chase(&f, &t, DEFAULT_BUDGET).unwrap();
        assert!(r.terminated());
        assert!(satisfies_theory(&r.model, &t).unwrap());
        assert!(evaluate(&f, &r.model).unwrap().contains(&r.generic));
    }

    #[test]
    fn chasing_a_structure_keeps_names() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A] R(x,y) |- R(y,x);").unwrap();
        let mut m = Structure::empty(Arc::new(t.signature.clone()));
        m.add_element(&Sort::new("A"), Elem::new("a")).unwrap();
        m.add_element(&Sort::new("A"), Elem::new("b")).unwrap();
        m.add_fact(&Sym::new("R"), vec![Elem::new("a"), Elem::new("b")]).unwrap();
        let c = chase_structure(&m, &t, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.status, ChaseStatus::Terminated);
        assert!(c.model.holds(&Sym::new("R"), &[Elem::new("b"), Elem::new("a")]));
        assert_eq!(c.embedding[&Sort::new("A")][&Elem::new("a")], Elem::new("a"));
    }

    #[test]
    fn zero_budget_on_a_trigger_free_formula() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A] R(x,y) |- R(y,x);").unwrap();
        let f = parse_formula(&t.signature, "[x:A] true").unwrap();
        assert!(chase(&f, &t, 0).unwrap().terminated());
    }
}
