use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::{ModelError, Structure};
use crate::names::{Elem, Sort};

/// A sort-indexed family of maps `M → N` preserving relations and functions.
#[derive(Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: Arc<Structure>,
    target: Arc<Structure>,
    maps: BTreeMap<Sort, BTreeMap<Elem, Elem>>,
}

/// A partial assignment `(sort, source element) ↦ target element`.
pub type Seed = Vec<(Sort, Elem, Elem)>;

/// Seed pinning `a_i ↦ b_i` at the given sorts.
pub fn seed_from_tuples(sorts: &[Sort], a: &[Elem], b: &[Elem]) -> Seed {
    sorts.iter().zip(a.iter().zip(b)).map(|(s, (x, y))| (s.clone(), x.clone(), y.clone())).collect()
}

impl Homomorphism {
    /// Builds and checks a homomorphism from explicit component maps.
    pub fn new(
        source: Arc<Structure>,
        target: Arc<Structure>,
        maps: BTreeMap<Sort, BTreeMap<Elem, Elem>>,
    ) -> Result<Self, ModelError> {
        let h = Homomorphism { source, target, maps };
        h.validate()?;
        Ok(h)
    }

    pub(crate) fn new_unchecked(
        source: Arc<Structure>,
        target: Arc<Structure>,
        maps: BTreeMap<Sort, BTreeMap<Elem, Elem>>,
    ) -> Self {
        Homomorphism { source, target, maps }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.source.signature() != self.target.signature() {
            return Err(ModelError::Sort("source and target signatures differ".into()));
        }
        for (s, carrier) in self.source.carriers() {
            let map = self.maps.get(s);
            for e in carrier {
                let v = map
                    .and_then(|m| m.get(e))
                    .ok_or_else(|| ModelError::Invalid(format!("no image for `{e}` at sort `{s}`")))?;
                if !self.target.contains(s, v) {
                    return Err(ModelError::Invalid(format!("image `{v}` of `{e}` is outside the `{s}` carrier")));
                }
            }
            if let Some(m) = map {
                if m.len() != carrier.len() {
                    return Err(ModelError::Invalid(format!("map at sort `{s}` has stray entries")));
                }
            }
        }
        if self.maps.keys().any(|s| !self.source.signature().has_sort(s)) {
            return Err(ModelError::Sort("map at an undeclared sort".into()));
        }
        let sig = self.source.signature().clone();
        for (r, arity) in sig.relations() {
            for t in self.source.relation(r) {
                let image = self.apply_tuple(arity, t).expect("total");
                if !self.target.holds(r, &image) {
                    return Err(ModelError::Invalid(format!("fact {r}{t:?} is not preserved")));
                }
            }
        }
        for (f, ty) in sig.functions() {
            for (args, v) in self.source.function(f) {
                let image = self.apply_tuple(&ty.args, args).expect("total");
                let value = self.apply(&ty.result, v).expect("total");
                if self.target.apply(f, &image) != Some(value) {
                    return Err(ModelError::Invalid(format!("`{f}` is not preserved at {args:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn identity(m: Arc<Structure>) -> Self {
        let maps =
            m.carriers().iter().map(|(s, c)| (s.clone(), c.iter().map(|e| (e.clone(), e.clone())).collect())).collect();
        Homomorphism { source: m.clone(), target: m, maps }
    }

    pub fn source(&self) -> &Arc<Structure> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Structure> {
        &self.target
    }

    pub fn maps(&self) -> &BTreeMap<Sort, BTreeMap<Elem, Elem>> {
        &self.maps
    }

    pub fn apply(&self, sort: &Sort, e: &Elem) -> Option<&Elem> {
        self.maps.get(sort)?.get(e)
    }

    /// Componentwise image of a tuple whose positions have the given sorts.
    pub fn apply_tuple(&self, sorts: &[Sort], t: &[Elem]) -> Option<Vec<Elem>> {
        sorts.iter().zip(t).map(|(s, e)| self.apply(s, e).cloned()).collect()
    }

    /// `other ∘ self`; requires `self.target == other.source`.
    pub fn then(&self, other: &Homomorphism) -> Result<Homomorphism, ModelError> {
        if !Arc::ptr_eq(&self.target, &other.source) && *self.target != *other.source {
            return Err(ModelError::Invalid("composing non-matching homomorphisms".into()));
        }
        let maps = self
            .maps
            .iter()
            .map(|(s, m)| {
                let composed = m.iter().map(|(a, b)| (a.clone(), other.apply(s, b).expect("total").clone())).collect();
                (s.clone(), composed)
            })
            .collect();
        Ok(Homomorphism { source: self.source.clone(), target: other.target.clone(), maps })
    }

    /// Every component map is one-to-one.
    pub fn is_injective(&self) -> bool {
        self.maps.values().all(|m| {
            let mut seen = HashSet::new();
            m.values().all(|v| seen.insert(v))
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.target.carriers().iter().all(|(s, c)| {
            let image: HashSet<&Elem> = self.maps.get(s).map(|m| m.values().collect()).unwrap_or_default();
            c.iter().all(|e| image.contains(e))
        })
    }

    /// Same maps, same endpoints (compared structurally).
    pub fn same_as(&self, other: &Homomorphism) -> bool {
        self.maps == other.maps && *self.source == *other.source && *self.target == *other.target
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.maps).expect("maps serialise")
    }
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Homomorphism {:?}", self.maps)
    }
}

/// Lazily enumerates all homomorphisms `m → n` extending `seed`.
///
/// Source elements are assigned in canonical order (sorts, then elements in
/// natural order) and candidate images are tried in the same order, so the
/// stream is deterministic. Each relation fact and function entry of `m`
/// becomes a constraint that is checked as soon as its last element is
/// assigned; domains are pre-pruned to values that can occur at the
/// corresponding position of some target fact.
pub fn find_homs(m: &Arc<Structure>, n: &Arc<Structure>, seed: &[(Sort, Elem, Elem)]) -> HomSearch {
    HomSearch::new(m.clone(), n.clone(), seed)
}

/// Whether some homomorphism `m → n` extends `seed`.
pub fn exists_hom(m: &Arc<Structure>, n: &Arc<Structure>, seed: &[(Sort, Elem, Elem)]) -> bool {
    find_homs(m, n, seed).next().is_some()
}

struct Constraint {
    table: usize,
    vars: Vec<usize>,
}

pub struct HomSearch {
    source: Arc<Structure>,
    target: Arc<Structure>,
    vars: Vec<(Sort, Elem)>,
    values: Vec<Elem>,
    domains: Vec<Vec<u32>>,
    tables: Vec<HashSet<Vec<u32>>>,
    checks: Vec<Vec<Constraint>>,
    assign: Vec<u32>,
    cursor: Vec<usize>,
    level: usize,
    exhausted: bool,
}

impl HomSearch {
    fn new(source: Arc<Structure>, target: Arc<Structure>, seed: &[(Sort, Elem, Elem)]) -> Self {
        let mut search = HomSearch {
            source: source.clone(),
            target: target.clone(),
            vars: Vec::new(),
            values: Vec::new(),
            domains: Vec::new(),
            tables: Vec::new(),
            checks: Vec::new(),
            assign: Vec::new(),
            cursor: Vec::new(),
            level: 0,
            exhausted: false,
        };
        if source.signature() != target.signature() {
            search.exhausted = true;
            return search;
        }
        let mut value_id: HashMap<(Sort, Elem), u32> = HashMap::new();
        for (s, e) in target.elements() {
            value_id.insert((s.clone(), e.clone()), search.values.len() as u32);
            search.values.push(e.clone());
        }
        let mut var_id: HashMap<(Sort, Elem), usize> = HashMap::new();
        for (s, e) in source.elements() {
            var_id.insert((s.clone(), e.clone()), search.vars.len());
            search.vars.push((s.clone(), e.clone()));
            let dom = target.carrier(s).iter().map(|v| value_id[&(s.clone(), v.clone())]).collect();
            search.domains.push(dom);
        }
        for (s, a, b) in seed {
            let (Some(&v), Some(&val)) = (var_id.get(&(s.clone(), a.clone())), value_id.get(&(s.clone(), b.clone())))
            else {
                search.exhausted = true;
                return search;
            };
            search.domains[v].retain(|&x| x == val);
        }

        let sig = source.signature().clone();
        let mut constraints: Vec<Constraint> = Vec::new();
        let mut add_symbol = |search: &mut HomSearch, sorts: Vec<Sort>, src: Vec<Vec<Elem>>, tgt: Vec<Vec<Elem>>| {
            let table_idx = search.tables.len();
            let table: HashSet<Vec<u32>> = tgt
                .iter()
                .map(|t| sorts.iter().zip(t).map(|(s, e)| value_id[&(s.clone(), e.clone())]).collect())
                .collect();
            for t in src {
                let vars: Vec<usize> = sorts.iter().zip(&t).map(|(s, e)| var_id[&(s.clone(), e.clone())]).collect();
                constraints.push(Constraint { table: table_idx, vars });
            }
            search.tables.push(table);
        };
        for (r, arity) in sig.relations() {
            let src = source.relation(r).iter().cloned().collect();
            let tgt = target.relation(r).iter().cloned().collect();
            add_symbol(&mut search, arity.to_vec(), src, tgt);
        }
        for (f, ty) in sig.functions() {
            let mut sorts = ty.args.clone();
            sorts.push(ty.result.clone());
            let graph = |m: &Structure| -> Vec<Vec<Elem>> {
                m.function(f)
                    .iter()
                    .map(|(args, v)| {
                        let mut t = args.clone();
                        t.push(v.clone());
                        t
                    })
                    .collect()
            };
            add_symbol(&mut search, sorts, graph(&source), graph(&target));
        }

        // Nullary facts and node-consistency pruning.
        for c in &constraints {
            let table = &search.tables[c.table];
            if c.vars.is_empty() {
                if !table.contains(&Vec::new()) {
                    search.exhausted = true;
                    return search;
                }
                continue;
            }
            for (k, &v) in c.vars.iter().enumerate() {
                let allowed: HashSet<u32> = table.iter().map(|t| t[k]).collect();
                search.domains[v].retain(|x| allowed.contains(x));
            }
        }
        if search.domains.iter().any(Vec::is_empty) {
            search.exhausted = true;
            return search;
        }
        search.checks = (0..search.vars.len()).map(|_| Vec::new()).collect();
        for c in constraints {
            if let Some(&last) = c.vars.iter().max() {
                search.checks[last].push(c);
            }
        }
        search.assign = vec![0; search.vars.len()];
        search.cursor = vec![0; search.vars.len()];
        search
    }

    fn consistent(&self, level: usize) -> bool {
        self.checks[level].iter().all(|c| {
            let t: Vec<u32> = c.vars.iter().map(|&v| self.assign[v]).collect();
            self.tables[c.table].contains(&t)
        })
    }

    fn build(&self) -> Homomorphism {
        let mut maps: BTreeMap<Sort, BTreeMap<Elem, Elem>> =
            self.source.carriers().keys().map(|s| (s.clone(), BTreeMap::new())).collect();
        for (k, (s, e)) in self.vars.iter().enumerate() {
            maps.get_mut(s).expect("sort").insert(e.clone(), self.values[self.assign[k] as usize].clone());
        }
        Homomorphism::new_unchecked(self.source.clone(), self.target.clone(), maps)
    }
}

impl Iterator for HomSearch {
    type Item = Homomorphism;

    fn next(&mut self) -> Option<Homomorphism> {
        if self.exhausted {
            return None;
        }
        let n = self.vars.len();
        if n == 0 {
            self.exhausted = true;
            return Some(self.build());
        }
        loop {
            let level = self.level;
            let mut found = false;
            while self.cursor[level] < self.domains[level].len() {
                self.assign[level] = self.domains[level][self.cursor[level]];
                self.cursor[level] += 1;
                if self.consistent(level) {
                    found = true;
                    break;
                }
            }
            if found {
                if level + 1 == n {
                    return Some(self.build());
                }
                self.level += 1;
                self.cursor[self.level] = 0;
            } else {
                if level == 0 {
                    self.exhausted = true;
                    return None;
                }
                self.level -= 1;
            }
        }
    }
}
