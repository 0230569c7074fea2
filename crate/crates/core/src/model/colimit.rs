//! Finite directed diagrams of structures, their colimits, and the check that
//! definable sets commute with them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use super::{definable_action, evaluate, Homomorphism, ModelError, Structure};
use crate::logic::FormulaInContext;
use crate::names::{Elem, Sort};

/// A functor from a finite directed poset into structures.
///
/// Stages are numbered `0..n`. The order is the reflexive-transitive closure
/// of the arrows supplied; arrows along composite paths are derived and every
/// path between two stages must compose to the same map.
#[derive(Clone, Debug)]
pub struct DirectedDiagram {
    models: Vec<Arc<Structure>>,
    arrows: BTreeMap<(usize, usize), Homomorphism>,
}

impl DirectedDiagram {
    pub fn new(
        models: Vec<Arc<Structure>>,
        generators: Vec<((usize, usize), Homomorphism)>,
    ) -> Result<Self, ModelError> {
        let n = models.len();
        if n == 0 {
            return Err(ModelError::Diagram("the index poset is empty".into()));
        }
        let mut given: BTreeMap<(usize, usize), Homomorphism> = BTreeMap::new();
        for ((d, e), h) in generators {
            if d >= n || e >= n {
                return Err(ModelError::Diagram(format!("arrow {d}->{e} names a missing stage")));
            }
            if *h.source().as_ref() != *models[d] || *h.target().as_ref() != *models[e] {
                return Err(ModelError::Diagram(format!("arrow {d}->{e} has the wrong endpoints")));
            }
            if d == e {
                if !h.same_as(&Homomorphism::identity(models[d].clone())) {
                    return Err(ModelError::Diagram(format!("arrow {d}->{d} is not the identity")));
                }
                continue;
            }
            if let Some(prev) = given.get(&(d, e)) {
                if prev.maps() != h.maps() {
                    return Err(ModelError::Diagram(format!("two different arrows {d}->{e}")));
                }
            }
            given.insert((d, e), h);
        }

        let mut le = vec![vec![false; n]; n];
        for d in 0..n {
            le[d][d] = true;
        }
        for &(d, e) in given.keys() {
            le[d][e] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if le[i][j] && le[j][i] {
                    return Err(ModelError::Diagram(format!("stages {i} and {j} form a cycle")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !(0..n).any(|k| le[i][k] && le[j][k]) {
                    return Err(ModelError::Diagram(format!(
                        "stages {i} and {j} have no upper bound: the index is not directed"
                    )));
                }
            }
        }

        // Topological order: by number of stages below.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| ((0..n).filter(|&i| le[i][j]).count(), j));
        let mut arrows: BTreeMap<(usize, usize), Homomorphism> = BTreeMap::new();
        for d in 0..n {
            arrows.insert((d, d), Homomorphism::identity(models[d].clone()));
        }
        for &e in &order {
            for d in 0..n {
                if d == e || !le[d][e] {
                    continue;
                }
                let mut candidates: Vec<Homomorphism> = Vec::new();
                if let Some(h) = given.get(&(d, e)) {
                    candidates.push(h.clone());
                }
                for (&(k, e2), g) in &given {
                    if e2 == e && k != d && le[d][k] {
                        let first = arrows.get(&(d, k)).expect("earlier stage processed");
                        candidates.push(first.then(g)?);
                    }
                }
                let first = candidates.first().expect("a path exists").clone();
                if candidates.iter().any(|c| c.maps() != first.maps()) {
                    return Err(ModelError::Diagram(format!("paths {d}->{e} compose to different maps")));
                }
                arrows.insert((d, e), first);
            }
        }
        Ok(DirectedDiagram { models, arrows })
    }

    /// A chain `M_0 → M_1 → ... → M_k` from consecutive arrows.
    pub fn chain(models: Vec<Arc<Structure>>, links: Vec<Homomorphism>) -> Result<Self, ModelError> {
        let gens = links.into_iter().enumerate().map(|(i, h)| ((i, i + 1), h)).collect();
        DirectedDiagram::new(models, gens)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn model(&self, d: usize) -> &Arc<Structure> {
        &self.models[d]
    }

    pub fn models(&self) -> &[Arc<Structure>] {
        &self.models
    }

    pub fn le(&self, d: usize, e: usize) -> bool {
        self.arrows.contains_key(&(d, e))
    }

    /// The arrow `g_{d,e}` for `d ≤ e`.
    pub fn arrow(&self, d: usize, e: usize) -> Option<&Homomorphism> {
        self.arrows.get(&(d, e))
    }

    /// All pairs `d ≤ e`, identities included.
    pub fn arrows(&self) -> impl Iterator<Item = (&(usize, usize), &Homomorphism)> + '_ {
        self.arrows.iter()
    }

    /// Stages above `d`, in increasing order.
    pub fn up_set(&self, d: usize) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.le(d, e)).collect()
    }
}

/// A colimit with its cocone `f_d : M_d → M`.
#[derive(Clone, Debug)]
pub struct Colimit {
    pub structure: Arc<Structure>,
    pub cocone: Vec<Homomorphism>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// The colimit of a directed diagram, computed as a quotient of the disjoint
/// union of the stages.
///
/// Each class is named after its least `(stage, element)` member, so every
/// element of a stage that is not identified with anything earlier keeps its
/// own name. Should two classes of one sort end up with the same name (only
/// possible when different stages reuse a name for unrelated elements), the
/// later class is renamed `name@stage`.
pub fn directed_colimit(d: &DirectedDiagram) -> Result<Colimit, ModelError> {
    let sig = d.models[0].signature().clone();
    // Nodes are (stage, sort, element), numbered stage-major in canonical order
    // so that a smaller index means a smaller (stage, element) pair per sort.
    let mut nodes: Vec<(usize, Sort, Elem)> = Vec::new();
    let mut index: HashMap<(usize, Sort, Elem), usize> = HashMap::new();
    for (stage, m) in d.models.iter().enumerate() {
        for (s, e) in m.elements() {
            index.insert((stage, s.clone(), e.clone()), nodes.len());
            nodes.push((stage, s.clone(), e.clone()));
        }
    }
    let mut uf = UnionFind::new(nodes.len());
    for (&(a, b), h) in &d.arrows {
        if a == b {
            continue;
        }
        for (s, map) in h.maps() {
            for (x, y) in map {
                uf.union(index[&(a, s.clone(), x.clone())], index[&(b, s.clone(), y.clone())]);
            }
        }
    }
    // Name classes by representative, resolving same-sort name clashes.
    let mut reps: Vec<usize> = (0..nodes.len()).filter(|&i| uf.find(i) == i).collect();
    reps.sort_by(|&i, &j| {
        let (si, ei) = (nodes[i].0, &nodes[i].2);
        let (sj, ej) = (nodes[j].0, &nodes[j].2);
        nodes[i].1.cmp(&nodes[j].1).then(si.cmp(&sj)).then(ei.cmp(ej))
    });
    let mut name_of: HashMap<usize, Elem> = HashMap::new();
    let mut used: BTreeMap<Sort, BTreeSet<Elem>> = BTreeMap::new();
    for &r in &reps {
        let (stage, s, e) = &nodes[r];
        let taken = used.entry(s.clone()).or_default();
        let mut name = e.clone();
        if taken.contains(&name) {
            name = Elem::new(format!("{e}@{stage}"));
        }
        taken.insert(name.clone());
        name_of.insert(r, name);
    }
    let class_name = |uf: &mut UnionFind, i: usize| name_of[&uf.find(i)].clone();

    let mut colim = Structure::empty(sig.clone());
    let mut cocone_maps: Vec<BTreeMap<Sort, BTreeMap<Elem, Elem>>> = Vec::new();
    for (stage, m) in d.models.iter().enumerate() {
        let mut maps: BTreeMap<Sort, BTreeMap<Elem, Elem>> = BTreeMap::new();
        for s in sig.sorts() {
            maps.insert(s.clone(), BTreeMap::new());
        }
        for (s, e) in m.elements() {
            let name = class_name(&mut uf, index[&(stage, s.clone(), e.clone())]);
            colim.add_element(s, name.clone())?;
            maps.get_mut(s).unwrap().insert(e.clone(), name);
        }
        cocone_maps.push(maps);
    }
    for (stage, m) in d.models.iter().enumerate() {
        let maps = &cocone_maps[stage];
        for (r, arity) in sig.relations() {
            for t in m.relation(r) {
                let image = arity.iter().zip(t).map(|(s, e)| maps[s][e].clone()).collect();
                colim.add_fact(r, image)?;
            }
        }
        for (f, ty) in sig.functions() {
            for (args, v) in m.function(f) {
                let image = ty.args.iter().zip(args).map(|(s, e)| maps[s][e].clone()).collect();
                colim.set_function(f, image, maps[&ty.result][v].clone())?;
            }
        }
    }
    colim.validate()?;
    let structure = Arc::new(colim);
    let cocone = d
        .models
        .iter()
        .zip(cocone_maps)
        .map(|(m, maps)| Homomorphism::new_unchecked(m.clone(), structure.clone(), maps))
        .collect();
    Ok(Colimit { structure, cocone })
}

/// Outcome of comparing `colim_d ⟦x.φ⟧^{M_d}` with `⟦x.φ⟧^{colim M_d}`.
#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport {
    pub formula: String,
    pub stage_extension_sizes: Vec<usize>,
    pub colimit_of_extensions: usize,
    pub extension_of_colimit: usize,
    pub injective: bool,
    pub surjective: bool,
    /// Pairs `((d, a), (d', a'))` in different classes with the same image.
    pub injectivity_witnesses: Vec<((usize, Vec<Elem>), (usize, Vec<Elem>))>,
    /// Tuples of the colimit's extension hit by no stage.
    pub surjectivity_witnesses: Vec<Vec<Elem>>,
}

impl PreservationReport {
    pub fn is_bijection(&self) -> bool {
        self.injective && self.surjective
    }
}

/// Builds the colimit of the stagewise extensions (transition maps given by
/// the definable action) and checks that the comparison map into the
/// extension in the colimit is a bijection.
pub fn check_colimit_preservation(f: &FormulaInContext, d: &DirectedDiagram) -> Result<PreservationReport, ModelError> {
    let colim = directed_colimit(d)?;
    let sorts = f.context.sorts();
    let stage_ext: Vec<Vec<Vec<Elem>>> =
        d.models.iter().map(|m| evaluate(f, m).map(|e| e.into_iter().collect())).collect::<Result<_, _>>()?;
    let mut index: HashMap<(usize, Vec<Elem>), usize> = HashMap::new();
    let mut points: Vec<(usize, Vec<Elem>)> = Vec::new();
    for (stage, ext) in stage_ext.iter().enumerate() {
        for t in ext {
            index.insert((stage, t.clone()), points.len());
            points.push((stage, t.clone()));
        }
    }
    let mut uf = UnionFind::new(points.len());
    for (&(a, b), h) in &d.arrows {
        if a == b {
            continue;
        }
        for t in &stage_ext[a] {
            let image = definable_action(f, h, t)?;
            let j = *index
                .get(&(b, image))
                .ok_or_else(|| ModelError::Precondition("definable action left the extension".into()))?;
            uf.union(index[&(a, t.clone())], j);
        }
    }
    let target_ext = evaluate(f, &colim.structure)?;
    let mut image_of_class: BTreeMap<Vec<Elem>, usize> = BTreeMap::new();
    let mut injectivity_witnesses = Vec::new();
    let mut classes = 0;
    for (i, (stage, t)) in points.iter().enumerate() {
        if uf.find(i) != i {
            continue;
        }
        classes += 1;
        let image = colim.cocone[*stage].apply_tuple(&sorts, t).expect("total cocone");
        if let Some(&other) = image_of_class.get(&image) {
            injectivity_witnesses.push((points[other].clone(), (*stage, t.clone())));
        } else {
            image_of_class.insert(image, i);
        }
    }
    let surjectivity_witnesses: Vec<Vec<Elem>> =
        target_ext.iter().filter(|t| !image_of_class.contains_key(*t)).cloned().collect();
    Ok(PreservationReport {
        formula: f.to_string(),
        stage_extension_sizes: stage_ext.iter().map(Vec::len).collect(),
        colimit_of_extensions: classes,
        extension_of_colimit: target_ext.len(),
        injective: injectivity_witnesses.is_empty(),
        surjective: surjectivity_witnesses.is_empty(),
        injectivity_witnesses,
        surjectivity_witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, parse_theory};
    use crate::model::find_homs;
    use crate::names::Sym;

    fn sig() -> Arc<crate::logic::Signature> {
        Arc::new(parse_theory("sort A; rel R(A,A);").unwrap().signature)
    }

    fn model(elems: &[&str], edges: &[(&str, &str)]) -> Arc<Structure> {
        let mut m = Structure::empty(sig());
        for e in elems {
            m.add_element(&Sort::new("A"), Elem::new(e)).unwrap();
        }
        for (x, y) in edges {
            m.add_fact(&Sym::new("R"), vec![Elem::new(x), Elem::new(y)]).unwrap();
        }
        Arc::new(m)
    }

    fn map(m: &Arc<Structure>, n: &Arc<Structure>, pairs: &[(&str, &str)]) -> Homomorphism {
        let inner = pairs.iter().map(|(a, b)| (Elem::new(a), Elem::new(b))).collect();
        Homomorphism::new(m.clone(), n.clone(), BTreeMap::from([(Sort::new("A"), inner)])).unwrap()
    }

    #[test]
    fn chain_of_inclusions_has_the_last_stage_as_colimit() {
        let m0 = model(&["a"], &[]);
        let m1 = model(&["a", "b"], &[("a", "b")]);
        let m2 = model(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let d = DirectedDiagram::chain(
            vec![m0.clone(), m1.clone(), m2.clone()],
            vec![map(&m0, &m1, &[("a", "a")]), map(&m1, &m2, &[("a", "a"), ("b", "b")])],
        )
        .unwrap();
        let c = directed_colimit(&d).unwrap();
        assert_eq!(*c.structure, *m2);
        assert!(c.cocone[2].same_as(&Homomorphism::identity(m2.clone())));
        assert_eq!(c.cocone[0].apply(&Sort::new("A"), &Elem::new("a")), Some(&Elem::new("a")));
    }

    #[test]
    fn single_stage() {
        let m = model(&["a", "b"], &[("a", "b")]);
        let c = directed_colimit(&DirectedDiagram::new(vec![m.clone()], vec![]).unwrap()).unwrap();
        assert_eq!(*c.structure, *m);
    }

    #[test]
    fn merging_chain_identifies_and_names_by_least_member() {
        let m0 = model(&["a", "b"], &[]);
        let m1 = model(&["a"], &[]);
        let d = DirectedDiagram::chain(vec![m0.clone(), m1.clone()], vec![map(&m0, &m1, &[("a", "a"), ("b", "a")])])
            .unwrap();
        let c = directed_colimit(&d).unwrap();
        let names: Vec<&str> = c.structure.carrier(&Sort::new("A")).iter().map(Elem::as_str).collect();
        assert_eq!(names, ["a"]);
    }

    #[test]
    fn name_clash_between_unrelated_elements() {
        let m0 = model(&["a", "b"], &[]);
        let m1 = model(&["b", "c", "a"], &[]);
        let d = DirectedDiagram::chain(vec![m0.clone(), m1.clone()], vec![map(&m0, &m1, &[("a", "b"), ("b", "c")])])
            .unwrap();
        let c = directed_colimit(&d).unwrap();
        let names: BTreeSet<&str> = c.structure.carrier(&Sort::new("A")).iter().map(Elem::as_str).collect();
        assert_eq!(names, BTreeSet::from(["a", "b", "a@1"]));
        for (i, h) in c.cocone.iter().enumerate() {
            Homomorphism::new(d.model(i).clone(), c.structure.clone(), h.maps().clone()).unwrap();
        }
    }

    #[test]
    fn pushout_shape_is_rejected() {
        let m = model(&["a"], &[]);
        let id = |_: ()| map(&m, &m, &[("a", "a")]);
        let err = DirectedDiagram::new(vec![m.clone(), m.clone(), m.clone()], vec![((0, 1), id(())), ((0, 2), id(()))]);
        assert!(matches!(err, Err(ModelError::Diagram(_))));
    }

    #[test]
    fn non_commuting_square_is_rejected() {
        let m0 = model(&["a"], &[]);
        let m1 = model(&["a"], &[]);
        let m3 = model(&["p", "q"], &[]);
        let gens = vec![
            ((0, 1), map(&m0, &m1, &[("a", "a")])),
            ((0, 2), map(&m0, &m1, &[("a", "a")])),
            ((1, 3), map(&m1, &m3, &[("a", "p")])),
            ((2, 3), map(&m1, &m3, &[("a", "q")])),
        ];
        let err = DirectedDiagram::new(vec![m0, m1.clone(), m1, m3], gens);
        assert!(matches!(err, Err(ModelError::Diagram(_))));
    }

    #[test]
    fn witness_arriving_late_is_preserved() {
        let m0 = model(&["a"], &[]);
        let m1 = model(&["a", "b"], &[]);
        let m2 = model(&["a", "b"], &[("a", "b")]);
        let d = DirectedDiagram::chain(
            vec![m0.clone(), m1.clone(), m2.clone()],
            vec![map(&m0, &m1, &[("a", "a")]), map(&m1, &m2, &[("a", "a"), ("b", "b")])],
        )
        .unwrap();
        let f = parse_formula(&sig(), "[x:A] exists y:A. R(x, y)").unwrap();
        let r = check_colimit_preservation(&f, &d).unwrap();
        assert!(r.is_bijection());
        assert_eq!(r.stage_extension_sizes, vec![0, 0, 1]);
    }

    #[test]
    fn cocone_is_universal_against_a_competitor() {
        let m0 = model(&["a", "b"], &[("a", "b")]);
        let m1 = model(&["a", "c"], &[("a", "c"), ("c", "c")]);
        let d = DirectedDiagram::chain(vec![m0.clone(), m1.clone()], vec![map(&m0, &m1, &[("a", "a"), ("b", "c")])])
            .unwrap();
        let c = directed_colimit(&d).unwrap();
        let n = model(&["z"], &[("z", "z")]);
        let competitor = find_homs(&m1, &n, &[]).next().unwrap();
        let seed: Vec<_> = c.cocone[1]
            .maps()
            .iter()
            .flat_map(|(s, m)| {
                m.iter()
                    .map(|(x, y)| (s.clone(), y.clone(), competitor.apply(s, x).unwrap().clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        assert_eq!(find_homs(&c.structure, &n, &seed).count(), 1);
    }
}
