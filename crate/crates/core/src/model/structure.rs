use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::logic::Signature;
use crate::names::{Elem, Sort, Sym};

/// A finite Σ-structure whose carriers are drawn from the element universe.
///
/// Carriers of different sorts may share element names. Function graphs must
/// be total and single-valued; [`Structure::validate`] checks this.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    signature: Arc<Signature>,
    carriers: BTreeMap<Sort, BTreeSet<Elem>>,
    relations: BTreeMap<Sym, BTreeSet<Vec<Elem>>>,
    functions: BTreeMap<Sym, BTreeMap<Vec<Elem>, Elem>>,
}

impl Structure {
    /// The structure with all carriers, tables and graphs empty.
    pub fn empty(signature: Arc<Signature>) -> Self {
        let carriers = signature.sorts().map(|s| (s.clone(), BTreeSet::new())).collect();
        let relations = signature.relations().map(|(r, _)| (r.clone(), BTreeSet::new())).collect();
        let functions = signature.functions().map(|(f, _)| (f.clone(), BTreeMap::new())).collect();
        Structure { signature, carriers, relations, functions }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn add_element(&mut self, sort: &Sort, e: Elem) -> Result<bool, ModelError> {
        let c = self.carriers.get_mut(sort).ok_or_else(|| ModelError::Sort(format!("unknown sort `{sort}`")))?;
        Ok(c.insert(e))
    }

    pub fn add_fact(&mut self, rel: &Sym, tuple: Vec<Elem>) -> Result<bool, ModelError> {
        let arity =
            self.signature.relation(rel).ok_or_else(|| ModelError::Sort(format!("unknown relation `{rel}`")))?;
        if arity.len() != tuple.len() {
            return Err(ModelError::Sort(format!("`{rel}` has arity {}", arity.len())));
        }
        for (s, e) in arity.iter().zip(&tuple) {
            if !self.carriers[s].contains(e) {
                return Err(ModelError::Sort(format!("`{e}` is not in the carrier of `{s}`")));
            }
        }
        Ok(self.relations.get_mut(rel).expect("declared relation").insert(tuple))
    }

    pub fn set_function(&mut self, f: &Sym, args: Vec<Elem>, value: Elem) -> Result<(), ModelError> {
        let ty = self.signature.function(f).ok_or_else(|| ModelError::Sort(format!("unknown function `{f}`")))?.clone();
        if ty.args.len() != args.len() {
            return Err(ModelError::Sort(format!("`{f}` has arity {}", ty.args.len())));
        }
        for (s, e) in ty.args.iter().zip(&args) {
            if !self.carriers[s].contains(e) {
                return Err(ModelError::Sort(format!("`{e}` is not in the carrier of `{s}`")));
            }
        }
        if !self.carriers[&ty.result].contains(&value) {
            return Err(ModelError::Sort(format!("`{value}` is not in the carrier of `{}`", ty.result)));
        }
        let graph = self.functions.get_mut(f).expect("declared function");
        if let Some(old) = graph.get(&args) {
            if *old != value {
                return Err(ModelError::Invalid(format!("`{f}` is not single-valued at {args:?}")));
            }
        }
        graph.insert(args, value);
        Ok(())
    }

    /// Checks that every function graph is total on the carriers.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (f, ty) in self.signature.functions() {
            let graph = &self.functions[f];
            let expected: usize = ty.args.iter().map(|s| self.carriers[s].len()).product();
            if graph.len() != expected {
                return Err(ModelError::Invalid(format!(
                    "`{f}` is defined on {} of {expected} argument tuples",
                    graph.len()
                )));
            }
        }
        Ok(())
    }

    pub fn carrier(&self, sort: &Sort) -> &BTreeSet<Elem> {
        &self.carriers[sort]
    }

    pub fn carriers(&self) -> &BTreeMap<Sort, BTreeSet<Elem>> {
        &self.carriers
    }

    pub fn relation(&self, rel: &Sym) -> &BTreeSet<Vec<Elem>> {
        &self.relations[rel]
    }

    pub fn relations(&self) -> &BTreeMap<Sym, BTreeSet<Vec<Elem>>> {
        &self.relations
    }

    pub fn function(&self, f: &Sym) -> &BTreeMap<Vec<Elem>, Elem> {
        &self.functions[f]
    }

    pub fn functions(&self) -> &BTreeMap<Sym, BTreeMap<Vec<Elem>, Elem>> {
        &self.functions
    }

    pub fn apply(&self, f: &Sym, args: &[Elem]) -> Option<&Elem> {
        self.functions.get(f)?.get(args)
    }

    pub fn holds(&self, rel: &Sym, tuple: &[Elem]) -> bool {
        self.relations.get(rel).is_some_and(|t| t.contains(tuple))
    }

    pub fn contains(&self, sort: &Sort, e: &Elem) -> bool {
        self.carriers.get(sort).is_some_and(|c| c.contains(e))
    }

    /// Total number of elements across sorts.
    pub fn size(&self) -> usize {
        self.carriers.values().map(BTreeSet::len).sum()
    }

    /// All `(sort, element)` pairs, sorts first, in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = (&Sort, &Elem)> + '_ {
        self.carriers.iter().flat_map(|(s, c)| c.iter().map(move |e| (s, e)))
    }

    pub fn fact_count(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum::<usize>()
            + self.functions.values().map(BTreeMap::len).sum::<usize>()
    }

    /// The same structure re-tagged with an equal signature (for example one
    /// parsed separately).
    pub fn with_signature(mut self, signature: Arc<Signature>) -> Result<Self, ModelError> {
        if *signature != *self.signature {
            return Err(ModelError::Sort("signature mismatch".into()));
        }
        self.signature = signature;
        Ok(self)
    }

    /// JSON rendering: `{"carriers": .., "relations": .., "functions": ..}`.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = StructureDoc {
            carriers: self.carriers.clone(),
            relations: self.relations.clone(),
            functions: self
                .functions
                .iter()
                .map(|(f, g)| {
                    let entries =
                        g.iter().map(|(args, value)| GraphEntry { args: args.clone(), value: value.clone() }).collect();
                    (f.clone(), entries)
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("structure serialises")
    }

    pub fn from_json(signature: Arc<Signature>, value: &serde_json::Value) -> Result<Self, ModelError> {
        let doc: StructureDoc = serde_json::from_value(value.clone())
            .map_err(|e| ModelError::Invalid(format!("bad structure JSON: {e}")))?;
        let mut m = Structure::empty(signature);
        for (s, elems) in doc.carriers {
            for e in elems {
                m.add_element(&s, e)?;
            }
        }
        for (r, tuples) in doc.relations {
            for t in tuples {
                m.add_fact(&r, t)?;
            }
        }
        for (f, entries) in doc.functions {
            for GraphEntry { args, value } in entries {
                m.set_function(&f, args, value)?;
            }
        }
        m.validate()?;
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphEntry {
    args: Vec<Elem>,
    value: Elem,
}

#[derive(Serialize, Deserialize)]
struct StructureDoc {
    carriers: BTreeMap<Sort, BTreeSet<Elem>>,
    #[serde(default)]
    relations: BTreeMap<Sym, BTreeSet<Vec<Elem>>>,
    #[serde(default)]
    functions: BTreeMap<Sym, Vec<GraphEntry>>,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, c) in &self.carriers {
            let names: Vec<&str> = c.iter().map(Elem::as_str).collect();
            writeln!(f, "  {s} = {{{}}}", names.join(", "))?;
        }
        for (r, t) in &self.relations {
            let rows: Vec<String> = t
                .iter()
                .map(|tuple| {
                    let parts: Vec<&str> = tuple.iter().map(Elem::as_str).collect();
                    format!("({})", parts.join(","))
                })
                .collect();
            writeln!(f, "  {r} = {{{}}}", rows.join(", "))?;
        }
        for (name, g) in &self.functions {
            let rows: Vec<String> = g
                .iter()
                .map(|(args, v)| {
                    let parts: Vec<&str> = args.iter().map(Elem::as_str).collect();
                    format!("({})->{v}", parts.join(","))
                })
                .collect();
            writeln!(f, "  {name} = {{{}}}", rows.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure {{\n{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_theory;

    fn sig() -> Arc<Signature> {
        Arc::new(parse_theory("sort A; rel R(A,A); fun f(A): A;").unwrap().signature)
    }

    #[test]
    fn facts_must_be_sort_correct() {
        let mut m = Structure::empty(sig());
        m.add_element(&Sort::new("A"), Elem::new("a")).unwrap();
        assert!(m.add_fact(&Sym::new("R"), vec![Elem::new("a"), Elem::new("b")]).is_err());
        assert!(m.add_fact(&Sym::new("R"), vec![Elem::new("a")]).is_err());
        assert!(m.add_fact(&Sym::new("R"), vec![Elem::new("a"), Elem::new("a")]).unwrap());
    }

    #[test]
    fn partial_functions_fail_validation() {
        let mut m = Structure::empty(sig());
        let a = Sort::new("A");
        m.add_element(&a, Elem::new("a")).unwrap();
        m.add_element(&a, Elem::new("b")).unwrap();
        m.set_function(&Sym::new("f"), vec![Elem::new("a")], Elem::new("b")).unwrap();
        assert!(matches!(m.validate(), Err(ModelError::Invalid(_))));
        assert!(m.set_function(&Sym::new("f"), vec![Elem::new("a")], Elem::new("a")).is_err());
        m.set_function(&Sym::new("f"), vec![Elem::new("b")], Elem::new("b")).unwrap();
        m.validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let mut m = Structure::empty(sig());
        let a = Sort::new("A");
        for e in ["a", "b"] {
            m.add_element(&a, Elem::new(e)).unwrap();
        }
        m.add_fact(&Sym::new("R"), vec![Elem::new("a"), Elem::new("b")]).unwrap();
        m.set_function(&Sym::new("f"), vec![Elem::new("a")], Elem::new("b")).unwrap();
        m.set_function(&Sym::new("f"), vec![Elem::new("b")], Elem::new("b")).unwrap();
        let v = m.to_json();
        assert_eq!(v["relations"]["R"], serde_json::json!([["a", "b"]]));
        let back = Structure::from_json(sig(), &v).unwrap();
        assert_eq!(back, m);
    }
}
