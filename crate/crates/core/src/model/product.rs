use std::collections::BTreeMap;
use std::sync::Arc;

use super::eval::for_each_assignment;
use super::{Homomorphism, ModelError, Structure};
use crate::logic::Signature;
use crate::names::{Elem, Sort};

/// The product `∏ ms` with its projections.
///
/// Product elements are named by the pairing encoder [`Elem::tuple`]. The
/// empty product is the terminal structure: one element `()` per sort, all
/// relations full.
pub fn product(
    signature: &Arc<Signature>,
    ms: &[Arc<Structure>],
) -> Result<(Arc<Structure>, Vec<Homomorphism>), ModelError> {
    if ms.iter().any(|m| **m.signature() != **signature) {
        return Err(ModelError::Sort("factors do not share the signature".into()));
    }
    let mut p = Structure::empty(signature.clone());
    // components[sort][product element] = component tuple
    let mut components: BTreeMap<Sort, BTreeMap<Elem, Vec<Elem>>> = BTreeMap::new();
    for s in signature.sorts() {
        let domains: Vec<Vec<Elem>> = ms.iter().map(|m| m.carrier(s).iter().cloned().collect()).collect();
        let entry = components.entry(s.clone()).or_default();
        for_each_assignment(&domains, |parts| {
            entry.insert(Elem::tuple(parts), parts.to_vec());
        });
        if ms.is_empty() {
            entry.insert(Elem::tuple(&[]), Vec::new());
        }
        for e in entry.keys() {
            p.add_element(s, e.clone())?;
        }
    }
    for (r, arity) in signature.relations() {
        let tables: Vec<Vec<Vec<Elem>>> = ms.iter().map(|m| m.relation(r).iter().cloned().collect()).collect();
        let mut facts = Vec::new();
        for_each_assignment(&tables, |rows| {
            let tuple: Vec<Elem> = (0..arity.len())
                .map(|k| Elem::tuple(&rows.iter().map(|row| row[k].clone()).collect::<Vec<_>>()))
                .collect();
            facts.push(tuple);
        });
        if ms.is_empty() {
            facts.push(vec![Elem::tuple(&[]); arity.len()]);
        }
        for t in facts {
            p.add_fact(r, t)?;
        }
    }
    for (f, ty) in signature.functions() {
        let domains: Vec<Vec<Elem>> = ty.args.iter().map(|s| components[s].keys().cloned().collect()).collect();
        let mut entries = Vec::new();
        for_each_assignment(&domains, |args| {
            let value: Vec<Elem> = ms
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let comp: Vec<Elem> = ty.args.iter().zip(args).map(|(s, e)| components[s][e][i].clone()).collect();
                    m.apply(f, &comp).expect("total function").clone()
                })
                .collect();
            entries.push((args.to_vec(), Elem::tuple(&value)));
        });
        for (args, v) in entries {
            p.set_function(f, args, v)?;
        }
    }
    p.validate()?;
    let p = Arc::new(p);
    let projections = ms
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let maps = components
                .iter()
                .map(|(s, comp)| (s.clone(), comp.iter().map(|(e, parts)| (e.clone(), parts[i].clone())).collect()))
                .collect();
            Homomorphism::new_unchecked(p.clone(), m.clone(), maps)
        })
        .collect();
    Ok((p, projections))
}
