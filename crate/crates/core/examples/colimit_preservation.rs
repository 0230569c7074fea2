//! A chain of growing linear orders: definable sets of the colimit are the
//! colimit of the stagewise definable sets.
//!
//! cargo run --example colimit_preservation

use std::collections::BTreeMap;
use std::sync::Arc;

use rwb::logic::{parse_formula, parse_theory};
use rwb::model::{check_colimit_preservation, directed_colimit, DirectedDiagram, Homomorphism, Structure};
use rwb::{Elem, Sort, Sym};

fn order(n: usize, sig: &Arc<rwb::logic::Signature>) -> Result<Arc<Structure>, rwb::model::ModelError> {
    let a = Sort::new("A");
    let mut m = Structure::empty(sig.clone());
    for i in 0..n {
        m.add_element(&a, Elem::new(format!("p{i}")))?;
    }
    for i in 0..n {
        for j in i..n {
            m.add_fact(&Sym::new("R"), vec![Elem::new(format!("p{i}")), Elem::new(format!("p{j}"))])?;
        }
    }
    Ok(Arc::new(m))
}

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = parse_theory(include_str!("../theories/poset.rth"))?;
    let sig = Arc::new(t.signature.clone());
    let stages: Vec<Arc<Structure>> = (1..=4).map(|n| order(n, &sig)).collect::<Result<_, _>>()?;
    let links = stages
        .windows(2)
        .map(|w| {
            let inclusion = w[0].carrier(&Sort::new("A")).iter().map(|e| (e.clone(), e.clone())).collect();
            Homomorphism::new(w[0].clone(), w[1].clone(), BTreeMap::from([(Sort::new("A"), inclusion)]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = DirectedDiagram::chain(stages, links)?;
    let colim = directed_colimit(&d)?;
    println!("colimit:\n{}", colim.structure);

    for src in ["[x:A, y:A] R(x, y)", "[x:A] exists y:A. R(x, y) & R(y, y)", "[x:A, y:A] R(x, y) & R(y, x)"] {
        let f = parse_formula(&t.signature, src)?;
        let r = check_colimit_preservation(&f, &d)?;
        println!(
            "{:<40} stages {:?}  colimit of extensions {}  extension in colimit {}  bijection {}",
            r.formula,
            r.stage_extension_sizes,
            r.colimit_of_extensions,
            r.extension_of_colimit,
            r.is_bijection()
        );
        assert!(r.is_bijection());
    }
    Ok(())
}
