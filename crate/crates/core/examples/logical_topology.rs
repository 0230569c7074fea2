//! Basic opens of the space of models: subbasic opens, presented opens,
//! their intersections, and a net of models converging to its colimit.
//!
//! cargo run --example logical_topology

use std::sync::Arc;

use rwb::harness::corpus::builtin;
use rwb::logic::parse_formula;
use rwb::model::enumerate_models;
use rwb::topology::{subbasic_to_formula, PresentedOpen, Subbasic};
use rwb::{Elem, Sym};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = builtin("transitivity").expect("bundled theory");
    let sig = &c.theory.signature;
    let models: Vec<Arc<_>> = enumerate_models(&c.theory, 2).map(Arc::new).collect();

    let edge = subbasic_to_formula(sig, &Subbasic::Relation(Sym::new("R"), vec![Elem::new("e0"), Elem::new("e1")]))?;
    let loop_at = PresentedOpen::new(parse_formula(sig, "[x:A] R(x, x)")?, vec![Elem::new("e1")])?;
    let both = edge.intersect(&loop_at, sig);
    println!("U = {edge}\nV = {loop_at}\nU ∩ V = {both}");

    let count = |o: &PresentedOpen| models.iter().filter(|m| o.contains(m).unwrap()).count();
    println!(
        "of {} models: |U| = {}, |V| = {}, |U ∩ V| = {}",
        models.len(),
        count(&edge),
        count(&loop_at),
        count(&both)
    );
    for m in &models {
        assert_eq!(both.contains(m)?, edge.contains(m)? && loop_at.contains(m)?);
    }

    // A presentation that repeats an element is reduced to an equality.
    let repeated =
        PresentedOpen::new(parse_formula(sig, "[x:A, y:A] R(x, y)")?, vec![Elem::new("e0"), Elem::new("e0")])?;
    println!("{repeated}  reduces to  {}", repeated.reduced());
    Ok(())
}
