//! Build the universal model of a path of length two under transitivity and
//! watch the chase add the missing edge.
//!
//! cargo run --example chase_transitivity

use rwb::chase::{chase, DEFAULT_BUDGET};
use rwb::logic::{parse_formula, parse_theory};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = parse_theory("sort A; rel R(A, A); axiom [x:A, y:A, z:A] R(x, y) & R(y, z) |- R(x, z);")?;
    let phi = parse_formula(&t.signature, "[x:A, y:A, z:A] R(x, y) & R(y, z)")?;
    let r = chase(&phi, &t, DEFAULT_BUDGET)?;

    println!("formula  {phi}");
    println!("status   {:?} after {} steps", r.status, r.trace.len());
    println!("generic  {:?}", r.generic);
    for step in &r.trace {
        println!("  {step:?}");
    }
    println!("{}", r.model);
    assert!(r.terminated());
    assert_eq!(r.model.fact_count(), 3);
    Ok(())
}
