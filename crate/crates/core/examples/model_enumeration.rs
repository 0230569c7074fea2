//! Count the finite models of each bundled theory up to isomorphism-free
//! naming, and check one of them against every axiom.
//!
//! cargo run --example model_enumeration

use rwb::harness::corpus::corpus;
use rwb::model::{enumerate_models, satisfies_theory, search_space};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c in corpus() {
        let sig = &c.theory.signature;
        let mut counts = Vec::new();
        for bound in 1..=3 {
            counts.push(enumerate_models(&c.theory, bound).count());
        }
        println!(
            "{:<14} models with at most 1/2/3 elements per sort: {:?}  (search space at 3: {})",
            c.name,
            counts,
            search_space(sig, 3)
        );
    }

    let preorder = corpus().into_iter().find(|c| c.name == "preorder").expect("bundled");
    let m = enumerate_models(&preorder.theory, 2).last().expect("non-empty");
    println!("a preorder on two points:\n{m}");
    assert!(satisfies_theory(&m, &preorder.theory)?);
    Ok(())
}
