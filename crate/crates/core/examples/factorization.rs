//! Injective homomorphisms split as an isomorphism onto the image followed
//! by an inclusion; non-injective ones are refused.
//!
//! cargo run --example factorization

use std::sync::Arc;

use rwb::harness::corpus::builtin;
use rwb::model::{enumerate_models, factor_hom, find_homs, ModelError, Structure};
use rwb::{Elem, Sort, Sym};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = builtin("preorder").expect("bundled theory");
    let models: Vec<Arc<_>> = enumerate_models(&c.theory, 2).map(Arc::new).collect();
    let (mut split, mut refused) = (0, 0);
    for m in &models {
        for n in &models {
            for h in find_homs(m, n, &[]) {
                match factor_hom(&h) {
                    Ok((iso, incl)) => {
                        assert!(iso.is_injective() && iso.is_surjective());
                        assert!(iso.then(&incl)?.same_as(&h));
                        split += 1;
                    }
                    Err(_) => refused += 1,
                }
            }
        }
    }
    println!("{split} injective homomorphisms factored, {refused} non-injective refused");

    // An edge a → b placed inside a three-element preorder with a loop on every point.
    let sig = Arc::new(c.theory.signature.clone());
    let build = |names: &[&str], edges: &[(&str, &str)]| -> Result<Arc<Structure>, ModelError> {
        let mut m = Structure::empty(sig.clone());
        for n in names {
            m.add_element(&Sort::new("A"), Elem::new(n))?;
            m.add_fact(&Sym::new("R"), vec![Elem::new(n), Elem::new(n)])?;
        }
        for (x, y) in edges {
            m.add_fact(&Sym::new("R"), vec![Elem::new(x), Elem::new(y)])?;
        }
        Ok(Arc::new(m))
    };
    let m = build(&["a", "b"], &[("a", "b")])?;
    let n = build(&["x", "y", "z"], &[("x", "z"), ("z", "x"), ("y", "z")])?;
    let h = find_homs(
        &m,
        &n,
        &[(Sort::new("A"), Elem::new("a"), Elem::new("x")), (Sort::new("A"), Elem::new("b"), Elem::new("z"))],
    )
    .next()
    .expect("a ↦ x, b ↦ z preserves the edge");
    let (iso, incl) = factor_hom(&h)?;
    println!("h    = {}\niso  = {}\nincl = {}", h.to_json(), iso.to_json(), incl.to_json());
    println!("image:\n{}", iso.target());
    Ok(())
}
