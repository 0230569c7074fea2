//! The action of homomorphisms on a definable sheaf sends a basic open of
//! boxes times points to a basic open of the sheaf; both inclusions are
//! checked on enumerated models.
//!
//! cargo run --example action_image

use std::sync::Arc;

use rwb::chase::DEFAULT_BUDGET;
use rwb::harness::corpus::builtin;
use rwb::logic::parse_formula;
use rwb::model::enumerate_models;
use rwb::topology::{check_action_image, Converse, HomOpenBox, PresentedOpen, SheafOpen};
use rwb::{Elem, Sort};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = builtin("transitivity").expect("bundled theory");
    let t = &c.theory;
    let sig = &t.signature;
    let corpus: Vec<Arc<_>> = enumerate_models(t, 3).map(Arc::new).collect();

    // Points ⟨M, a⟩ of ⌜x. ∃y. R(x,y)⌝ with a R-related to e0.
    let base = parse_formula(sig, "[x:A] exists y:A. R(x, y)")?;
    let side = parse_formula(sig, "[x:A, z:A] R(x, z)")?;
    let o = SheafOpen::new(base, side, vec![Elem::new("e0")])?;
    // Homomorphisms sending e0 to e1 into a model with a loop at e1.
    let bx = HomOpenBox::new(
        PresentedOpen::everything(),
        vec![(Sort::new("A"), Elem::new("e0"), Elem::new("e1"))],
        PresentedOpen::new(parse_formula(sig, "[u:A] R(u, u)")?, vec![Elem::new("e1")])?,
    );

    let check = check_action_image(t, &bx, &o, &corpus, DEFAULT_BUDGET)?;
    println!("image open: {}", check.image.to_json());
    println!("forward inclusion on {} instances: {}", check.forward_instances, check.forward_holds());
    println!("converse inclusion: {:?}", check.converse);
    assert!(check.forward_holds());
    assert!(matches!(check.converse, Converse::Verified { .. }));
    Ok(())
}
