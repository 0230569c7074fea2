//! Parse a theory file with two sorts and a function symbol, then print it
//! back in canonical form.
//!
//! cargo run --example parse_theory

use rwb::logic::{parse_formula, parse_sequent, parse_theory};

const SOURCE: &str = include_str!("../theories/typed_edges.rth");

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = parse_theory(SOURCE)?;
    println!("{t}");

    let f = parse_formula(&t.signature, "[v:V, w:V] exists e:E. src(e) = v & tgt(e) = w")?;
    println!("formula  {f}");
    let back = parse_formula(&t.signature, &f.to_string())?;
    assert!(back.alpha_eq(&f));

    let s = parse_sequent(&t.signature, "[e:E] Mark(src(e)) |- exists f:E. src(f) = src(e)")?;
    println!("sequent  {s}");

    // Ill-sorted input is rejected with a position.
    let err = parse_formula(&t.signature, "[e:E] Mark(e)").unwrap_err();
    println!("error    {err}");
    Ok(())
}
