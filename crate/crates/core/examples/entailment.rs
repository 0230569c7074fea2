//! Decide sequents semantically: a terminated chase either proves the
//! right-hand side at the generic tuple or is itself a countermodel.
//!
//! cargo run --example entailment

use rwb::chase::{entails, EntailmentVerdict};
use rwb::harness::corpus::builtin;
use rwb::logic::parse_sequent;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let poset = builtin("poset").expect("bundled theory");
    let t = &poset.theory;
    let sequents = [
        "[x:A, y:A, z:A, w:A] R(x, y) & R(y, z) & R(z, w) |- R(x, w)",
        "[x:A, y:A] R(x, y) & R(y, x) |- x = y",
        "[x:A, y:A] R(x, y) |- R(y, x)",
        "[x:A, y:A, z:A] R(x, y) & R(x, z) |- exists w:A. R(y, w) & R(z, w)",
    ];
    for src in sequents {
        let s = parse_sequent(&t.signature, src)?;
        match entails(t, &s, 1_000)? {
            EntailmentVerdict::Proved => println!("proved     {s}"),
            EntailmentVerdict::Disproved { countermodel, witness } => {
                println!("disproved  {s}\n  witness {witness:?} in\n{countermodel}");
            }
            EntailmentVerdict::Unknown { steps } => println!("unknown    {s} ({steps} steps)"),
        }
    }

    // A chase that never stops leaves the question open.
    let succ = builtin("successor").expect("bundled theory");
    let s = parse_sequent(&succ.theory.signature, "[x:A, y:A] R(x, y) |- R(y, x)")?;
    let v = entails(&succ.theory, &s, 50)?;
    println!("{:<10} {s}", v.label());
    assert!(matches!(v, EntailmentVerdict::Unknown { .. }));
    Ok(())
}
