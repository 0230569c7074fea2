//! Filters of small meet-semilattices, the opens they carry, and the
//! agreement of directed-join-preserving and continuous maps into 2.
//!
//! cargo run --example stone_duality

use rwb::stone::{all_filters, all_semilattices, check_equivalence, filter_opens, lower_sets, MeetSemilattice};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let diamond = MeetSemilattice::diamond();
    let filters = all_filters(&diamond);
    println!("diamond: {} elements, {} filters", diamond.len(), filters.len());
    for f in &filters {
        let labels: Vec<&str> = f.elements().map(|i| diamond.label(i)).collect();
        println!("  {{{}}}", labels.join(", "));
    }
    println!("{} opens, {} lower sets", filter_opens(&diamond).len(), lower_sets(&diamond).len());

    let mut by_size = [0usize; 6];
    for s in all_semilattices(5) {
        let r = check_equivalence(&s)?;
        assert!(r.equal, "{:?}", s.to_json());
        by_size[s.len()] += 1;
    }
    println!("maps agree on every semilattice up to 5 elements: {:?} by size", &by_size[1..]);

    let r = check_equivalence(&MeetSemilattice::chain(4))?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
