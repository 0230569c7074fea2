//! The propositional case: a finite meet-semilattice `S` read as a
//! propositional regular theory, its models (filters) with the topology
//! generated by the sets `B_a = {F : a ∈ F}`, and the comparison between
//! directed-join-preserving maps `Filt(S) → 2` and maps continuous into the
//! Sierpiński space.

mod duality;
mod semilattice;

pub use duality::{
    all_filters, all_ideals, check_equivalence, continuous_maps, dj_preserving_maps, filter_opens, lower_sets,
    EquivalenceReport, Filter, FilterMap,
};
pub use semilattice::{all_semilattices, MeetSemilattice, StoneError};
