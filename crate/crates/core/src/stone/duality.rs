use std::collections::BTreeSet;

use serde::Serialize;

use super::{MeetSemilattice, StoneError};

/// Largest carrier for which maps `Filt(S) → 2` are enumerated.
const MAX_MAP_ELEMENTS: usize = 12;

/// A filter of `S`: non-empty, upward closed and closed under meets. Stored
/// as a bitmask over the elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Filter(pub u32);

impl Filter {
    pub fn contains(self, a: usize) -> bool {
        self.0 >> a & 1 == 1
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&a| self.contains(a))
    }

    pub fn is_subset(self, other: Filter) -> bool {
        self.0 & !other.0 == 0
    }
}

/// A map `Filt(S) → 2`, as the set of filter positions (in the order of
/// [`all_filters`]) sent to `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FilterMap(pub u64);

impl FilterMap {
    pub fn value(self, filter_index: usize) -> bool {
        self.0 >> filter_index & 1 == 1
    }
}

fn is_up_closed(s: &MeetSemilattice, m: u32) -> bool {
    (0..s.len()).all(|a| m >> a & 1 == 0 || s.up(a) & !m == 0)
}

fn is_down_closed(s: &MeetSemilattice, m: u32) -> bool {
    (0..s.len()).all(|a| m >> a & 1 == 0 || s.down(a) & !m == 0)
}

fn members(m: u32, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&a| m >> a & 1 == 1)
}

/// Every filter of `s`, by brute force over subsets, in increasing bitmask
/// order.
pub fn all_filters(s: &MeetSemilattice) -> Vec<Filter> {
    let n = s.len();
    (1u32..(1 << n))
        .filter(|&m| is_up_closed(s, m))
        .filter(|&m| members(m, n).all(|a| members(m, n).all(|b| m >> s.meet(a, b) & 1 == 1)))
        .map(Filter)
        .collect()
}

/// Every down-closed directed subset, the empty one included.
pub fn all_ideals(s: &MeetSemilattice) -> Vec<u32> {
    let n = s.len();
    (0u32..(1 << n))
        .filter(|&m| is_down_closed(s, m))
        .filter(|&m| members(m, n).all(|a| members(m, n).all(|b| members(m, n).any(|c| s.leq(a, c) && s.leq(b, c)))))
        .collect()
}

/// Every down-closed subset: the free frame on `s` as a meet-semilattice.
pub fn lower_sets(s: &MeetSemilattice) -> Vec<u32> {
    (0u32..(1 << s.len())).filter(|&m| is_down_closed(s, m)).collect()
}

/// The opens of `Filt(S)` generated by `B_a = {F : a ∈ F}`, as bitmasks over
/// filter positions: finite intersections of subbasics (the empty one is the
/// whole space), then all unions.
pub fn filter_opens(s: &MeetSemilattice) -> BTreeSet<u64> {
    let filters = all_filters(s);
    let subbasic: Vec<u64> = (0..s.len())
        .map(|a| filters.iter().enumerate().filter(|(_, f)| f.contains(a)).fold(0, |m, (i, _)| m | 1 << i))
        .collect();
    let whole: u64 = if filters.is_empty() { 0 } else { u64::MAX >> (64 - filters.len()) };
    let mut basis: BTreeSet<u64> = BTreeSet::from([whole]);
    loop {
        let next: BTreeSet<u64> = basis.iter().flat_map(|&b| subbasic.iter().map(move |&sb| b & sb)).collect();
        let before = basis.len();
        basis.extend(next);
        if basis.len() == before {
            break;
        }
    }
    let mut opens: BTreeSet<u64> = BTreeSet::from([0]);
    loop {
        let next: BTreeSet<u64> = opens.iter().flat_map(|&o| basis.iter().map(move |&b| o | b)).collect();
        let before = opens.len();
        opens.extend(next);
        if opens.len() == before {
            return opens;
        }
    }
}

fn map_space(s: &MeetSemilattice) -> Result<(Vec<Filter>, u64), StoneError> {
    if s.len() > MAX_MAP_ELEMENTS {
        return Err(StoneError::Input(format!(
            "map enumeration is limited to {MAX_MAP_ELEMENTS} elements, got {}",
            s.len()
        )));
    }
    let filters = all_filters(s);
    let count = 1u64 << filters.len();
    Ok((filters, count))
}

/// Monotone maps `h : Filt(S) → 2` with `h(⋃D) = max_{F∈D} h(F)` for every
/// non-empty directed family `D` of filters whose union is a filter.
pub fn dj_preserving_maps(s: &MeetSemilattice) -> Result<Vec<FilterMap>, StoneError> {
    let (filters, count) = map_space(s)?;
    let k = filters.len();
    let le = |i: usize, j: usize| filters[i].is_subset(filters[j]);
    // (family, position of its union) for each directed family with a
    // filter as union.
    let mut families: Vec<(u64, usize)> = Vec::new();
    for fam in 1u64..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|&i| fam >> i & 1 == 1).collect();
        let directed = idx.iter().all(|&i| idx.iter().all(|&j| idx.iter().any(|&u| le(i, u) && le(j, u))));
        if !directed {
            continue;
        }
        let union = idx.iter().fold(0u32, |m, &i| m | filters[i].0);
        if let Some(pos) = filters.iter().position(|f| f.0 == union) {
            families.push((fam, pos));
        }
    }
    Ok((0..count)
        .map(FilterMap)
        .filter(|h| (0..k).all(|i| (0..k).all(|j| !le(i, j) || !h.value(i) || h.value(j))))
        .filter(|h| families.iter().all(|&(fam, pos)| h.value(pos) == (h.0 & fam != 0)))
        .collect())
}

/// Maps `Filt(S) → 2` for which the preimage of `{1}` is open.
pub fn continuous_maps(s: &MeetSemilattice) -> Result<Vec<FilterMap>, StoneError> {
    let (_, count) = map_space(s)?;
    let opens = filter_opens(s);
    Ok((0..count).filter(|h| opens.contains(h)).map(FilterMap).collect())
}

/// Comparison of the two classes of maps on one semilattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub size: usize,
    pub filters: usize,
    pub opens: usize,
    pub dj_preserving: usize,
    pub continuous: usize,
    pub equal: bool,
    /// Maps (as lists of filters sent to 1, each filter a list of labels)
    /// on one side only.
    pub only_dj_preserving: Vec<Vec<Vec<String>>>,
    pub only_continuous: Vec<Vec<Vec<String>>>,
}

/// Whether directed-join preservation and Sierpiński continuity pick out
/// the same maps `Filt(S) → 2`.
pub fn check_equivalence(s: &MeetSemilattice) -> Result<EquivalenceReport, StoneError> {
    let filters = all_filters(s);
    let dj: BTreeSet<FilterMap> = dj_preserving_maps(s)?.into_iter().collect();
    let cont: BTreeSet<FilterMap> = continuous_maps(s)?.into_iter().collect();
    let render = |h: &FilterMap| -> Vec<Vec<String>> {
        (0..filters.len())
            .filter(|&i| h.value(i))
            .map(|i| filters[i].elements().map(|a| s.label(a).to_string()).collect())
            .collect()
    };
    Ok(EquivalenceReport {
        size: s.len(),
        filters: filters.len(),
        opens: filter_opens(s).len(),
        dj_preserving: dj.len(),
        continuous: cont.len(),
        equal: dj == cont,
        only_dj_preserving: dj.difference(&cont).map(render).collect(),
        only_continuous: cont.difference(&dj).map(render).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stone::all_semilattices;

    fn subsets_satisfying(s: &MeetSemilattice, pred: impl Fn(u32) -> bool) -> Vec<u32> {
        (0u32..(1 << s.len())).filter(|&m| pred(m)).collect()
    }

    #[test]
    fn filters_of_small_lattices() {
        assert_eq!(all_filters(&MeetSemilattice::chain(1)), vec![Filter(0b1)]);
        // 2-chain 0 < 1: {1} and {0,1}.
        assert_eq!(all_filters(&MeetSemilattice::chain(2)), vec![Filter(0b10), Filter(0b11)]);
        // Diamond: oracle by the definition, written out independently.
        let d = MeetSemilattice::diamond();
        let oracle = subsets_satisfying(&d, |m| {
            let has = |a: usize| m >> a & 1 == 1;
            m != 0
                && (0..4).all(|a| (0..4).all(|b| !(has(a) && d.leq(a, b)) || has(b)))
                && (0..4).all(|a| (0..4).all(|b| !(has(a) && has(b)) || has(d.meet(a, b))))
        });
        assert_eq!(all_filters(&d).into_iter().map(|f| f.0).collect::<Vec<_>>(), oracle);
        assert_eq!(oracle.len(), 4);
    }

    #[test]
    fn ideals_with_the_empty_one() {
        assert_eq!(all_ideals(&MeetSemilattice::chain(1)), vec![0, 0b1]);
        assert_eq!(all_ideals(&MeetSemilattice::chain(2)), vec![0, 0b1, 0b11]);
        for s in all_semilattices(4) {
            let ideals = all_ideals(&s);
            for a in 0..s.len() {
                assert!(ideals.contains(&s.down(a)));
            }
        }
    }

    #[test]
    fn two_chain_maps_and_opens() {
        let c = MeetSemilattice::chain(2);
        // Filters in order: {1} (position 0), {0,1} (position 1).
        assert_eq!(filter_opens(&c), BTreeSet::from([0b00, 0b10, 0b11]));
        let dj = dj_preserving_maps(&c).unwrap();
        assert!(dj.contains(&FilterMap(0b10)), "only the improper filter to 1");
        assert!(dj.contains(&FilterMap(0)) && dj.contains(&FilterMap(0b11)));
        assert!(!dj.contains(&FilterMap(0b01)), "not monotone");
        assert_eq!(continuous_maps(&c).unwrap(), dj);
    }

    #[test]
    fn subbasic_indicators_are_continuous() {
        for s in all_semilattices(4) {
            let filters = all_filters(&s);
            let cont = continuous_maps(&s).unwrap();
            for a in 0..s.len() {
                let ind = filters.iter().enumerate().filter(|(_, f)| f.contains(a)).fold(0, |m, (i, _)| m | 1 << i);
                assert!(cont.contains(&FilterMap(ind)));
            }
        }
    }

    #[test]
    fn equivalence_holds_up_to_five_elements() {
        for s in all_semilattices(5) {
            let r = check_equivalence(&s).unwrap();
            assert!(r.equal, "{r:?}");
        }
    }

    /// Opens of Filt(S) correspond to lower sets of S; directed lower sets
    /// (ideals) only account for all of them when S is a chain.
    #[test]
    fn opens_match_lower_sets_not_ideals() {
        for s in all_semilattices(5) {
            let opens = filter_opens(&s).len();
            assert_eq!(opens, lower_sets(&s).len());
            let is_chain = (0..s.len()).all(|a| (0..s.len()).all(|b| s.leq(a, b) || s.leq(b, a)));
            assert_eq!(all_ideals(&s).len() == opens, is_chain);
        }
        let d = MeetSemilattice::diamond();
        assert_eq!((all_ideals(&d).len(), filter_opens(&d).len()), (5, 6));
    }

    #[test]
    fn principal_filters_are_least_in_their_subbasic() {
        for s in all_semilattices(5) {
            let filters = all_filters(&s);
            for a in 0..s.len() {
                let in_ba: Vec<Filter> = filters.iter().copied().filter(|f| f.contains(a)).collect();
                let least = in_ba.iter().copied().find(|f| in_ba.iter().all(|g| f.is_subset(*g))).unwrap();
                assert_eq!(least.0, s.up(a));
            }
            // Every filter arises this way.
            for f in &filters {
                assert!((0..s.len()).any(|a| s.up(a) == f.0));
            }
        }
    }
}
