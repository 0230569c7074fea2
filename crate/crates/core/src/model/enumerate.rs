//! Enumeration of finite models up to isomorphism.
//!
//! For each vector of carrier sizes the interpretations of all symbols are
//! flattened into a digit string (one bit per potential relation fact, one
//! digit per function argument tuple). A candidate is kept only if its digit
//! string is lexicographically least among all of its images under
//! permutations of the carriers, which picks exactly one representative from
//! every isomorphism class. Survivors are then checked against the axioms.

use std::collections::VecDeque;
use std::sync::Arc;

use super::eval::for_each_assignment;
use super::{satisfies_theory, Structure};
use crate::logic::{Signature, Theory};
use crate::names::{Elem, Sort, Sym};

/// Lazily streams the models of `t` with at most `bound` elements per sort,
/// one per isomorphism class, ordered by size vector and then by encoding.
pub fn enumerate_models(t: &Theory, bound: usize) -> ModelEnumerator {
    ModelEnumerator::new(t, bound)
}

/// Number of raw candidate structures the enumerator will visit (saturating).
pub fn search_space(sig: &Signature, bound: usize) -> u128 {
    let sorts: Vec<&Sort> = sig.sorts().collect();
    let mut total: u128 = 0;
    for sizes in size_vectors(sorts.len(), bound) {
        let size_of = |s: &Sort| sizes[sorts.iter().position(|x| *x == s).unwrap()] as u128;
        let mut space: u128 = 1;
        for (_, arity) in sig.relations() {
            let tuples: u128 = arity.iter().map(size_of).product();
            space = space.saturating_mul(if tuples >= 127 { u128::MAX } else { 1u128 << tuples });
        }
        for (_, ty) in sig.functions() {
            let tuples: u128 = ty.args.iter().map(size_of).product();
            let res = size_of(&ty.result);
            space = space.saturating_mul(res.checked_pow(tuples.min(u32::MAX as u128) as u32).unwrap_or(u128::MAX));
        }
        total = total.saturating_add(space);
    }
    total
}

fn size_vectors(sorts: usize, bound: usize) -> Vec<Vec<usize>> {
    let domains: Vec<Vec<usize>> = (0..sorts).map(|_| (0..=bound).collect()).collect();
    let mut out = Vec::new();
    for_each_assignment(&domains, |v| out.push(v.to_vec()));
    if sorts == 0 {
        out.push(Vec::new());
    }
    out
}

struct Layout {
    sym: Sym,
    is_function: bool,
    /// Sort indices of the arguments.
    args: Vec<usize>,
    /// Sort index of the result (functions only).
    result: usize,
    /// Argument tuples as index vectors, in lexicographic order.
    tuples: Vec<Vec<usize>>,
    offset: usize,
}

struct Permutation {
    /// Digit `k` of the permuted encoding reads original digit `src[k]`...
    src: Vec<usize>,
    /// ...relabelled through this per-sort map when it is a function value.
    per_sort: Vec<Vec<u32>>,
}

struct SizeSpace {
    names: Vec<Vec<Elem>>,
    layouts: Vec<Layout>,
    radix: Vec<u32>,
    value_sort: Vec<Option<usize>>,
    perms: Vec<Permutation>,
    digits: Vec<u32>,
    started: bool,
    done: bool,
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, used: &mut Vec<bool>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i as u32);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn tuple_index(t: &[usize], sizes: &[usize]) -> usize {
    t.iter().zip(sizes).fold(0, |acc, (&i, &n)| acc * n + i)
}

impl SizeSpace {
    fn new(sig: &Signature, sizes: &[usize]) -> Option<SizeSpace> {
        let sorts: Vec<Sort> = sig.sorts().cloned().collect();
        let idx = |s: &Sort| sorts.iter().position(|x| x == s).unwrap();
        let names: Vec<Vec<Elem>> =
            sizes.iter().map(|&n| (0..n).map(|i| Elem::new(format!("e{i}"))).collect()).collect();
        let mut layouts = Vec::new();
        let mut radix = Vec::new();
        let mut value_sort = Vec::new();
        let mut push_layout = |sym: &Sym, args: Vec<usize>, result: Option<usize>| -> bool {
            let domains: Vec<Vec<usize>> = args.iter().map(|&s| (0..sizes[s]).collect()).collect();
            let mut tuples = Vec::new();
            for_each_assignment(&domains, |t| tuples.push(t.to_vec()));
            if args.is_empty() {
                tuples = vec![Vec::new()];
            }
            let base = match result {
                Some(r) => sizes[r] as u32,
                None => 2,
            };
            if base == 0 && !tuples.is_empty() {
                return false;
            }
            let offset = radix.len();
            radix.extend(std::iter::repeat_n(base, tuples.len()));
            value_sort.extend(std::iter::repeat_n(result, tuples.len()));
            layouts.push(Layout {
                sym: sym.clone(),
                is_function: result.is_some(),
                args,
                result: result.unwrap_or(0),
                tuples,
                offset,
            });
            true
        };
        for (r, arity) in sig.relations() {
            push_layout(r, arity.iter().map(idx).collect(), None);
        }
        for (f, ty) in sig.functions() {
            if !push_layout(f, ty.args.iter().map(idx).collect(), Some(idx(&ty.result))) {
                return None;
            }
        }

        let per_sort_perms: Vec<Vec<Vec<u32>>> = sizes.iter().map(|&n| permutations(n)).collect();
        let mut perms = Vec::new();
        let mut first = true;
        for_each_assignment(&per_sort_perms, |choice| {
            if first {
                // the identity comes first in lexicographic order
                first = false;
                return;
            }
            let inverse: Vec<Vec<usize>> = choice
                .iter()
                .map(|p| {
                    let mut inv = vec![0; p.len()];
                    for (i, &v) in p.iter().enumerate() {
                        inv[v as usize] = i;
                    }
                    inv
                })
                .collect();
            let mut src = vec![0; radix.len()];
            for l in &layouts {
                let arg_sizes: Vec<usize> = l.args.iter().map(|&s| sizes[s]).collect();
                for (k, t) in l.tuples.iter().enumerate() {
                    let pre: Vec<usize> = t.iter().zip(&l.args).map(|(&i, &s)| inverse[s][i]).collect();
                    src[l.offset + k] = l.offset + tuple_index(&pre, &arg_sizes);
                }
            }
            perms.push(Permutation { src, per_sort: choice.to_vec() });
        });
        let digits = vec![0; radix.len()];
        Some(SizeSpace { names, layouts, radix, value_sort, perms, digits, started: false, done: false })
    }

    /// Advances the odometer; false once every digit string has been visited.
    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            return true;
        }
        let mut k = self.digits.len();
        while k > 0 {
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.radix[k] {
                return true;
            }
            self.digits[k] = 0;
        }
        false
    }

    fn is_canonical(&self) -> bool {
        let d = &self.digits;
        'perms: for p in &self.perms {
            for k in 0..d.len() {
                let raw = d[p.src[k]];
                let v = match self.value_sort[k] {
                    Some(s) => p.per_sort[s][raw as usize],
                    None => raw,
                };
                if v < d[k] {
                    return false;
                }
                if v > d[k] {
                    continue 'perms;
                }
            }
        }
        true
    }

    fn build(&self, sig: &Arc<Signature>) -> Structure {
        let sorts: Vec<Sort> = sig.sorts().cloned().collect();
        let mut m = Structure::empty(sig.clone());
        for (s, names) in sorts.iter().zip(&self.names) {
            for e in names {
                m.add_element(s, e.clone()).expect("declared sort");
            }
        }
        for l in &self.layouts {
            for (k, t) in l.tuples.iter().enumerate() {
                let digit = self.digits[l.offset + k];
                let tuple: Vec<Elem> = t.iter().zip(&l.args).map(|(&i, &s)| self.names[s][i].clone()).collect();
                if l.is_function {
                    let value = self.names[l.result][digit as usize].clone();
                    m.set_function(&l.sym, tuple, value).expect("well-typed");
                } else if digit == 1 {
                    m.add_fact(&l.sym, tuple).expect("well-typed");
                }
            }
        }
        m
    }
}

/// Iterator returned by [`enumerate_models`].
pub struct ModelEnumerator {
    theory: Theory,
    signature: Arc<Signature>,
    sizes: VecDeque<Vec<usize>>,
    current: Option<SizeSpace>,
}

impl ModelEnumerator {
    fn new(t: &Theory, bound: usize) -> Self {
        let sorts = t.signature.sorts().count();
        ModelEnumerator {
            theory: t.clone(),
            signature: Arc::new(t.signature.clone()),
            sizes: size_vectors(sorts, bound).into(),
            current: None,
        }
    }
}

impl Iterator for ModelEnumerator {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        loop {
            if self.current.as_ref().is_none_or(|c| c.done) {
                let sizes = self.sizes.pop_front()?;
                self.current = SizeSpace::new(&self.signature, &sizes);
                continue;
            }
            let space = self.current.as_mut().unwrap();
            if !space.advance() {
                space.done = true;
                continue;
            }
            if !space.is_canonical() {
                continue;
            }
            let m = space.build(&self.signature);
            if satisfies_theory(&m, &self.theory).expect("theory over the model's signature") {
                return Some(m);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_theory;
    use crate::model::{find_homs, Homomorphism};

    fn count(src: &str, bound: usize) -> usize {
        enumerate_models(&parse_theory(src).unwrap(), bound).count()
    }

    fn isomorphic(a: &Arc<Structure>, b: &Arc<Structure>) -> bool {
        if a.size() != b.size() || a.fact_count() != b.fact_count() {
            return false;
        }
        // a bijective homomorphism between structures with equally many facts
        // reflects facts as well
        find_homs(a, b, &[]).any(|h: Homomorphism| h.is_injective() && h.is_surjective())
    }

    #[test]
    fn empty_theory_one_sort() {
        assert_eq!(count("sort A;", 1), 2);
        assert_eq!(count("sort A;", 3), 4);
    }

    #[test]
    fn one_unary_relation() {
        assert_eq!(count("sort A; rel P(A);", 1), 3);
        // subsets of an n-set up to permutation: n+1 per size
        assert_eq!(count("sort A; rel P(A);", 3), 1 + 2 + 3 + 4);
    }

    #[test]
    fn transitive_relations_match_a_brute_force_oracle() {
        let t = parse_theory("sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);").unwrap();
        let models: Vec<Arc<Structure>> = enumerate_models(&t, 2).map(Arc::new).collect();
        // Oracle: all 2^4 relation tables on {0,1}, filtered by transitivity,
        // grouped into classes under the swap 0<->1; plus sizes 0 and 1.
        let mut classes = std::collections::BTreeSet::new();
        for code in 0u32..16 {
            let r = |i: usize, j: usize| code >> (i * 2 + j) & 1 == 1;
            let transitive = (0..2).all(|i| (0..2).all(|j| (0..2).all(|k| !(r(i, j) && r(j, k)) || r(i, k))));
            if transitive {
                let swapped = (0..4).fold(0u32, |acc, b| {
                    let (i, j) = (b / 2, b % 2);
                    acc | ((r(1 - i, 1 - j) as u32) << b)
                });
                classes.insert(code.min(swapped));
            }
        }
        let expected = 1 + 2 + classes.len();
        assert_eq!(models.len(), expected);
        for i in 0..models.len() {
            for j in (i + 1)..models.len() {
                assert!(!isomorphic(&models[i], &models[j]));
            }
        }
    }

    #[test]
    fn canonical_forms_agree_with_pairwise_iso_search() {
        let t = parse_theory("sort A; sort B; rel S(A,B); fun g(A): B;").unwrap();
        let models: Vec<Arc<Structure>> = enumerate_models(&t, 2).map(Arc::new).collect();
        for i in 0..models.len() {
            for j in (i + 1)..models.len() {
                assert!(!isomorphic(&models[i], &models[j]), "{:?} ~ {:?}", models[i], models[j]);
            }
        }
        // every raw structure on carriers {e0,e1} x {e0} is isomorphic to a listed one
        let sig = Arc::new(t.signature.clone());
        let (a, b) = (Sort::new("A"), Sort::new("B"));
        for bits in 0..4u32 {
            let mut m = Structure::empty(sig.clone());
            for e in ["e0", "e1"] {
                m.add_element(&a, Elem::new(e)).unwrap();
            }
            m.add_element(&b, Elem::new("e0")).unwrap();
            for (k, e) in ["e0", "e1"].iter().enumerate() {
                m.set_function(&Sym::new("g"), vec![Elem::new(e)], Elem::new("e0")).unwrap();
                if bits >> k & 1 == 1 {
                    m.add_fact(&Sym::new("S"), vec![Elem::new(e), Elem::new("e0")]).unwrap();
                }
            }
            let m = Arc::new(m);
            assert_eq!(models.iter().filter(|n| isomorphic(&m, n)).count(), 1);
        }
    }

    #[test]
    fn functions_into_empty_sorts() {
        // constants force the result sort to be inhabited
        assert_eq!(count("sort A; const c: A;", 2), 2);
        assert_eq!(count("sort A; sort B; fun f(A): B;", 1), 3);
    }

    #[test]
    fn search_space_counts_raw_candidates() {
        let t = parse_theory("sort A; rel R(A,A);").unwrap();
        assert_eq!(search_space(&t.signature, 2), 1 + 2 + 16);
    }
}
