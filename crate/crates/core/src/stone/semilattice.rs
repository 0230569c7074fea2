use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoneError {
    #[error("not a partial order: {0}")]
    NotAnOrder(String),
    #[error("not a meet-semilattice with top: {0}")]
    NotASemilattice(String),
    #[error("bad input: {0}")]
    Input(String),
}

/// A finite meet-semilattice with top on the elements `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MeetSemilattice {
    labels: Vec<String>,
    /// `leq[i][j]` iff `i ≤ j`.
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    top: usize,
}

impl MeetSemilattice {
    /// Validates an order matrix and derives meets and the top element.
    pub fn from_order(leq: Vec<Vec<bool>>) -> Result<Self, StoneError> {
        let labels = (0..leq.len()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, leq)
    }

    pub fn with_labels(labels: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, StoneError> {
        let n = leq.len();
        if n == 0 {
            return Err(StoneError::NotASemilattice("a top element needs a non-empty carrier".into()));
        }
        if labels.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(StoneError::Input("order matrix must be square and match the labels".into()));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(StoneError::NotAnOrder(format!("{} ≰ {}", labels[i], labels[i])));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(StoneError::NotAnOrder(format!(
                        "{} and {} are distinct but equivalent",
                        labels[i], labels[j]
                    )));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(StoneError::NotAnOrder(format!(
                            "transitivity fails at {}, {}, {}",
                            labels[i], labels[j], labels[k]
                        )));
                    }
                }
            }
        }
        let top = (0..n)
            .find(|&t| (0..n).all(|i| leq[i][t]))
            .ok_or_else(|| StoneError::NotASemilattice("no greatest element".into()))?;
        let mut meet = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&k| leq[k][i] && leq[k][j]).collect();
                meet[i][j] = *lower.iter().find(|&&g| lower.iter().all(|&k| leq[k][g])).ok_or_else(|| {
                    StoneError::NotASemilattice(format!("{} and {} have no meet", labels[i], labels[j]))
                })?;
            }
        }
        Ok(MeetSemilattice { labels, leq, meet, top })
    }

    /// Reads `{"order": [[..]], "labels": [..]}`; matrix entries are booleans
    /// or 0/1, with `order[i][j]` meaning `i ≤ j`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, StoneError> {
        let rows = v
            .get("order")
            .and_then(|o| o.as_array())
            .ok_or_else(|| StoneError::Input("missing `order` matrix".into()))?;
        let mut leq = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| StoneError::Input("matrix rows must be arrays".into()))?;
            let parsed: Option<Vec<bool>> =
                row.iter().map(|x| x.as_bool().or_else(|| x.as_u64().filter(|&k| k <= 1).map(|k| k == 1))).collect();
            leq.push(parsed.ok_or_else(|| StoneError::Input("matrix entries must be booleans or 0/1".into()))?);
        }
        match v.get("labels") {
            None => Self::from_order(leq),
            Some(l) => {
                let labels: Option<Vec<String>> =
                    l.as_array().map(|a| a.iter().map(|x| x.as_str().map(str::to_string)).collect()).unwrap_or(None);
                Self::with_labels(labels.ok_or_else(|| StoneError::Input("labels must be strings".into()))?, leq)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "labels": self.labels,
            "order": self.leq.iter().map(|r| r.iter().map(|&b| b as u8).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_order((0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect()).expect("chains are lattices")
    }

    /// The four-element lattice `0 < a, b < 1`, as `0, a, b, 1`.
    pub fn diamond() -> Self {
        let leq = [[1, 1, 1, 1], [0, 1, 0, 1], [0, 0, 1, 1], [0, 0, 0, 1]];
        Self::with_labels(
            ["0", "a", "b", "1"].map(String::from).to_vec(),
            leq.iter().map(|r| r.iter().map(|&x| x == 1).collect()).collect(),
        )
        .expect("the diamond is a lattice")
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// `↑a` as a bitmask.
    pub fn up(&self, a: usize) -> u32 {
        (0..self.len()).filter(|&j| self.leq[a][j]).fold(0, |m, j| m | 1 << j)
    }

    /// `↓a` as a bitmask.
    pub fn down(&self, a: usize) -> u32 {
        (0..self.len()).filter(|&j| self.leq[j][a]).fold(0, |m, j| m | 1 << j)
    }

    /// An isomorphism-invariant code: the least row-major order matrix over
    /// all relabellings.
    fn canonical_code(&self) -> Vec<bool> {
        let n = self.len();
        let mut best: Option<Vec<bool>> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        permutations(&mut perm, 0, &mut |p| {
            let code: Vec<bool> =
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.leq[p[i]][p[j]]).collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        });
        best.unwrap_or_default()
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Every meet-semilattice with top of size `1..=max`, one per isomorphism
/// class, ordered by size and then by canonical code.
///
/// Orders are generated on naturally labelled carriers (`i ≤ j` only if
/// `i ≤ j` as numbers), which reaches every isomorphism class since every
/// finite poset has a linear extension.
pub fn all_semilattices(max: usize) -> Vec<MeetSemilattice> {
    let mut out = Vec::new();
    for n in 1..=max {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
        let mut found = Vec::new();
        for mask in 0u64..(1 << pairs.len()) {
            let mut leq = vec![vec![false; n]; n];
            for (i, row) in leq.iter_mut().enumerate() {
                row[i] = true;
            }
            for (b, &(i, j)) in pairs.iter().enumerate() {
                leq[i][j] = mask >> b & 1 == 1;
            }
            let Ok(s) = MeetSemilattice::from_order(leq) else { continue };
            let code = s.canonical_code();
            if seen.insert(code.clone()) {
                found.push((code, s));
            }
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        out.extend(found.into_iter().map(|(_, s)| s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_up_to_isomorphism() {
        let all = all_semilattices(5);
        let counts: Vec<usize> = (1..=5).map(|n| all.iter().filter(|s| s.len() == n).count()).collect();
        // A finite meet-semilattice with top is a lattice; lattices on
        // 1..5 elements number 1, 1, 1, 2, 5.
        assert_eq!(counts, [1, 1, 1, 2, 5]);
    }

    #[test]
    fn rejects_non_orders_and_missing_meets() {
        assert!(matches!(
            MeetSemilattice::from_order(vec![vec![true, true], vec![true, true]]),
            Err(StoneError::NotAnOrder(_))
        ));
        // Two incomparable elements: no top.
        assert!(matches!(
            MeetSemilattice::from_order(vec![vec![true, false], vec![false, true]]),
            Err(StoneError::NotASemilattice(_))
        ));
        // a, b < c, d < top: c and d share the lower bounds a and b but
        // have no greatest one.
        let leq = [[1, 0, 1, 1, 1], [0, 1, 1, 1, 1], [0, 0, 1, 0, 1], [0, 0, 0, 1, 1], [0, 0, 0, 0, 1]];
        let leq: Vec<Vec<bool>> = leq.iter().map(|r| r.iter().map(|&x| x == 1).collect()).collect();
        assert!(matches!(MeetSemilattice::from_order(leq), Err(StoneError::NotASemilattice(_))));
    }

    #[test]
    fn json_round_trip() {
        let d = MeetSemilattice::diamond();
        let back = MeetSemilattice::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert_eq!(d.meet(1, 2), 0);
        assert_eq!(d.top(), 3);
        let v = serde_json::json!({"order": [[1, 1], [0, 1]]});
        assert_eq!(MeetSemilattice::from_json(&v).unwrap().len(), 2);
        assert!(MeetSemilattice::from_json(&serde_json::json!({"order": [[2]]})).is_err());
    }
}
