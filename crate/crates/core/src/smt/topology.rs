//! Full Steiner topologies by successive edge insertion.
//!
//! Start from the star on leaves 0, 1, 2. Leaf `k` (for `k >= 3`) is attached
//! by subdividing one of the `2k - 3` edges of the current tree with a new
//! Steiner point. Every full topology on `n` labelled leaves arises from
//! exactly one sequence of choices, giving `(2n - 5)!!` topologies; the
//! sequence of edge indices is the topology's code, and codes in
//! lexicographic order define the canonical enumeration order.

use crate::error::{Error, Result};

use super::SteinerTopology;

pub const MIN_ENUMERATE: usize = 3;
/// Hard cap for listing every topology.
pub const MAX_ENUMERATE: usize = 8;

/// `(2n - 5)!!` for `n >= 3`.
pub fn full_topology_count(n: usize) -> u64 {
    (3..=n).map(|k| (2 * k - 5) as u64).product()
}

/// Edge list of a partial topology, leaves `0..k`, Steiner ids from `first_steiner`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Growing {
    pub edges: Vec<(usize, usize)>,
    pub leaves: usize,
    pub first_steiner: usize,
}

impl Growing {
    pub fn star(first_steiner: usize) -> Self {
        let s = first_steiner;
        Growing { edges: vec![(0, s), (1, s), (2, s)], leaves: 3, first_steiner }
    }

    pub fn steiner_count(&self) -> usize {
        self.leaves - 2
    }

    /// Attaches the next leaf on edge `e`.
    pub fn insert(&self, e: usize) -> Growing {
        let leaf = self.leaves;
        let s = self.first_steiner + self.steiner_count();
        let mut edges = self.edges.clone();
        let (a, b) = edges[e];
        edges[e] = (a, s);
        edges.push((s, b));
        edges.push((leaf, s));
        Growing { edges, leaves: leaf + 1, first_steiner: self.first_steiner }
    }
}

/// Topology from an insertion code over `n = code.len() + 3` leaves, with
/// Steiner ids starting at `n`.
pub fn topology_from_code(code: &[usize]) -> Result<SteinerTopology> {
    let n = code.len() + 3;
    let mut g = Growing::star(n);
    for &e in code {
        if e >= g.edges.len() {
            return Err(Error::InvalidSpec(format!("insertion code entry {e} out of range")));
        }
        g = g.insert(e);
    }
    Ok(SteinerTopology { terminals: n, steiner: n - 2, foot: false, edges: g.edges })
}

/// All full topologies on `n` terminals, `3 <= n <= 8`, in code order.
pub fn enumerate_topologies(n: usize) -> Result<Vec<SteinerTopology>> {
    if !(MIN_ENUMERATE..=MAX_ENUMERATE).contains(&n) {
        return Err(Error::TerminalCap { n, min: MIN_ENUMERATE, max: MAX_ENUMERATE });
    }
    let mut level = vec![Growing::star(n)];
    for _ in 3..n {
        level = level
            .iter()
            .flat_map(|g| (0..g.edges.len()).map(move |e| g.insert(e)))
            .collect();
    }
    Ok(level
        .into_iter()
        .map(|g| SteinerTopology { terminals: n, steiner: n - 2, foot: false, edges: g.edges })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    #[test]
    fn double_factorial_counts() {
        let expected = [1, 3, 15, 105, 945, 10395];
        for (n, &c) in (3..=8).zip(&expected) {
            assert_eq!(full_topology_count(n), c);
            assert_eq!(enumerate_topologies(n).unwrap().len() as u64, c, "n = {n}");
        }
    }

    #[test]
    fn range_is_enforced() {
        for n in [0, 2, 9] {
            assert!(matches!(enumerate_topologies(n), Err(Error::TerminalCap { .. })));
        }
    }

    #[test]
    fn topologies_are_full_and_distinct() {
        for n in 3..=6 {
            let all = enumerate_topologies(n).unwrap();
            let mut seen = BTreeSet::new();
            for t in &all {
                t.check_full().unwrap();
                // canonical form: sorted set of leaf bipartitions induced by edges
                seen.insert(t.splits());
            }
            assert_eq!(seen.len(), all.len(), "duplicate topology for n = {n}");
        }
    }

    #[test]
    fn code_roundtrip() {
        let all = enumerate_topologies(5).unwrap();
        let t = topology_from_code(&[2, 4]).unwrap();
        assert_eq!(all[2 * 5 + 4], t);
        assert!(topology_from_code(&[3]).is_err());
    }
}
