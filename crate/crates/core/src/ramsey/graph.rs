//! Simple graphs on at most 64 vertices, stored as adjacency bitsets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::RamseyError;

pub const MAX_ORDER: u32 = 64;

#[inline]
fn bit(v: u32) -> u64 {
    1u64 << v
}

fn all_bits(order: u32) -> u64 {
    if order == 64 {
        u64::MAX
    } else {
        bit(order) - 1
    }
}

/// Blue edges of a two-coloring of the pairs of `0..order`; non-edges are red.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WitnessFile", into = "WitnessFile")]
pub struct WitnessGraph {
    order: u32,
    adj: Vec<u64>,
}

/// On-disk shape: `{"n": 5, "order": 13, "edges": [[0,1], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub order: u32,
    pub edges: Vec<[u32; 2]>,
}

impl TryFrom<WitnessFile> for WitnessGraph {
    type Error = RamseyError;

    fn try_from(f: WitnessFile) -> Result<Self, RamseyError> {
        WitnessGraph::from_edges(f.order, &f.edges)
    }
}

impl From<WitnessGraph> for WitnessFile {
    fn from(g: WitnessGraph) -> Self {
        WitnessFile { n: None, order: g.order, edges: g.edges() }
    }
}

impl WitnessGraph {
    pub fn empty(order: u32) -> Result<Self, RamseyError> {
        if order > MAX_ORDER {
            return Err(RamseyError::InvalidGraph(format!("order {order} exceeds {MAX_ORDER}")));
        }
        Ok(Self { order, adj: vec![0; order as usize] })
    }

    /// Rejects loops, duplicate pairs and out-of-range vertices.
    pub fn from_edges(order: u32, edges: &[[u32; 2]]) -> Result<Self, RamseyError> {
        let mut g = Self::empty(order)?;
        for &[u, v] in edges {
            if u >= order || v >= order {
                return Err(RamseyError::InvalidGraph(format!("edge [{u},{v}] outside 0..{order}")));
            }
            if u == v {
                return Err(RamseyError::InvalidGraph(format!("loop at {u}")));
            }
            if g.has_edge(u, v) {
                return Err(RamseyError::InvalidGraph(format!("duplicate edge [{u},{v}]")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub(crate) fn from_adjacency(order: u32, adj: Vec<u64>) -> Self {
        debug_assert_eq!(adj.len(), order as usize);
        Self { order, adj }
    }

    /// Circulant graph: `i ~ j` iff `j - i` is congruent to `±d` for some listed `d`.
    pub fn circulant(order: u32, distances: &[u32]) -> Result<Self, RamseyError> {
        let mut g = Self::empty(order)?;
        for i in 0..order {
            for &d in distances {
                let d = d % order.max(1);
                if d == 0 {
                    continue;
                }
                let j = (i + d) % order;
                if !g.has_edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u < self.order && v < self.order && self.adj[u as usize] & bit(v) != 0
    }

    pub(crate) fn add_edge(&mut self, u: u32, v: u32) {
        self.adj[u as usize] |= bit(v);
        self.adj[v as usize] |= bit(u);
    }

    pub fn remove_edge(&mut self, u: u32, v: u32) -> bool {
        let had = self.has_edge(u, v);
        if had {
            self.adj[u as usize] &= !bit(v);
            self.adj[v as usize] &= !bit(u);
        }
        had
    }

    pub fn neighbors(&self, v: u32) -> u64 {
        self.adj[v as usize]
    }

    pub(crate) fn adjacency(&self) -> &[u64] {
        &self.adj
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.adj[v as usize].count_ones()
    }

    /// Sorted degree sequence.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = (0..self.order).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `[u, v]` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<[u32; 2]> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.order {
            let mut rest = self.adj[u as usize] & !all_bits(u + 1);
            while rest != 0 {
                let v = rest.trailing_zeros();
                out.push([u, v]);
                rest &= rest - 1;
            }
        }
        out
    }

    pub fn find_triangle(&self) -> Option<[u32; 3]> {
        for [u, v] in self.edges() {
            let common = self.adj[u as usize] & self.adj[v as usize] & !all_bits(v + 1);
            if common != 0 {
                return Some([u, v, common.trailing_zeros()]);
            }
        }
        None
    }

    pub fn is_independent(&self, vertices: &[u32]) -> bool {
        let mask = vertices.iter().fold(0u64, |m, &v| m | bit(v));
        vertices.iter().all(|&v| v < self.order && self.adj[v as usize] & mask == 0)
    }

    /// An independent set of exactly `k` vertices, lexicographically first.
    pub fn find_independent_set(&self, k: u32) -> Option<Vec<u32>> {
        self.independent_within(all_bits(self.order), k)
    }

    pub(crate) fn independent_within(&self, candidates: u64, k: u32) -> Option<Vec<u32>> {
        let mut chosen = Vec::with_capacity(k as usize);
        self.grow_independent(candidates, k, &mut chosen).then_some(chosen)
    }

    fn grow_independent(&self, mut candidates: u64, k: u32, chosen: &mut Vec<u32>) -> bool {
        if chosen.len() as u32 == k {
            return true;
        }
        while candidates != 0 {
            if chosen.len() as u32 + candidates.count_ones() < k {
                return false;
            }
            let v = candidates.trailing_zeros();
            candidates &= !bit(v);
            chosen.push(v);
            if self.grow_independent(candidates & !self.adj[v as usize], k, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    pub fn independence_number(&self) -> u32 {
        let mut k = 0;
        while k < self.order && self.find_independent_set(k + 1).is_some() {
            k += 1;
        }
        k
    }

    /// The graph with vertex `perm[v]` playing the role of old vertex `v`.
    pub fn relabel(&self, perm: &[u32]) -> Result<Self, RamseyError> {
        let seen: BTreeSet<u32> = perm.iter().copied().collect();
        if perm.len() != self.order as usize || seen.len() != perm.len() || seen.iter().any(|&v| v >= self.order) {
            return Err(RamseyError::InvalidGraph("relabeling is not a permutation".into()));
        }
        let mut g = Self::empty(self.order)?;
        for [u, v] in self.edges() {
            g.add_edge(perm[u as usize], perm[v as usize]);
        }
        Ok(g)
    }

    /// Subgraph induced on `0..order`.
    pub fn prefix(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mask = all_bits(order);
        Self { order, adj: self.adj[..order as usize].iter().map(|a| a & mask).collect() }
    }
}
