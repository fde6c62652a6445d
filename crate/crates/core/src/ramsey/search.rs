//! Exhaustive computation of `R(n,3)` for tiny `n` by growing triangle-free
//! graphs one vertex at a time, keeping one representative per isomorphism class.

use std::collections::BTreeMap;

use super::graph::WitnessGraph;

/// Largest order `canonical_code` accepts; 66 pair bits do not fit, 55 do.
pub const CANON_MAX_ORDER: u32 = 11;

fn pair_index(p: u32, q: u32) -> u32 {
    // Column-major over p < q.
    q * (q - 1) / 2 + p
}

fn code_of(adj: &[u64], perm: &[u32]) -> u64 {
    let mut code = 0u64;
    for q in 1..perm.len() as u32 {
        let row = adj[perm[q as usize] as usize];
        for p in 0..q {
            if row >> perm[p as usize] & 1 == 1 {
                code |= 1 << pair_index(p, q);
            }
        }
    }
    code
}

/// Equitable refinement starting from the all-equal coloring. The colors are
/// ranks of isomorphism-invariant signatures, so cell order is canonical too.
fn refine(adj: &[u64], order: usize) -> Vec<usize> {
    let mut color = vec![0usize; order];
    let mut classes = 1;
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..order)
            .map(|v| {
                let mut nb: Vec<usize> = (0..order).filter(|&u| adj[v] >> u & 1 == 1).map(|u| color[u]).collect();
                nb.sort_unstable();
                (color[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
        color = next;
        if distinct.len() == classes {
            return color;
        }
        classes = distinct.len();
    }
}

/// Minimum adjacency code over all labelings that respect the refined cells.
pub fn canonical_code(g: &WitnessGraph) -> u64 {
    let order = g.order() as usize;
    assert!(g.order() <= CANON_MAX_ORDER, "canonical_code supports order <= {CANON_MAX_ORDER}");
    let adj = g.adjacency();
    let color = refine(adj, order);
    let mut slots: Vec<usize> = color.clone();
    slots.sort_unstable();
    let mut perm = Vec::with_capacity(order);
    let mut used = vec![false; order];
    let mut best = u64::MAX;
    fn go(adj: &[u64], color: &[usize], slots: &[usize], perm: &mut Vec<u32>, used: &mut [bool], best: &mut u64) {
        let pos = perm.len();
        if pos == slots.len() {
            *best = (*best).min(code_of(adj, perm));
            return;
        }
        for v in 0..slots.len() {
            if !used[v] && color[v] == slots[pos] {
                used[v] = true;
                perm.push(v as u32);
                go(adj, color, slots, perm, used, best);
                perm.pop();
                used[v] = false;
            }
        }
    }
    go(adj, &color, &slots, &mut perm, &mut used, &mut best);
    if order == 0 {
        0
    } else {
        best
    }
}

/// Representatives of all triangle-free graphs on `order` vertices with no
/// independent set of size `n`, for each order until none exist. Returns
/// the levels, the last one empty.
pub fn triangle_free_levels(n: u32) -> Vec<Vec<WitnessGraph>> {
    let max_degree = n.saturating_sub(1);
    let mut levels = vec![vec![WitnessGraph::empty(0).unwrap()]];
    loop {
        let current = levels.last().unwrap();
        if current.is_empty() {
            return levels;
        }
        let order = current[0].order();
        assert!(order < CANON_MAX_ORDER, "search exceeded supported order");
        let mut next: BTreeMap<u64, WitnessGraph> = BTreeMap::new();
        for g in current {
            let full = if order == 0 { 0 } else { u64::MAX >> (64 - order) };
            let open: u64 = (0..order).filter(|&v| g.degree(v) < max_degree).fold(0, |m, v| m | 1 << v);
            for nbhd in subsets_of(open) {
                if nbhd.count_ones() > max_degree || !g.is_independent(&bits_to_vec(nbhd)) {
                    continue;
                }
                // New independent sets all contain the new vertex plus a set
                // avoiding its neighborhood.
                if n >= 1 && g.independent_within(full & !nbhd, n - 1).is_some() {
                    continue;
                }
                let mut adj: Vec<u64> = g.adjacency().to_vec();
                for v in bits_to_vec(nbhd) {
                    adj[v as usize] |= 1 << order;
                }
                adj.push(nbhd);
                let h = WitnessGraph::from_adjacency(order + 1, adj);
                next.entry(canonical_code(&h)).or_insert(h);
            }
        }
        levels.push(next.into_values().collect());
    }
}

fn subsets_of(mask: u64) -> impl Iterator<Item = u64> {
    // Enumerates all submasks, the empty one included.
    let mut sub = Some(mask);
    std::iter::from_fn(move || {
        let cur = sub?;
        sub = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

fn bits_to_vec(mut m: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_code_is_invariant() {
        let g = WitnessGraph::circulant(8, &[1, 4]).unwrap();
        let h = g.relabel(&[5, 2, 7, 0, 1, 6, 3, 4]).unwrap();
        assert_eq!(canonical_code(&g), canonical_code(&h));
        let c8 = WitnessGraph::circulant(8, &[1]).unwrap();
        assert_ne!(canonical_code(&g), canonical_code(&c8));
    }

    #[test]
    fn counts_small_triangle_free_graphs() {
        // Without the independence cap: triangle-free graphs up to isomorphism
        // on 1..=5 vertices number 1, 2, 3, 7, 14.
        let mut levels = vec![vec![WitnessGraph::empty(0).unwrap()]];
        for order in 0..5u32 {
            let mut next = BTreeMap::new();
            for g in levels.last().unwrap() {
                for nbhd in subsets_of(if order == 0 { 0 } else { u64::MAX >> (64 - order) }) {
                    if !g.is_independent(&bits_to_vec(nbhd)) {
                        continue;
                    }
                    let mut adj = g.adjacency().to_vec();
                    for v in bits_to_vec(nbhd) {
                        adj[v as usize] |= 1 << order;
                    }
                    adj.push(nbhd);
                    let h = WitnessGraph::from_adjacency(order + 1, adj);
                    next.entry(canonical_code(&h)).or_insert(h);
                }
            }
            levels.push(next.into_values().collect());
        }
        let counts: Vec<usize> = levels.iter().skip(1).map(|l| l.len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 7, 14]);
    }

    #[test]
    fn level_sizes_for_n3() {
        let levels = triangle_free_levels(3);
        let sizes: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        // Orders 0..=5 are inhabited, order 6 is not; C5 is the only graph on 5.
        assert_eq!(sizes.len(), 7);
        assert_eq!(*sizes.last().unwrap(), 0);
        assert_eq!(sizes[5], 1);
    }

    #[test]
    fn level_sizes_for_n4() {
        let levels = triangle_free_levels(4);
        let sizes: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 3, 6, 9, 15, 9, 3, 0]);
    }
}
