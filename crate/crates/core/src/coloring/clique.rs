//! Weighted clique search: items carry a capacity (how many copies may be
//! used) and a clique needs total weight at least `target`.

pub(crate) struct WeightedGraph {
    caps: Vec<u64>,
    adj: Vec<Vec<bool>>,
}

impl WeightedGraph {
    pub fn new(caps: Vec<u64>, adjacent: impl Fn(usize, usize) -> bool) -> Self {
        let n = caps.len();
        let adj = (0..n).map(|i| (0..n).map(|j| i != j && adjacent(i, j)).collect()).collect();
        Self { caps, adj }
    }

    /// Items with multiplicities whose weights sum to at least `target`.
    pub fn find(&self, target: u64) -> Option<Vec<(usize, u64)>> {
        if target == 0 {
            return Some(Vec::new());
        }
        let candidates: Vec<usize> = (0..self.caps.len()).filter(|&i| self.caps[i] > 0).collect();
        let mut chosen = Vec::new();
        self.extend(&candidates, 0, target, &mut chosen).then_some(chosen)
    }

    fn extend(&self, candidates: &[usize], weight: u64, target: u64, chosen: &mut Vec<(usize, u64)>) -> bool {
        let room: u64 = candidates.iter().map(|&i| self.caps[i].min(target)).sum();
        if weight + room < target {
            return false;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            let take = self.caps[v].min(target - weight);
            chosen.push((v, take));
            if weight + take >= target {
                return true;
            }
            let rest: Vec<usize> = candidates[pos + 1..].iter().copied().filter(|&u| self.adj[v][u]).collect();
            if self.extend(&rest, weight + take, target, chosen) {
                return true;
            }
            chosen.pop();
            let remaining: u64 = candidates[pos + 1..].iter().map(|&i| self.caps[i].min(target)).sum();
            if weight + remaining < target {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cliques_with_capacities() {
        // Path 0-1-2 plus isolated 3 with capacity 3.
        let g = WeightedGraph::new(vec![1, 1, 1, 3], |i, j| (i as i64 - j as i64).abs() == 1 && i < 3 && j < 3);
        assert_eq!(g.find(3), Some(vec![(3, 3)]));
        assert!(g.find(4).is_none());
        let g = WeightedGraph::new(vec![1, 1, 1, 1], |i, j| (i as i64 - j as i64).abs() == 1);
        assert_eq!(g.find(2), Some(vec![(0, 1), (1, 1)]));
        assert!(g.find(3).is_none());
        assert_eq!(g.find(0), Some(vec![]));
    }

    #[test]
    fn agrees_with_exhaustive_search() {
        // All graphs on 5 vertices with caps from a fixed pattern.
        let caps = vec![1, 2, 1, 1, 2];
        for mask in 0u32..(1 << 10) {
            let mut bits = [[false; 5]; 5];
            let mut k = 0;
            for i in 0..5 {
                for j in i + 1..5 {
                    bits[i][j] = mask >> k & 1 == 1;
                    bits[j][i] = bits[i][j];
                    k += 1;
                }
            }
            let g = WeightedGraph::new(caps.clone(), |i, j| bits[i][j]);
            let mut best = 0;
            for set in 0u32..32 {
                let members: Vec<usize> = (0..5).filter(|&i| set >> i & 1 == 1).collect();
                if members.iter().all(|&a| members.iter().all(|&b| a == b || bits[a][b])) {
                    best = best.max(members.iter().map(|&i| caps[i]).sum::<u64>());
                }
            }
            for t in 1..=best + 1 {
                let found = g.find(t);
                assert_eq!(found.is_some(), t <= best, "mask {mask} target {t}");
                if let Some(f) = found {
                    assert!(f.iter().map(|&(_, m)| m).sum::<u64>() >= t);
                    assert!(f.iter().all(|&(a, _)| f.iter().all(|&(b, _)| a == b || bits[a][b])));
                }
            }
        }
    }
}
