//! Exact cardinality matchings.
//!
//! [`max_matching`] is Edmonds' blossom algorithm for general graphs
//! (O(V^3) worst case, after a greedy warm start). [`bipartite_max_matching`]
//! is Hopcroft-Karp.

use std::collections::VecDeque;

use rand::seq::SliceRandom;

use crate::rng::Rng;

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    lca_mark: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            lca_mark: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.lca_mark.fill(false);
        loop {
            a = self.base[a];
            self.lca_mark[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.lca_mark[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let w = self.mate[to];
                    self.used[w] = true;
                    self.queue.push_back(w);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// Maximum-cardinality matching of the graph with adjacency lists `adj`.
///
/// Returns `mate[v]`, `None` for unmatched vertices. With `rng` the greedy
/// warm start and the root order are shuffled; otherwise both follow vertex
/// order. With `stop_on_failed_root` the search ends at the first vertex
/// that cannot be matched, which is enough to decide whether a perfect
/// matching exists.
pub fn max_matching(
    adj: &[Vec<usize>],
    rng: Option<&mut Rng>,
    stop_on_failed_root: bool,
) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut b = Blossom::new(adj);
    if let Some(rng) = rng {
        order.shuffle(rng);
    }
    for &v in &order {
        if b.mate[v] != NONE {
            continue;
        }
        if let Some(&w) = adj[v].iter().find(|&&w| b.mate[w] == NONE && w != v) {
            b.mate[v] = w;
            b.mate[w] = v;
        }
    }
    for &v in &order {
        if b.mate[v] != NONE {
            continue;
        }
        match b.find_path(v) {
            Some(end) => b.augment(end),
            None if stop_on_failed_root => break,
            None => {}
        }
    }
    b.mate.iter().map(|&m| (m != NONE).then_some(m)).collect()
}

/// Maximum matching on an edge list over vertices `0..n`; returns matched pairs
/// `(min, max)` in increasing order.
pub fn max_matching_edges(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let mate = max_matching(&adj, None, false);
    let mut out: Vec<(usize, usize)> = mate
        .iter()
        .enumerate()
        .filter_map(|(v, m)| m.filter(|&w| v < w).map(|w| (v, w)))
        .collect();
    out.sort_unstable();
    out
}

/// Hopcroft-Karp on a bipartite graph with `adj[l]` listing right neighbours
/// of left vertex `l`. Returns `mate_left`.
pub fn bipartite_max_matching(
    n_left: usize,
    n_right: usize,
    adj: &[Vec<usize>],
) -> Vec<Option<usize>> {
    let mut mate_l = vec![NONE; n_left];
    let mut mate_r = vec![NONE; n_right];
    let mut dist = vec![0usize; n_left];
    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for l in 0..n_left {
            if mate_l[l] == NONE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = mate_r[r];
                if m == NONE {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for l in 0..n_left {
            if mate_l[l] == NONE {
                hk_dfs(l, adj, &mut mate_l, &mut mate_r, &mut dist, &mut it);
            }
        }
    }
    mate_l.iter().map(|&m| (m != NONE).then_some(m)).collect()
}

fn hk_dfs(
    root: usize,
    adj: &[Vec<usize>],
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    // Iterative DFS along the BFS layers.
    let mut stack = vec![root];
    while let Some(&l) = stack.last() {
        if it[l] >= adj[l].len() {
            dist[l] = usize::MAX;
            stack.pop();
            continue;
        }
        let r = adj[l][it[l]];
        let m = mate_r[r];
        if m == NONE {
            // Augment along the stack.
            let mut r_cur = r;
            for &ll in stack.iter().rev() {
                let prev = mate_l[ll];
                mate_l[ll] = r_cur;
                mate_r[r_cur] = ll;
                r_cur = prev;
            }
            return true;
        }
        // A child that fails is marked dead, so revisiting the same edge
        // falls through to the advance below.
        if dist[m] == dist[l].wrapping_add(1) {
            stack.push(m);
        } else {
            it[l] += 1;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    /// Exponential reference: the largest set of pairwise disjoint edges.
    fn brute_force(n: usize, edges: &[(usize, usize)]) -> usize {
        fn go(i: usize, edges: &[(usize, usize)], used: &mut Vec<bool>) -> usize {
            if i == edges.len() {
                return 0;
            }
            let mut best = go(i + 1, edges, used);
            let (u, v) = edges[i];
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                best = best.max(1 + go(i + 1, edges, used));
                used[u] = false;
                used[v] = false;
            }
            best
        }
        go(0, edges, &mut vec![false; n])
    }

    #[test]
    fn odd_cycle_with_pendant_needs_blossom() {
        // Pentagon 0..4 with pendant 5 on 0 and pendant 6 on 2.
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (2, 6)];
        assert_eq!(max_matching_edges(7, &edges).len(), 3);
    }

    #[test]
    fn petersen_has_perfect_matching() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        assert_eq!(max_matching_edges(10, &edges).len(), 5);
    }

    #[test]
    fn hopcroft_karp_small() {
        let adj = vec![vec![0, 1], vec![0], vec![1, 2]];
        let m = bipartite_max_matching(3, 3, &adj);
        assert_eq!(m.iter().flatten().count(), 3);
        let adj = vec![vec![0], vec![0], vec![0]];
        assert_eq!(
            bipartite_max_matching(3, 1, &adj).iter().flatten().count(),
            1
        );
    }

    proptest! {
        #[test]
        fn blossom_matches_brute_force(n in 2usize..11, raw in proptest::collection::vec((0usize..11, 0usize..11), 0..22), seed in 0u64..1000) {
            let mut edges: Vec<(usize, usize)> = raw.into_iter()
                .map(|(a, b)| (a % n, b % n))
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            edges.sort_unstable();
            edges.dedup();
            let expected = brute_force(n, &edges);
            prop_assert_eq!(max_matching_edges(n, &edges).len(), expected);
            let mut adj = vec![Vec::new(); n];
            for &(u, v) in &edges { adj[u].push(v); adj[v].push(u); }
            let mut rng = rng_from_seed(seed);
            let mate = max_matching(&adj, Some(&mut rng), false);
            let size = mate.iter().flatten().count() / 2;
            prop_assert_eq!(size, expected);
            for (v, m) in mate.iter().enumerate() {
                if let Some(w) = m {
                    prop_assert_eq!(mate[*w], Some(v));
                    prop_assert!(adj[v].contains(w));
                }
            }
        }

        #[test]
        fn hopcroft_karp_matches_brute_force(nl in 1usize..7, nr in 1usize..7, raw in proptest::collection::vec((0usize..7, 0usize..7), 0..20)) {
            let mut adj = vec![Vec::new(); nl];
            let mut edges = Vec::new();
            for (a, b) in raw {
                let (l, r) = (a % nl, b % nr);
                if !adj[l].contains(&r) {
                    adj[l].push(r);
                    edges.push((l, nl + r));
                }
            }
            let m = bipartite_max_matching(nl, nr, &adj);
            let mut seen = std::collections::HashSet::new();
            for (l, r) in m.iter().enumerate() {
                if let Some(r) = r {
                    prop_assert!(adj[l].contains(r));
                    prop_assert!(seen.insert(*r));
                }
            }
            prop_assert_eq!(m.iter().flatten().count(), brute_force(nl + nr, &edges));
        }
    }
}
