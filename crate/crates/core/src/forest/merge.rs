//! Greedy rainbow joins between path endpoints.
//!
//! Every path (and every loose vertex, as a one-vertex path) is a component.
//! Candidate edges join endpoints of two different components and carry a
//! colour not yet on the forest. A single pass in random order is maximal:
//! a candidate rejected once stays rejected, since endpoints only become
//! interior, components only merge and colours only get used.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::graph::{Colour, ColouredGraph, Vertex};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeOutcome {
    /// Paths with at least one edge, ordered by their smaller endpoint.
    pub paths: Vec<Vec<Vertex>>,
    /// Input loose vertices that joined nothing.
    pub loose: Vec<Vertex>,
    pub joins: usize,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
}

/// Joins `paths` and `loose` vertices with edges of `g` whose colours are
/// neither on the paths nor in `forbidden`. The paths must be vertex-disjoint
/// paths of `g` whose edges have distinct colours.
pub fn merge_rainbow_paths(
    g: &ColouredGraph,
    paths: &[Vec<Vertex>],
    loose: &[Vertex],
    forbidden: &HashSet<Colour>,
    seed: u64,
) -> MergeOutcome {
    let n = g.n();
    let mut active = vec![false; n];
    let mut link = vec![[usize::MAX; 2]; n];
    let mut deg = vec![0u8; n];
    let mut dsu = Dsu((0..n).collect());
    let mut used: HashSet<Colour> = forbidden.clone();
    let connect = |link: &mut Vec<[usize; 2]>, deg: &mut Vec<u8>, a: Vertex, b: Vertex| {
        link[a][deg[a] as usize] = b;
        link[b][deg[b] as usize] = a;
        deg[a] += 1;
        deg[b] += 1;
    };
    for p in paths {
        for &v in p {
            active[v] = true;
        }
        for w in p.windows(2) {
            connect(&mut link, &mut deg, w[0], w[1]);
            let (ra, rb) = (dsu.find(w[0]), dsu.find(w[1]));
            dsu.0[ra] = rb;
            used.insert(g.colour(w[0], w[1]).expect("path edges lie in the host"));
        }
    }
    for &v in loose {
        active[v] = true;
    }

    let mut candidates: Vec<usize> = Vec::new();
    for v in 0..n {
        if !active[v] || deg[v] >= 2 {
            continue;
        }
        for &(w, e) in g.incident(v) {
            if v < w && active[w] && deg[w] < 2 && !used.contains(&g.edge(e).colour) {
                candidates.push(e);
            }
        }
    }
    candidates.shuffle(&mut rng_from_seed(seed));
    let mut joins = 0;
    for e in candidates {
        let edge = g.edge(e);
        let (a, b) = edge.endpoints();
        if deg[a] >= 2 || deg[b] >= 2 || used.contains(&edge.colour) {
            continue;
        }
        let (ra, rb) = (dsu.find(a), dsu.find(b));
        if ra == rb {
            continue;
        }
        dsu.0[ra] = rb;
        connect(&mut link, &mut deg, a, b);
        used.insert(edge.colour);
        joins += 1;
    }

    let mut seen = vec![false; n];
    let mut out_paths = Vec::new();
    let mut out_loose = Vec::new();
    for v in 0..n {
        if !active[v] || seen[v] || deg[v] >= 2 {
            continue;
        }
        if deg[v] == 0 {
            seen[v] = true;
            out_loose.push(v);
            continue;
        }
        let mut path = vec![v];
        seen[v] = true;
        let (mut prev, mut cur) = (v, link[v][0]);
        loop {
            path.push(cur);
            seen[cur] = true;
            if deg[cur] < 2 {
                break;
            }
            let next = if link[cur][0] == prev {
                link[cur][1]
            } else {
                link[cur][0]
            };
            prev = cur;
            cur = next;
        }
        out_paths.push(path);
    }
    MergeOutcome {
        paths: out_paths,
        loose: out_loose,
        joins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::rainbow_complete;
    use crate::graph::PathForest;

    #[test]
    fn rainbow_complete_merges_into_one_path() {
        let g = rainbow_complete(12);
        let loose: Vec<Vertex> = (0..12).collect();
        let out = merge_rainbow_paths(&g, &[], &loose, &HashSet::new(), 4);
        assert_eq!(out.paths.len(), 1);
        assert_eq!(out.paths[0].len(), 12);
        assert_eq!(out.joins, 11);
    }

    #[test]
    fn keeps_existing_paths_and_stays_rainbow() {
        let g = rainbow_complete(10);
        let paths = vec![vec![0, 1, 2], vec![3, 4]];
        let forbidden: HashSet<Colour> = [g.colour(2, 3).unwrap()].into();
        let out = merge_rainbow_paths(&g, &paths, &[5, 6], &forbidden, 1);
        let f = PathForest::new(&g, out.paths.clone()).unwrap();
        assert!(f.rainbow);
        assert_eq!(f.vertex_count(), 7);
        assert!(!f
            .edge_pairs()
            .iter()
            .any(|&(a, b)| (a.min(b), a.max(b)) == (2, 3)));
        for p in &paths {
            assert!(out.paths.iter().any(|q| q
                .windows(p.len())
                .any(|w| w == &p[..] || w.iter().rev().eq(p.iter()))));
        }
    }

    #[test]
    fn repeated_colour_blocks_second_join() {
        // Path 0-1 coloured 0; loose 2 and 3 reachable only through colour 0 or 5.
        let g = ColouredGraph::new(4, [(0, 1, 0), (1, 2, 5), (0, 3, 5), (2, 3, 0)]).unwrap();
        let out = merge_rainbow_paths(&g, &[vec![0, 1]], &[2, 3], &HashSet::new(), 0);
        assert_eq!(out.joins, 1);
        assert_eq!(out.loose.len(), 1);
    }
}
