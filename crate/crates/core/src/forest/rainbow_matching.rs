//! Rainbow matchings in bipartite slabs.
//!
//! Randomised greedy followed by swap-chain augmentation: an edge with at
//! most one conflicting matched edge may replace it, and the resources the
//! evicted edge frees are offered to further edges until one enters without
//! conflict. When no chain exists the matching is kicked (a few random
//! edges dropped) and repaired; restarts begin from a fresh greedy. The run
//! stops early once it meets the upper bound given by the three pairwise
//! bipartite matchings (left-right, left-colour, right-colour).

use std::collections::HashMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use serde::Serialize;

use super::near_regular::NearRegularityParams;
use crate::graph::{Colour, ColouredGraph, Vertex};
use crate::matching::bipartite_max_matching;
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlabEdge {
    pub left: usize,
    pub right: usize,
    pub colour: Colour,
}

/// `B_i`: edges between `V_{i-1}` (left) and `V_i` (right) coloured from `C_i`.
/// Edge endpoints are local indices into `left` and `right`.
#[derive(Debug, Clone, Serialize)]
pub struct SlabGraph {
    pub index: usize,
    pub left: Vec<Vertex>,
    pub right: Vec<Vertex>,
    pub edges: Vec<SlabEdge>,
    pub certificate: NearRegularityParams,
}

impl SlabGraph {
    /// Builds a slab from a bipartite coloured graph with sides `left` and `right`.
    pub fn from_bipartite(g: &ColouredGraph, left: &[Vertex], right: &[Vertex]) -> SlabGraph {
        let mut side = HashMap::new();
        for (i, &v) in right.iter().enumerate() {
            side.insert(v, i);
        }
        let mut edges = Vec::new();
        for (l, &u) in left.iter().enumerate() {
            for &(w, e) in g.incident(u) {
                if let Some(&r) = side.get(&w) {
                    edges.push(SlabEdge {
                        left: l,
                        right: r,
                        colour: g.edge(e).colour,
                    });
                }
            }
        }
        let n_ref = (left.len() + right.len()).max(1) as f64;
        SlabGraph {
            index: 1,
            left: left.to_vec(),
            right: right.to_vec(),
            edges,
            certificate: NearRegularityParams::new(1.0, 1.0, n_ref),
        }
    }

    /// The slab as a graph on `0..left + right`, right side shifted by `left.len()`.
    pub fn to_coloured_graph(&self) -> ColouredGraph {
        let nl = self.left.len();
        ColouredGraph::new(
            nl + self.right.len(),
            self.edges
                .iter()
                .map(|e| (e.left, nl + e.right, e.colour.0)),
        )
        .expect("slab edges are simple")
    }

    pub fn global_pair(&self, e: &SlabEdge) -> (Vertex, Vertex) {
        (self.left[e.left], self.right[e.right])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchingEffort {
    pub restarts: u32,
    /// Kick-and-repair rounds without improvement before a restart.
    pub stall_rounds: u32,
    pub max_chain: u32,
}

impl MatchingEffort {
    /// Budget for tiny instances, where restarts are nearly free.
    pub const EXHAUSTIVE: MatchingEffort = MatchingEffort {
        restarts: 48,
        stall_rounds: 48,
        max_chain: 12,
    };

    pub fn for_size(edges: usize) -> MatchingEffort {
        if edges <= 200 {
            Self::EXHAUSTIVE
        } else {
            MatchingEffort {
                restarts: 2,
                stall_rounds: 12,
                max_chain: 8,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RainbowMatching {
    /// Indices into the slab's edge list, increasing.
    pub edges: Vec<usize>,
    pub target: usize,
    pub upper_bound: usize,
    pub shortfall: bool,
}

impl RainbowMatching {
    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

/// The largest size any rainbow matching of `slab` can have, by the three
/// pairwise projections.
pub fn rainbow_upper_bound(slab: &SlabGraph) -> usize {
    let (nl, nr) = (slab.left.len(), slab.right.len());
    let mut colour_id: HashMap<Colour, usize> = HashMap::new();
    for e in &slab.edges {
        let next = colour_id.len();
        colour_id.entry(e.colour).or_insert(next);
    }
    let nc = colour_id.len();
    let size = |n_a: usize, n_b: usize, pairs: &mut dyn Iterator<Item = (usize, usize)>| {
        let mut adj = vec![Vec::new(); n_a];
        for (a, b) in pairs {
            adj[a].push(b);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        bipartite_max_matching(n_a, n_b, &adj)
            .iter()
            .flatten()
            .count()
    };
    let lr = size(nl, nr, &mut slab.edges.iter().map(|e| (e.left, e.right)));
    let lc = size(
        nl,
        nc,
        &mut slab.edges.iter().map(|e| (e.left, colour_id[&e.colour])),
    );
    let rc = size(
        nr,
        nc,
        &mut slab.edges.iter().map(|e| (e.right, colour_id[&e.colour])),
    );
    lr.min(lc).min(rc)
}

/// Rainbow matching with target `ceil((1 - q) * min side)`.
pub fn rainbow_matching(slab: &SlabGraph, q: f64, seed: u64) -> RainbowMatching {
    rainbow_matching_with(slab, q, seed, MatchingEffort::for_size(slab.edges.len()))
}

pub fn rainbow_matching_with(
    slab: &SlabGraph,
    q: f64,
    seed: u64,
    effort: MatchingEffort,
) -> RainbowMatching {
    let side = slab.left.len().min(slab.right.len());
    let target = ((1.0 - q.clamp(0.0, 1.0)) * side as f64).ceil() as usize;
    let upper_bound = rainbow_upper_bound(slab);
    let mut engine = Engine::new(slab);
    let mut rng = rng_from_seed(seed);
    let mut best: Vec<usize> = Vec::new();
    for _ in 0..effort.restarts.max(1) {
        engine.reset(&mut rng);
        engine.greedy(&mut rng);
        engine.improve(effort.max_chain, &mut rng);
        let mut stall = 0;
        while engine.size < upper_bound && stall < effort.stall_rounds {
            let before = engine.size;
            let snapshot = engine.matched_edges();
            engine.kick(&mut rng);
            engine.greedy(&mut rng);
            engine.improve(effort.max_chain, &mut rng);
            if engine.size > before {
                stall = 0;
            } else {
                stall += 1;
                if engine.size < before {
                    engine.restore(&snapshot);
                }
            }
        }
        if engine.size > best.len() {
            best = engine.matched_edges();
        }
        if best.len() >= upper_bound {
            break;
        }
    }
    best.sort_unstable();
    RainbowMatching {
        shortfall: best.len() < target,
        edges: best,
        target,
        upper_bound,
    }
}

const FREE: usize = usize::MAX;

struct Engine<'a> {
    slab: &'a SlabGraph,
    colour: Vec<usize>,
    by_left: Vec<Vec<usize>>,
    by_right: Vec<Vec<usize>>,
    by_colour: Vec<Vec<usize>>,
    at_left: Vec<usize>,
    at_right: Vec<usize>,
    at_colour: Vec<usize>,
    in_m: Vec<bool>,
    size: usize,
    stamp: Vec<u32>,
    epoch: u32,
}

impl<'a> Engine<'a> {
    fn new(slab: &'a SlabGraph) -> Self {
        let mut ids: HashMap<Colour, usize> = HashMap::new();
        let colour: Vec<usize> = slab
            .edges
            .iter()
            .map(|e| {
                let next = ids.len();
                *ids.entry(e.colour).or_insert(next)
            })
            .collect();
        let (nl, nr, nc) = (slab.left.len(), slab.right.len(), ids.len());
        let mut by_left = vec![Vec::new(); nl];
        let mut by_right = vec![Vec::new(); nr];
        let mut by_colour = vec![Vec::new(); nc];
        for (i, e) in slab.edges.iter().enumerate() {
            by_left[e.left].push(i);
            by_right[e.right].push(i);
            by_colour[colour[i]].push(i);
        }
        Engine {
            slab,
            colour,
            by_left,
            by_right,
            by_colour,
            at_left: vec![FREE; nl],
            at_right: vec![FREE; nr],
            at_colour: vec![FREE; nc],
            in_m: vec![false; slab.edges.len()],
            size: 0,
            stamp: vec![0; slab.edges.len()],
            epoch: 0,
        }
    }

    fn reset(&mut self, rng: &mut Rng) {
        self.at_left.fill(FREE);
        self.at_right.fill(FREE);
        self.at_colour.fill(FREE);
        self.in_m.fill(false);
        self.size = 0;
        for list in self
            .by_left
            .iter_mut()
            .chain(&mut self.by_right)
            .chain(&mut self.by_colour)
        {
            list.shuffle(rng);
        }
    }

    fn ends(&self, e: usize) -> (usize, usize, usize) {
        let se = &self.slab.edges[e];
        (se.left, se.right, self.colour[e])
    }

    fn add(&mut self, e: usize) {
        let (l, r, c) = self.ends(e);
        debug_assert!(
            self.at_left[l] == FREE && self.at_right[r] == FREE && self.at_colour[c] == FREE
        );
        self.at_left[l] = e;
        self.at_right[r] = e;
        self.at_colour[c] = e;
        self.in_m[e] = true;
        self.size += 1;
    }

    fn remove(&mut self, e: usize) {
        let (l, r, c) = self.ends(e);
        self.at_left[l] = FREE;
        self.at_right[r] = FREE;
        self.at_colour[c] = FREE;
        self.in_m[e] = false;
        self.size -= 1;
    }

    /// The single matched edge blocking `e`, `Ok(None)` if `e` fits, `Err`
    /// if two or more distinct edges block it.
    fn blocker(&self, e: usize) -> Result<Option<usize>, ()> {
        let (l, r, c) = self.ends(e);
        let mut found = FREE;
        for b in [self.at_left[l], self.at_right[r], self.at_colour[c]] {
            if b == FREE {
                continue;
            }
            if found != FREE && found != b {
                return Err(());
            }
            found = b;
        }
        Ok((found != FREE).then_some(found))
    }

    fn greedy(&mut self, rng: &mut Rng) {
        let mut order: Vec<usize> = (0..self.slab.edges.len())
            .filter(|&e| !self.in_m[e])
            .collect();
        order.shuffle(rng);
        for e in order {
            if let Ok(None) = self.blocker(e) {
                self.add(e);
            }
        }
    }

    /// Tries to insert `e`, evicting at most one edge per step.
    fn chain(&mut self, e: usize, depth: u32) -> bool {
        self.stamp[e] = self.epoch;
        let f = match self.blocker(e) {
            Err(()) => return false,
            Ok(None) => {
                self.add(e);
                return true;
            }
            Ok(Some(f)) => f,
        };
        if depth == 0 {
            return false;
        }
        self.remove(f);
        self.add(e);
        let (el, er, ec) = self.ends(e);
        let (fl, fr, fc) = self.ends(f);
        let mut candidates: Vec<usize> = Vec::new();
        if fl != el {
            candidates.extend(&self.by_left[fl]);
        }
        if fr != er {
            candidates.extend(&self.by_right[fr]);
        }
        if fc != ec {
            candidates.extend(&self.by_colour[fc]);
        }
        for g in candidates {
            if self.stamp[g] != self.epoch && !self.in_m[g] && self.chain(g, depth - 1) {
                return true;
            }
        }
        self.remove(e);
        self.add(f);
        false
    }

    fn improve(&mut self, max_chain: u32, rng: &mut Rng) {
        loop {
            let before = self.size;
            let mut starts: Vec<usize> = (0..self.slab.edges.len())
                .filter(|&e| {
                    let (l, r, _) = self.ends(e);
                    !self.in_m[e] && (self.at_left[l] == FREE || self.at_right[r] == FREE)
                })
                .collect();
            starts.shuffle(rng);
            for e in starts {
                if self.in_m[e] {
                    continue;
                }
                self.epoch = self.epoch.wrapping_add(1);
                if self.epoch == 0 {
                    self.stamp.fill(0);
                    self.epoch = 1;
                }
                self.chain(e, max_chain);
            }
            if self.size == before {
                return;
            }
        }
    }

    fn kick(&mut self, rng: &mut Rng) {
        let matched = self.matched_edges();
        let k = rng.random_range(1..=3usize).min(matched.len());
        for &e in matched.choose_multiple(rng, k) {
            self.remove(e);
        }
    }

    fn matched_edges(&self) -> Vec<usize> {
        (0..self.slab.edges.len())
            .filter(|&e| self.in_m[e])
            .collect()
    }

    fn restore(&mut self, edges: &[usize]) {
        for e in self.matched_edges() {
            self.remove(e);
        }
        for &e in edges {
            self.add(e);
        }
    }
}
