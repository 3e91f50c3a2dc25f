//! Exact references for small graphs.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{ColouredGraph, Vertex};

pub const ENV_MAX_HAMILTON: &str = "RAINBOW_ORACLE_MAX_HAMILTON";
pub const ENV_MAX_MATCHING: &str = "RAINBOW_ORACLE_MAX_MATCHING";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_vertices_hamilton: usize,
    pub max_vertices_matching: usize,
    pub time_cap: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_vertices_hamilton: 12,
            max_vertices_matching: 16,
            time_cap: None,
        }
    }
}

impl OracleBudget {
    /// Defaults, overridden by the budget environment variables when set.
    pub fn from_env() -> Self {
        let read = |key: &str, default: usize| {
            std::env::var(key)
                .ok()
                .and_then(|s| s.trim().parse::<usize>().ok())
                .filter(|&v| v > 0)
                .unwrap_or(default)
        };
        let d = OracleBudget::default();
        OracleBudget {
            max_vertices_hamilton: read(ENV_MAX_HAMILTON, d.max_vertices_hamilton),
            max_vertices_matching: read(ENV_MAX_MATCHING, d.max_vertices_matching),
            time_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} vertices exceed the oracle budget of {max}")]
    BudgetExceeded { n: usize, max: usize },
    #[error("oracle time cap of {0:?} reached")]
    TimeCap(Duration),
}

/// True iff `cycle` lists every vertex once and cyclically consecutive
/// vertices are adjacent.
pub fn is_hamilton_cycle(g: &ColouredGraph, cycle: &[Vertex]) -> bool {
    let n = g.n();
    if n < 3 || cycle.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..n).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % n]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonOptimum {
    pub best: usize,
    pub witness: Vec<Vertex>,
}

struct Search<'a> {
    adj: &'a [Vec<Vertex>],
    colour: &'a [Vec<usize>],
    n: usize,
    global: &'a AtomicUsize,
    deadline: Option<Instant>,
    timed_out: bool,
    path: Vec<Vertex>,
    on_path: Vec<bool>,
    counts: Vec<u32>,
    distinct: usize,
    best: Option<(usize, Vec<Vertex>)>,
}

impl Search<'_> {
    fn local_best(&self) -> usize {
        self.best.as_ref().map_or(0, |b| b.0)
    }

    fn push(&mut self, v: Vertex, c: usize) {
        self.path.push(v);
        self.on_path[v] = true;
        if self.counts[c] == 0 {
            self.distinct += 1;
        }
        self.counts[c] += 1;
    }

    fn pop(&mut self, c: usize) {
        let v = self.path.pop().expect("non-empty");
        self.on_path[v] = false;
        self.counts[c] -= 1;
        if self.counts[c] == 0 {
            self.distinct -= 1;
        }
    }

    fn run(&mut self) {
        if self.timed_out {
            return;
        }
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                self.timed_out = true;
                return;
            }
        }
        let placed = self.path.len() - 1;
        let bound = self.distinct + (self.n - placed);
        if bound < self.global.load(Ordering::Relaxed)
            || (self.best.is_some() && bound <= self.local_best())
        {
            return;
        }
        let last = *self.path.last().expect("non-empty");
        if self.path.len() == self.n {
            // Closing edge back to 0, and direction dedup.
            if self.path[1] > last {
                return;
            }
            if let Some(i) = self.adj[last].iter().position(|&w| w == 0) {
                let c = self.colour[last][i];
                let total = self.distinct + usize::from(self.counts[c] == 0);
                if self.best.is_none() || total > self.local_best() {
                    self.best = Some((total, self.path.clone()));
                    self.global.fetch_max(total, Ordering::Relaxed);
                }
            }
            return;
        }
        for i in 0..self.adj[last].len() {
            let w = self.adj[last][i];
            if self.on_path[w] {
                continue;
            }
            let c = self.colour[last][i];
            self.push(w, c);
            self.run();
            self.pop(c);
        }
    }
}

/// Maximum number of distinct colours on a Hamilton cycle, with the first
/// optimal cycle in search order. `None` when the graph has no Hamilton cycle.
pub fn max_colour_hamilton_bruteforce(
    g: &ColouredGraph,
    budget: &OracleBudget,
) -> Result<Option<HamiltonOptimum>, OracleError> {
    let n = g.n();
    if n > budget.max_vertices_hamilton {
        return Err(OracleError::BudgetExceeded {
            n,
            max: budget.max_vertices_hamilton,
        });
    }
    if n < 3 {
        return Ok(None);
    }
    let (canon, _) = g.canonicalize();
    let adj: Vec<Vec<Vertex>> = (0..n).map(|v| canon.neighbours(v).collect()).collect();
    let colour: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            canon
                .incident(v)
                .iter()
                .map(|&(_, e)| canon.edge(e).colour.0 as usize)
                .collect()
        })
        .collect();
    let k = canon.colour_set().len();
    let global = AtomicUsize::new(0);
    let deadline = budget.time_cap.map(|d| Instant::now() + d);
    let branches: Vec<(Option<(usize, Vec<Vertex>)>, bool)> = (0..adj[0].len())
        .into_par_iter()
        .map(|i| {
            let mut s = Search {
                adj: &adj,
                colour: &colour,
                n,
                global: &global,
                deadline,
                timed_out: false,
                path: vec![0],
                on_path: vec![false; n],
                counts: vec![0; k],
                distinct: 0,
                best: None,
            };
            s.on_path[0] = true;
            let c = colour[0][i];
            s.push(adj[0][i], c);
            s.run();
            (s.best, s.timed_out)
        })
        .collect();
    if branches.iter().any(|b| b.1) {
        return Err(OracleError::TimeCap(
            budget.time_cap.expect("deadline implies cap"),
        ));
    }
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    for (b, _) in branches {
        if let Some((count, cycle)) = b {
            if best.as_ref().is_none_or(|x| count > x.0) {
                best = Some((count, cycle));
            }
        }
    }
    Ok(best.map(|(best, witness)| HamiltonOptimum { best, witness }))
}

/// A maximum rainbow matching (edge indices, ascending), lexicographically
/// least among maximum ones.
pub fn max_rainbow_matching_exact(
    g: &ColouredGraph,
    budget: &OracleBudget,
) -> Result<Vec<usize>, OracleError> {
    let n = g.n();
    if n > budget.max_vertices_matching {
        return Err(OracleError::BudgetExceeded {
            n,
            max: budget.max_vertices_matching,
        });
    }
    let (canon, _) = g.canonicalize();
    let edges: Vec<(Vertex, Vertex, usize)> = canon
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.colour.0 as usize))
        .collect();
    let k = canon.colour_set().len();
    struct Bb<'a> {
        edges: &'a [(Vertex, Vertex, usize)],
        used_v: Vec<bool>,
        used_c: Vec<bool>,
        free_vertices: usize,
        current: Vec<usize>,
        best: Vec<usize>,
        colours_left: usize,
    }
    impl Bb<'_> {
        fn go(&mut self, i: usize) {
            let cap = (self.edges.len() - i)
                .min(self.free_vertices / 2)
                .min(self.colours_left);
            if self.current.len() + cap <= self.best.len() {
                return;
            }
            if i == self.edges.len() {
                self.best = self.current.clone();
                return;
            }
            let (u, v, c) = self.edges[i];
            if !self.used_v[u] && !self.used_v[v] && !self.used_c[c] {
                self.used_v[u] = true;
                self.used_v[v] = true;
                self.used_c[c] = true;
                self.free_vertices -= 2;
                self.colours_left -= 1;
                self.current.push(i);
                self.go(i + 1);
                self.current.pop();
                self.used_v[u] = false;
                self.used_v[v] = false;
                self.used_c[c] = false;
                self.free_vertices += 2;
                self.colours_left += 1;
            }
            self.go(i + 1);
        }
    }
    let mut bb = Bb {
        edges: &edges,
        used_v: vec![false; n],
        used_c: vec![false; k],
        free_vertices: n,
        current: Vec::new(),
        best: Vec::new(),
        colours_left: k,
    };
    bb.go(0);
    // Canonicalisation keeps the edge order, so indices carry over.
    Ok(bb.best)
}

/// SHA-256 of the colour-canonical edge list, hex encoded.
pub fn graph_hash(g: &ColouredGraph) -> String {
    let (canon, _) = g.canonicalize();
    let mut h = Sha256::new();
    h.update((canon.n() as u64).to_le_bytes());
    for e in canon.edges() {
        h.update((e.u as u64).to_le_bytes());
        h.update((e.v as u64).to_le_bytes());
        h.update(e.colour.0.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Memoised oracle answers keyed by [`graph_hash`].
#[derive(Debug, Default)]
pub struct OracleCache {
    hamilton: Mutex<HashMap<String, Option<HamiltonOptimum>>>,
    matching: Mutex<HashMap<String, usize>>,
}

impl OracleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn hamilton(
        &self,
        g: &ColouredGraph,
        budget: &OracleBudget,
    ) -> Result<Option<HamiltonOptimum>, OracleError> {
        let key = graph_hash(g);
        if let Some(hit) = self.hamilton.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let value = max_colour_hamilton_bruteforce(g, budget)?;
        self.hamilton
            .lock()
            .expect("cache lock")
            .insert(key, value.clone());
        Ok(value)
    }

    /// Size of a maximum rainbow matching.
    pub fn matching_size(
        &self,
        g: &ColouredGraph,
        budget: &OracleBudget,
    ) -> Result<usize, OracleError> {
        let key = graph_hash(g);
        if let Some(&hit) = self.matching.lock().expect("cache lock").get(&key) {
            return Ok(hit);
        }
        let value = max_rainbow_matching_exact(g, budget)?.len();
        self.matching.lock().expect("cache lock").insert(key, value);
        Ok(value)
    }

    pub fn len(&self) -> usize {
        self.hamilton.lock().expect("cache lock").len()
            + self.matching.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
