//! Even-regular spanning subgraphs of graphs with minimum degree above n/2.
//!
//! Small hosts go through the degree-constrained-subgraph gadget and an exact
//! perfect matching. Larger hosts use an Euler orientation: every vertex gets
//! in- and out-degree within one of `d(v)/2`, and a bipartite flow then picks
//! `r/2` out-arcs and `r/2` in-arcs at every vertex. A failed flow is retried
//! with a fresh orientation.

use log::debug;
use rand::seq::SliceRandom;
use serde::Serialize;
use thiserror::Error;

use crate::flow::FlowNetwork;
use crate::graph::{ColouredGraph, Vertex};
use crate::matching::max_matching;
use crate::rng::{stage_rng, Rng, Stage};

/// Gadget graphs above this many vertices are left to the flow route.
pub const GADGET_MAX_VERTICES: usize = 4000;
const ORIENTATION_ATTEMPTS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMethod {
    Gadget,
    Orientation,
}

#[derive(Debug, Clone)]
pub struct RegularSubgraphResult {
    pub subgraph: ColouredGraph,
    pub r: usize,
    pub method: FactorMethod,
    pub attempts: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularizeError {
    #[error("minimum degree {min_degree} is not above n/2 (n = {n})")]
    Precondition { min_degree: usize, n: usize },
    #[error("internal defect: no {r}-factor found after {attempts} attempts")]
    Defect { r: usize, attempts: u64 },
}

/// The even value in `[ceil(d/2), ceil(d/2) + 1]`.
pub fn target_degree(min_degree: usize) -> usize {
    let h = min_degree.div_ceil(2);
    if h.is_multiple_of(2) {
        h
    } else {
        h + 1
    }
}

pub fn gadget_size(g: &ColouredGraph, r: usize) -> usize {
    (0..g.n())
        .map(|v| 2 * g.degree(v) - r.min(g.degree(v)))
        .sum()
}

pub fn regular_spanning_subgraph(
    g: &ColouredGraph,
    seed: u64,
) -> Result<RegularSubgraphResult, RegularizeError> {
    let n = g.n();
    let delta = g.min_degree();
    if n == 0 || 2 * delta <= n {
        return Err(RegularizeError::Precondition {
            min_degree: delta,
            n,
        });
    }
    let r = target_degree(delta);
    let result = if gadget_size(g, r) <= GADGET_MAX_VERTICES {
        let mut rng = stage_rng(seed, Stage::Regularize, 0);
        factor_by_gadget(g, r, &mut rng).map(|edges| (edges, FactorMethod::Gadget, 1))
    } else {
        (0..ORIENTATION_ATTEMPTS).find_map(|attempt| {
            let mut rng = stage_rng(seed, Stage::Regularize, attempt);
            let found = factor_by_orientation(g, r, &mut rng);
            if found.is_none() {
                debug!("orientation attempt {attempt} did not carry an {r}-factor");
            }
            found.map(|edges| (edges, FactorMethod::Orientation, attempt + 1))
        })
    };
    let Some((edges, method, attempts)) = result else {
        return Err(RegularizeError::Defect {
            r,
            attempts: ORIENTATION_ATTEMPTS,
        });
    };
    let subgraph = g.spanning_subgraph(edges);
    if (0..n).any(|v| subgraph.degree(v) != r) {
        return Err(RegularizeError::Defect { r, attempts });
    }
    Ok(RegularSubgraphResult {
        subgraph,
        r,
        method,
        attempts,
    })
}

/// Tutte's gadget: vertex `v` becomes `d(v)` edge copies plus `d(v) - r`
/// cores joined to all copies; a perfect matching leaves exactly `r` copies
/// of `v` to be matched across host edges.
fn factor_by_gadget(g: &ColouredGraph, r: usize, rng: &mut Rng) -> Option<Vec<usize>> {
    let n = g.n();
    let mut copy_base = vec![0usize; n];
    let mut next = 0;
    for v in 0..n {
        copy_base[v] = next;
        next += g.degree(v);
    }
    let mut core_base = vec![0usize; n];
    for v in 0..n {
        core_base[v] = next;
        next += g.degree(v) - r;
    }
    let mut adj = vec![Vec::new(); next];
    for v in 0..n {
        for j in 0..g.degree(v) {
            for k in 0..g.degree(v) - r {
                adj[copy_base[v] + j].push(core_base[v] + k);
                adj[core_base[v] + k].push(copy_base[v] + j);
            }
        }
    }
    // Position of each edge in its endpoints' incidence lists.
    let mut slot = vec![(0usize, 0usize); g.edge_count()];
    for v in 0..n {
        for (j, &(_, e)) in g.incident(v).iter().enumerate() {
            if g.edge(e).u == v {
                slot[e].0 = copy_base[v] + j;
            } else {
                slot[e].1 = copy_base[v] + j;
            }
        }
    }
    for &(a, b) in &slot {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.shuffle(rng);
    }
    let mate = max_matching(&adj, Some(rng), true);
    if mate.iter().any(Option::is_none) {
        return None;
    }
    Some(
        slot.iter()
            .enumerate()
            .filter(|(_, &(a, b))| mate[a] == Some(b))
            .map(|(e, _)| e)
            .collect(),
    )
}

/// Orients every edge along a randomised Euler tour of `g` plus a dummy
/// vertex joined to the odd-degree vertices. Returns `out_arcs[v]` as edge
/// indices.
fn euler_orientation(g: &ColouredGraph, rng: &mut Rng) -> Vec<Vec<usize>> {
    let n = g.n();
    let dummy = n;
    let mut ends: Vec<(Vertex, Vertex)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let real = ends.len();
    for v in 0..n {
        if g.degree(v) % 2 == 1 {
            ends.push((v, dummy));
        }
    }
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (i, &(a, b)) in ends.iter().enumerate() {
        inc[a].push(i);
        inc[b].push(i);
    }
    for list in &mut inc {
        list.shuffle(rng);
    }
    let mut used = vec![false; ends.len()];
    let mut pos = vec![0usize; n + 1];
    let mut out_arcs = vec![Vec::new(); n];
    let mut starts: Vec<Vertex> = (0..=n).collect();
    starts.shuffle(rng);
    for s in starts {
        // Hierholzer walk; arcs are oriented in traversal order, which keeps
        // in-degree equal to out-degree on every closed trail.
        let mut stack = vec![s];
        while let Some(&v) = stack.last() {
            while pos[v] < inc[v].len() && used[inc[v][pos[v]]] {
                pos[v] += 1;
            }
            if pos[v] == inc[v].len() {
                stack.pop();
                continue;
            }
            let e = inc[v][pos[v]];
            used[e] = true;
            let (a, b) = ends[e];
            let w = if a == v { b } else { a };
            if e < real {
                out_arcs[v].push(e);
            }
            stack.push(w);
        }
    }
    out_arcs
}

fn factor_by_orientation(g: &ColouredGraph, r: usize, rng: &mut Rng) -> Option<Vec<usize>> {
    let n = g.n();
    let k = (r / 2) as i64;
    let out_arcs = euler_orientation(g, rng);
    let (source, sink) = (2 * n, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2);
    let mut handles = Vec::with_capacity(g.edge_count());
    for v in 0..n {
        net.add_arc(source, v, k);
        net.add_arc(n + v, sink, k);
    }
    for (v, arcs) in out_arcs.iter().enumerate() {
        for &e in arcs {
            let w = g.edge(e).other(v);
            handles.push((net.add_arc(v, n + w, 1), e));
        }
    }
    let need = k * n as i64;
    if net.max_flow(source, sink, need) < need {
        return None;
    }
    Some(
        handles
            .into_iter()
            .filter(|&(h, _)| net.flow_on(h) == 1)
            .map(|(_, e)| e)
            .collect(),
    )
}
