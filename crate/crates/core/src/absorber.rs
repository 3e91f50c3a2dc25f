//! Absorbing paths.
//!
//! A small matching `M` is found with many edges inside every neighbourhood.
//! Chaining its edges through fresh common neighbours gives a path `A`; a
//! vertex `u` is absorbed by replacing a core edge `x y` with `x u y`, which
//! keeps the endpoints of `A` and needs only that `u` sees both ends.

use std::collections::HashSet;

use log::{debug, warn};
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Colour, ColouredGraph, Vertex};
use crate::matching::max_matching;
use crate::rng::{derive_seed, rng_from_seed, Stage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighbourhoodParams {
    pub epsilon: f64,
    pub c: f64,
    pub m: f64,
    /// Edge budget multiplier; `8 c / epsilon` unless overridden.
    pub big_c: Option<f64>,
    /// Keep one edge per colour of the maximum matching.
    pub rainbow: bool,
    pub max_retries: u32,
}

impl NeighbourhoodParams {
    pub fn new(epsilon: f64, c: f64, m: f64) -> Self {
        NeighbourhoodParams {
            epsilon,
            c,
            m,
            big_c: None,
            rainbow: false,
            max_retries: 5,
        }
    }

    pub fn big_c(&self) -> f64 {
        self.big_c.unwrap_or(8.0 * self.c / self.epsilon)
    }

    /// Fewest matching edges each neighbourhood must hold: the least integer above `c m`.
    pub fn required_count(&self) -> usize {
        (self.c * self.m).floor() as usize + 1
    }

    pub fn edge_budget(&self) -> usize {
        (self.big_c() * self.m).floor() as usize
    }
}

/// Per-sample figures from the random-graph step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDiagnostics {
    pub sampled_edges: usize,
    pub host_edges: usize,
    pub non_isolated: usize,
    pub matching_edges: usize,
    pub min_count: usize,
    pub worst_vertex: Vertex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighbourhoodMatching {
    pub edges: Vec<(Vertex, Vertex)>,
    pub params: NeighbourhoodParams,
    pub p: f64,
    /// Least number of matching edges inside any neighbourhood.
    pub min_count: usize,
    pub worst_vertex: Vertex,
    pub attempts: u32,
    pub samples: Vec<SampleDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AbsorberError {
    #[error("minimum degree {min_degree} is below (1/2 + {epsilon}) n = {required:.1}")]
    Precondition {
        min_degree: usize,
        epsilon: f64,
        required: f64,
    },
    #[error("need more than c m = {cm:.3} edges per neighbourhood but at most C m = {big_cm:.3} edges in total")]
    Infeasible { cm: f64, big_cm: f64 },
    #[error("after {attempts} samples vertex {worst_vertex} sees only {count} matching edges (need {required})")]
    Exhausted {
        attempts: u32,
        worst_vertex: Vertex,
        count: usize,
        required: usize,
    },
    #[error("absorber needs a non-empty matching")]
    EmptyMatching,
    #[error("({a}, {b}) is not a matching edge of the host")]
    NotAMatching { a: Vertex, b: Vertex },
    #[error("no connector between {y} and {x}")]
    NoConnector { y: Vertex, x: Vertex },
    #[error("{u} already lies on the absorber")]
    Overlap { u: Vertex },
    #[error("{size} vertices exceed the absorption capacity {capacity}")]
    CapacityExceeded { size: usize, capacity: usize },
    #[error("no unused core edge has both ends adjacent to {u}")]
    NoEligibleEdge { u: Vertex },
}

/// Counts, for every vertex `v`, the matching edges lying inside `N(v)`.
pub fn neighbourhood_counts(g: &ColouredGraph, edges: &[(Vertex, Vertex)]) -> Vec<usize> {
    let bits = g.adjacency_bits();
    let mut count = vec![0usize; g.n()];
    for &(x, y) in edges {
        for v in bits.row(x).intersection(bits.row(y)) {
            count[v] += 1;
        }
    }
    count
}

/// A matching of at most `C m` edges with more than `c m` edges inside every
/// neighbourhood, from random samples of `G(n, C m / n^2)`.
pub fn neighbourhood_matching(
    g: &ColouredGraph,
    params: &NeighbourhoodParams,
    seed: u64,
) -> Result<NeighbourhoodMatching, AbsorberError> {
    let n = g.n();
    let nf = n as f64;
    let eps = params.epsilon;
    let required_deg = (0.5 + eps) * nf;
    if (g.min_degree() as f64) < required_deg {
        return Err(AbsorberError::Precondition {
            min_degree: g.min_degree(),
            epsilon: eps,
            required: required_deg,
        });
    }
    let (cm, big_cm) = (params.c * params.m, params.big_c() * params.m);
    if params.edge_budget() < params.required_count() {
        return Err(AbsorberError::Infeasible { cm, big_cm });
    }
    let log2 = nf.ln().powi(2);
    if params.m < log2 || params.m > eps * nf {
        warn!(
            "m = {:.1} lies outside [(log n)^2, epsilon n] = [{log2:.1}, {:.1}]",
            params.m,
            eps * nf
        );
    }
    if params.c >= eps / 1024.0 {
        warn!(
            "c = {:.3e} is not below epsilon / 2^10 = {:.3e}",
            params.c,
            eps / 1024.0
        );
    }
    let p = (big_cm / (nf * nf)).clamp(0.0, 1.0);
    let required = params.required_count();
    let mut samples = Vec::new();
    let mut worst = (0usize, usize::MAX);
    for attempt in 0..params.max_retries.max(1) {
        let mut rng = rng_from_seed(derive_seed(
            seed,
            Stage::NeighbourhoodMatching,
            attempt as u64,
        ));
        let sampled = sample_gnp(n, p, &mut rng);
        let mut deg = vec![0usize; n];
        for &(u, v) in &sampled {
            deg[u] += 1;
            deg[v] += 1;
        }
        let non_isolated = sampled
            .iter()
            .filter(|&&(u, v)| deg[u] > 1 || deg[v] > 1)
            .count();
        let in_host: Vec<(Vertex, Vertex)> = sampled
            .iter()
            .copied()
            .filter(|&(u, v)| g.has_edge(u, v))
            .collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &in_host {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mate = max_matching(&adj, None, false);
        let mut edges: Vec<(Vertex, Vertex)> = (0..n)
            .filter_map(|u| mate[u].filter(|&v| u < v).map(|v| (u, v)))
            .collect();
        if params.rainbow {
            let mut seen = HashSet::new();
            edges.retain(|&(u, v)| {
                seen.insert(g.colour(u, v).expect("matching edges lie in the host"))
            });
        }
        let counts = neighbourhood_counts(g, &edges);
        let (worst_vertex, min_count) = counts
            .iter()
            .copied()
            .enumerate()
            .min_by_key(|&(_, c)| c)
            .unwrap_or((0, 0));
        debug!(
            "neighbourhood matching sample {attempt}: {} sampled, {} in host, {} non-isolated, {} matched, min count {min_count}",
            sampled.len(),
            in_host.len(),
            non_isolated,
            edges.len()
        );
        samples.push(SampleDiagnostics {
            sampled_edges: sampled.len(),
            host_edges: in_host.len(),
            non_isolated,
            matching_edges: edges.len(),
            min_count,
            worst_vertex,
        });
        if min_count < worst.1 {
            worst = (worst_vertex, min_count);
        }
        if min_count >= required && edges.len() <= params.edge_budget() {
            return Ok(NeighbourhoodMatching {
                edges,
                params: params.clone(),
                p,
                min_count,
                worst_vertex,
                attempts: attempt + 1,
                samples,
            });
        }
    }
    Err(AbsorberError::Exhausted {
        attempts: params.max_retries.max(1),
        worst_vertex: worst.0,
        count: worst.1,
        required,
    })
}

/// Edges of `G(n, p)` by geometric skipping over the pairs `u < v`.
fn sample_gnp(n: usize, p: f64, rng: &mut crate::rng::Rng) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    if p <= 0.0 || n < 2 {
        return out;
    }
    let total = (n * (n - 1) / 2) as u64;
    if p >= 1.0 {
        for u in 0..n {
            for v in u + 1..n {
                out.push((u, v));
            }
        }
        return out;
    }
    let skip = Geometric::new(p).expect("0 < p < 1");
    let mut idx = skip.sample(rng);
    while idx < total {
        out.push(pair_of(n, idx));
        idx = idx.saturating_add(1 + skip.sample(rng));
    }
    out
}

/// The `idx`-th pair in row-major order of the strict upper triangle.
fn pair_of(n: usize, mut idx: u64) -> (Vertex, Vertex) {
    let mut u = 0usize;
    loop {
        let row = (n - 1 - u) as u64;
        if idx < row {
            return (u, u + 1 + idx as usize);
        }
        idx -= row;
        u += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorberCertificate {
    pub path: Vec<Vertex>,
    /// Core edges `(x_i, y_i)` in path order.
    pub core_matching: Vec<(Vertex, Vertex)>,
    pub connectors: Vec<Vertex>,
    pub endpoints: (Vertex, Vertex),
    /// Largest `|U|` absorption is guaranteed for.
    pub capacity: usize,
    pub vertex_count: usize,
    /// Colours of the path edges.
    pub colours: Vec<Colour>,
}

impl AbsorberCertificate {
    pub fn t(&self) -> usize {
        self.core_matching.len()
    }

    /// Host edge indices of the core matching.
    pub fn core_edge_indices(&self, g: &ColouredGraph) -> Vec<usize> {
        self.core_matching
            .iter()
            .map(|&(x, y)| g.edge_index(x, y).expect("core edges lie in the host"))
            .collect()
    }
}

/// Chains the edges of `matching` into a path through connectors
/// `z_k` in `N(y_k) ∩ N(x_{k+1})` outside `V(M)` and earlier connectors.
/// With `fresh_colours`, connectors whose two edges bring unused colours are
/// preferred, so a rainbow matching yields a rainbow path where possible.
pub fn build_absorber(
    g: &ColouredGraph,
    matching: &[(Vertex, Vertex)],
    fresh_colours: bool,
) -> Result<AbsorberCertificate, AbsorberError> {
    if matching.is_empty() {
        return Err(AbsorberError::EmptyMatching);
    }
    let n = g.n();
    let mut blocked = vec![false; n];
    for &(x, y) in matching {
        if x >= n || y >= n || !g.has_edge(x, y) || blocked[x] || blocked[y] {
            return Err(AbsorberError::NotAMatching { a: x, b: y });
        }
        blocked[x] = true;
        blocked[y] = true;
    }
    let bits = g.adjacency_bits();
    let mut used: HashSet<Colour> = HashSet::new();
    if fresh_colours {
        used.extend(
            matching
                .iter()
                .map(|&(x, y)| g.colour(x, y).expect("checked above")),
        );
    }
    let mut path = vec![matching[0].0, matching[0].1];
    let mut connectors = Vec::with_capacity(matching.len() - 1);
    for w in matching.windows(2) {
        let (y, x) = (w[0].1, w[1].0);
        let mut best: Option<(u8, Vertex)> = None;
        for z in bits.row(y).intersection(bits.row(x)) {
            if blocked[z] {
                continue;
            }
            if !fresh_colours {
                best = Some((0, z));
                break;
            }
            let (a, b) = (
                g.colour(y, z).expect("adjacent"),
                g.colour(z, x).expect("adjacent"),
            );
            let score = u8::from(!used.contains(&a)) + u8::from(!used.contains(&b) && a != b);
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, z));
                if score == 2 {
                    break;
                }
            }
        }
        let (_, z) = best.ok_or(AbsorberError::NoConnector { y, x })?;
        blocked[z] = true;
        if fresh_colours {
            used.insert(g.colour(y, z).expect("adjacent"));
            used.insert(g.colour(z, x).expect("adjacent"));
        }
        connectors.push(z);
        path.extend([z, w[1].0, w[1].1]);
    }
    let counts = neighbourhood_counts(g, matching);
    let capacity = (0..n)
        .filter(|&v| !blocked[v])
        .map(|v| counts[v])
        .min()
        .unwrap_or(0);
    let colours = path
        .windows(2)
        .map(|w| g.colour(w[0], w[1]).expect("path edges"))
        .collect();
    Ok(AbsorberCertificate {
        endpoints: (path[0], *path.last().expect("non-empty")),
        vertex_count: path.len(),
        path,
        core_matching: matching.to_vec(),
        connectors,
        capacity,
        colours,
    })
}

/// Absorbs `u_set` into the absorber, processing vertices in order and
/// using the lowest-index unused core edge whose ends both see `u`.
pub fn absorb(
    cert: &AbsorberCertificate,
    u_set: &[Vertex],
    g: &ColouredGraph,
) -> Result<Vec<Vertex>, AbsorberError> {
    if u_set.len() > cert.capacity {
        return Err(AbsorberError::CapacityExceeded {
            size: u_set.len(),
            capacity: cert.capacity,
        });
    }
    let on_path: HashSet<Vertex> = cert.path.iter().copied().collect();
    let mut seen = HashSet::new();
    for &u in u_set {
        if on_path.contains(&u) || !seen.insert(u) {
            return Err(AbsorberError::Overlap { u });
        }
    }
    let mut inserted: Vec<Option<Vertex>> = vec![None; cert.t()];
    for &u in u_set {
        let i = (0..cert.t())
            .find(|&i| {
                let (x, y) = cert.core_matching[i];
                inserted[i].is_none() && g.has_edge(x, u) && g.has_edge(u, y)
            })
            .ok_or(AbsorberError::NoEligibleEdge { u })?;
        inserted[i] = Some(u);
    }
    let mut out = Vec::with_capacity(cert.path.len() + u_set.len());
    for (i, &(x, y)) in cert.core_matching.iter().enumerate() {
        out.push(x);
        out.extend(inserted[i]);
        out.push(y);
        if i + 1 < cert.t() {
            out.push(cert.connectors[i]);
        }
    }
    assert_eq!(
        out.first(),
        cert.path.first(),
        "absorption moved an endpoint"
    );
    assert_eq!(out.last(), cert.path.last(), "absorption moved an endpoint");
    assert_eq!(out.len(), cert.path.len() + u_set.len());
    assert!(
        out.windows(2).all(|w| g.has_edge(w[0], w[1])),
        "absorption left the host"
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::rainbow_complete;
    use std::collections::BTreeSet;

    #[test]
    fn two_edges_in_k6() {
        let g = rainbow_complete(6);
        let a = build_absorber(&g, &[(0, 1), (2, 3)], false).unwrap();
        assert_eq!(a.path.len(), 5);
        assert_eq!(a.vertex_count, 3 * 2 - 1);
        assert_eq!(a.endpoints, (0, 3));
        assert!(a.connectors[0] >= 4);
        assert_eq!(a.capacity, 2);
    }

    #[test]
    fn single_edge_absorber() {
        let g = rainbow_complete(5);
        let a = build_absorber(&g, &[(1, 4)], true).unwrap();
        assert_eq!(a.path, vec![1, 4]);
        assert!(a.connectors.is_empty());
        assert!(matches!(
            build_absorber(&g, &[], false),
            Err(AbsorberError::EmptyMatching)
        ));
    }

    #[test]
    fn absorb_fills_capacity_on_complete_host() {
        let g = rainbow_complete(20);
        let m: Vec<(usize, usize)> = (0..5).map(|i| (2 * i, 2 * i + 1)).collect();
        let a = build_absorber(&g, &m, true).unwrap();
        assert_eq!(a.capacity, 5);
        assert_eq!(absorb(&a, &[], &g).unwrap(), a.path);
        let outside: Vec<Vertex> = (0..20).filter(|v| !a.path.contains(v)).take(5).collect();
        let p = absorb(&a, &outside, &g).unwrap();
        let vs: BTreeSet<Vertex> = p.iter().copied().collect();
        let want: BTreeSet<Vertex> = a.path.iter().chain(&outside).copied().collect();
        assert_eq!(vs, want);
        let six: Vec<Vertex> = (0..20).filter(|v| !a.path.contains(v)).take(6).collect();
        assert!(matches!(
            absorb(&a, &six, &g),
            Err(AbsorberError::CapacityExceeded { .. })
        ));
        assert!(matches!(
            absorb(&a, &[a.path[0]], &g),
            Err(AbsorberError::Overlap { .. })
        ));
    }

    #[test]
    fn complete_host_matching_counts_every_edge() {
        let g = rainbow_complete(30);
        let mut params = NeighbourhoodParams::new(0.45, 0.05, 40.0);
        params.big_c = Some(0.5);
        let nm = neighbourhood_matching(&g, &params, 3).unwrap();
        let counts = neighbourhood_counts(&g, &nm.edges);
        let covered: BTreeSet<Vertex> = nm.edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        for v in 0..30 {
            let expect = nm.edges.len() - usize::from(covered.contains(&v));
            assert_eq!(counts[v], expect);
        }
        assert!(nm.edges.len() <= params.edge_budget());
        assert!(nm.min_count >= params.required_count());
    }

    #[test]
    fn rejections() {
        let sparse = crate::graph::fixtures::cycle(10, &[0, 1]);
        let params = NeighbourhoodParams::new(0.1, 0.01, 10.0);
        assert!(matches!(
            neighbourhood_matching(&sparse, &params, 0),
            Err(AbsorberError::Precondition { .. })
        ));
        let g = rainbow_complete(40);
        let tiny = NeighbourhoodParams::new(0.1, 0.1 / 2048.0, 14.0);
        assert!(matches!(
            neighbourhood_matching(&g, &tiny, 0),
            Err(AbsorberError::Infeasible { .. })
        ));
    }

    #[test]
    fn pair_indexing_is_row_major() {
        let n = 6;
        let mut idx = 0;
        for u in 0..n {
            for v in u + 1..n {
                assert_eq!(pair_of(n, idx), (u, v));
                idx += 1;
            }
        }
    }
}
