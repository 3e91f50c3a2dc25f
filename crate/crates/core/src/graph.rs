//! Edge-coloured simple graphs.
//!
//! A [`ColouredGraph`] is immutable once built. Edges are stored with
//! `u < v`, sorted lexicographically, and every edge carries one
//! [`Colour`]. Derived graphs (spanning or induced subgraphs) keep the
//! parent's colour identifiers unchanged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colour(pub u32);

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub colour: Colour,
}

impl Edge {
    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }

    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{} (colour {})", self.u, self.v, self.colour)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("edge {u}-{v} has an endpoint outside [0, {n})")]
    OutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("{0}-{1} is not an edge of the graph")]
    NotAnEdge(Vertex, Vertex),
    #[error("colouring is not proper: {0} and {1} share a colour at a common vertex")]
    Improper(Edge, Edge),
    #[error("split factor must be at least 1")]
    ZeroFactor,
    #[error("colour identifier overflow while splitting colour {0} by {1}")]
    ColourOverflow(Colour, u32),
}

#[derive(Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    n: usize,
    edges: Vec<Edge>,
    /// `adj[v]` holds `(neighbour, edge index)` sorted by neighbour.
    adj: Vec<Vec<(Vertex, usize)>>,
}

impl fmt::Debug for ColouredGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ColouredGraph")
            .field("n", &self.n)
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl ColouredGraph {
    /// Builds a graph from `(u, v, colour)` triples in any order and orientation.
    pub fn new<I>(n: usize, triples: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, u32)>,
    {
        let mut edges = Vec::new();
        for (a, b, c) in triples {
            if a >= n || b >= n {
                return Err(GraphError::OutOfRange { u: a, v: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            edges.push(Edge {
                u,
                v,
                colour: Colour(c),
            });
        }
        edges.sort_unstable_by_key(|e| (e.u, e.v));
        for w in edges.windows(2) {
            if w[0].u == w[1].u && w[0].v == w[1].v {
                return Err(GraphError::DuplicateEdge(w[0].u, w[0].v));
            }
        }
        Ok(Self::from_sorted_edges(n, edges))
    }

    /// `edges` must already be normalised, sorted and duplicate-free.
    pub(crate) fn from_sorted_edges(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges
            .windows(2)
            .all(|w| (w[0].u, w[0].v) < (w[1].u, w[1].v)));
        let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        ColouredGraph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Edge {
        self.edges[index]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn incident(&self, v: Vertex) -> &[(Vertex, usize)] {
        &self.adj[v]
    }

    pub fn neighbours(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a]
            .binary_search_by_key(&b, |&(w, _)| w)
            .ok()
            .map(|pos| self.adj[a][pos].1)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn colour(&self, u: Vertex, v: Vertex) -> Option<Colour> {
        self.edge_index(u, v).map(|i| self.edges[i].colour)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edge indices grouped by colour.
    pub fn colour_classes(&self) -> BTreeMap<Colour, Vec<usize>> {
        let mut classes: BTreeMap<Colour, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            classes.entry(e.colour).or_default().push(i);
        }
        classes
    }

    pub fn colour_set(&self) -> BTreeSet<Colour> {
        self.edges.iter().map(|e| e.colour).collect()
    }

    /// Largest colour class; the least `b` for which the colouring is `b`-bounded.
    pub fn max_colour_multiplicity(&self) -> usize {
        let mut counts: HashMap<Colour, usize> = HashMap::new();
        for e in &self.edges {
            *counts.entry(e.colour).or_default() += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    /// One past the largest colour identifier in use.
    pub fn colour_span(&self) -> usize {
        self.edges
            .iter()
            .map(|e| e.colour.0 as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// First pair of incident edges sharing a colour, if any.
    pub fn properness_witness(&self) -> Option<(Edge, Edge)> {
        let mut seen: HashMap<Colour, usize> = HashMap::new();
        for v in 0..self.n {
            seen.clear();
            for &(_, ei) in &self.adj[v] {
                let c = self.edges[ei].colour;
                if let Some(&prev) = seen.get(&c) {
                    return Some((self.edges[prev], self.edges[ei]));
                }
                seen.insert(c, ei);
            }
        }
        None
    }

    pub fn is_proper(&self) -> bool {
        self.properness_witness().is_none()
    }

    pub fn ensure_proper(&self) -> Result<(), GraphError> {
        match self.properness_witness() {
            Some((a, b)) => Err(GraphError::Improper(a, b)),
            None => Ok(()),
        }
    }

    /// Spanning subgraph on the given edge indices.
    pub fn spanning_subgraph<I>(&self, edge_indices: I) -> ColouredGraph
    where
        I: IntoIterator<Item = usize>,
    {
        let mut idx: Vec<usize> = edge_indices.into_iter().collect();
        idx.sort_unstable();
        idx.dedup();
        let edges = idx.into_iter().map(|i| self.edges[i]).collect();
        ColouredGraph::from_sorted_edges(self.n, edges)
    }

    /// Spanning subgraph keeping only edges whose colour satisfies `keep`.
    pub fn filter_colours(&self, mut keep: impl FnMut(Colour) -> bool) -> ColouredGraph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| keep(e.colour))
            .collect();
        ColouredGraph::from_sorted_edges(self.n, edges)
    }

    /// Subgraph induced by `vertices`, relabelled to `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[Vertex]) -> InducedSubgraph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            let (a, b) = (local[e.u], local[e.v]);
            if a != usize::MAX && b != usize::MAX {
                let (u, v) = if a < b { (a, b) } else { (b, a) };
                edges.push(Edge {
                    u,
                    v,
                    colour: e.colour,
                });
            }
        }
        edges.sort_unstable_by_key(|e| (e.u, e.v));
        InducedSubgraph {
            graph: ColouredGraph::from_sorted_edges(vertices.len(), edges),
            to_parent: vertices.to_vec(),
        }
    }

    /// Neighbourhoods as bitsets, for codegree-heavy work.
    pub fn adjacency_bits(&self) -> AdjacencyBits {
        let rows = (0..self.n)
            .map(|v| {
                let mut row = FixedBitSet::with_capacity(self.n);
                for &(w, _) in &self.adj[v] {
                    row.insert(w);
                }
                row
            })
            .collect();
        AdjacencyBits { rows }
    }

    /// Renumbers colours densely (`0..k`) in order of first appearance along
    /// the sorted edge list. Returns the new graph and the new-to-old table.
    pub fn canonicalize(&self) -> (ColouredGraph, Vec<Colour>) {
        let mut map: HashMap<Colour, u32> = HashMap::new();
        let mut back = Vec::new();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let next = map.len() as u32;
                let c = *map.entry(e.colour).or_insert_with(|| {
                    back.push(e.colour);
                    next
                });
                Edge {
                    colour: Colour(c),
                    ..*e
                }
            })
            .collect();
        (ColouredGraph::from_sorted_edges(self.n, edges), back)
    }
}

/// An induced subgraph together with its vertex map into the parent.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: ColouredGraph,
    pub to_parent: Vec<Vertex>,
}

impl InducedSubgraph {
    pub fn lift(&self, v: Vertex) -> Vertex {
        self.to_parent[v]
    }

    pub fn lift_path(&self, path: &[Vertex]) -> Vec<Vertex> {
        path.iter().map(|&v| self.to_parent[v]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct AdjacencyBits {
    rows: Vec<FixedBitSet>,
}

impl AdjacencyBits {
    pub fn row(&self, v: Vertex) -> &FixedBitSet {
        &self.rows[v]
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.rows[u].contains(v)
    }

    pub fn codegree(&self, u: Vertex, v: Vertex) -> usize {
        self.rows[u].intersection_count(&self.rows[v])
    }
}

/// Summary of a colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColouringReport {
    pub is_proper: bool,
    /// Least `b` such that the colouring is `b`-bounded; 0 for an edgeless graph.
    pub max_colour_multiplicity: usize,
    pub distinct_colours: usize,
    pub min_degree: usize,
}

pub fn validate(g: &ColouredGraph) -> ColouringReport {
    ColouringReport {
        is_proper: g.is_proper(),
        max_colour_multiplicity: g.max_colour_multiplicity(),
        distinct_colours: g.colour_set().len(),
        min_degree: g.min_degree(),
    }
}

/// Number of distinct colours on the listed vertex pairs, each of which must
/// be an edge of `g`.
pub fn distinct_colours_of(
    g: &ColouredGraph,
    pairs: &[(Vertex, Vertex)],
) -> Result<usize, GraphError> {
    let mut colours = BTreeSet::new();
    for &(u, v) in pairs {
        let c = g.colour(u, v).ok_or(GraphError::NotAnEdge(u, v))?;
        colours.insert(c);
    }
    Ok(colours.len())
}

/// Edges of the closed walk `cycle[0], cycle[1], ..., cycle[0]`.
pub fn cycle_pairs(cycle: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    let k = cycle.len();
    if k < 2 {
        return Vec::new();
    }
    (0..k).map(|i| (cycle[i], cycle[(i + 1) % k])).collect()
}

pub fn path_pairs(path: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    path.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Result of [`split_colours`].
#[derive(Debug, Clone)]
pub struct SplitColouring {
    pub graph: ColouredGraph,
    /// New colour to the colour it was split from.
    pub origin: BTreeMap<Colour, Colour>,
}

impl SplitColouring {
    pub fn original(&self, c: Colour) -> Colour {
        self.origin[&c]
    }
}

/// Splits each colour class into `factor` classes of near-equal size.
///
/// Within a class the edges are taken in lexicographic endpoint order and the
/// `j`-th receives sub-colour `j mod factor`; the new identifier is
/// `old * factor + sub`, so `factor == 1` reproduces the input colouring.
pub fn split_colours(g: &ColouredGraph, factor: u32) -> Result<SplitColouring, GraphError> {
    if factor == 0 {
        return Err(GraphError::ZeroFactor);
    }
    g.ensure_proper()?;
    let mut next_sub: HashMap<Colour, u32> = HashMap::new();
    let mut origin = BTreeMap::new();
    let mut edges = Vec::with_capacity(g.edge_count());
    // g.edges() is already in lexicographic endpoint order.
    for e in g.edges() {
        let sub = next_sub.entry(e.colour).or_insert(0);
        let id = e
            .colour
            .0
            .checked_mul(factor)
            .and_then(|x| x.checked_add(*sub % factor))
            .ok_or(GraphError::ColourOverflow(e.colour, factor))?;
        *sub += 1;
        origin.insert(Colour(id), e.colour);
        edges.push(Edge {
            colour: Colour(id),
            ..*e
        });
    }
    Ok(SplitColouring {
        graph: ColouredGraph::from_sorted_edges(g.n(), edges),
        origin,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("vertex {0} appears in more than one place in the forest")]
    RepeatedVertex(Vertex),
    #[error("consecutive path vertices {0} and {1} are not adjacent")]
    MissingEdge(Vertex, Vertex),
    #[error("vertex {0} is outside the host graph")]
    OutOfRange(Vertex),
}

/// Vertex-disjoint paths in a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathForest {
    pub paths: Vec<Vec<Vertex>>,
    /// All edges across all paths carry pairwise distinct colours.
    pub rainbow: bool,
}

impl PathForest {
    /// Checks disjointness and adjacency against `g` and computes the rainbow flag.
    /// Empty paths are dropped.
    pub fn new(g: &ColouredGraph, paths: Vec<Vec<Vertex>>) -> Result<Self, ForestError> {
        let paths: Vec<Vec<Vertex>> = paths.into_iter().filter(|p| !p.is_empty()).collect();
        let mut seen = vec![false; g.n()];
        let mut colours = BTreeSet::new();
        let mut rainbow = true;
        for p in &paths {
            for &v in p {
                if v >= g.n() {
                    return Err(ForestError::OutOfRange(v));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(ForestError::RepeatedVertex(v));
                }
            }
            for w in p.windows(2) {
                let c = g
                    .colour(w[0], w[1])
                    .ok_or(ForestError::MissingEdge(w[0], w[1]))?;
                rainbow &= colours.insert(c);
            }
        }
        Ok(PathForest { paths, rainbow })
    }

    pub fn empty() -> Self {
        PathForest {
            paths: Vec::new(),
            rainbow: true,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.paths.iter().map(|p| p.len().saturating_sub(1)).sum()
    }

    /// Paths with at least one edge.
    pub fn nontrivial_paths(&self) -> usize {
        self.paths.iter().filter(|p| p.len() > 1).count()
    }

    pub fn edge_pairs(&self) -> Vec<(Vertex, Vertex)> {
        self.paths.iter().flat_map(|p| path_pairs(p)).collect()
    }

    pub fn colours(&self, g: &ColouredGraph) -> BTreeSet<Colour> {
        self.edge_pairs()
            .into_iter()
            .filter_map(|(u, v)| g.colour(u, v))
            .collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.paths.iter().flatten().copied()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// K4 with the three perfect matchings coloured 0, 1, 2.
    pub fn k4_three_matchings() -> ColouredGraph {
        ColouredGraph::new(
            4,
            [
                (0, 1, 0),
                (2, 3, 0),
                (0, 2, 1),
                (1, 3, 1),
                (0, 3, 2),
                (1, 2, 2),
            ],
        )
        .unwrap()
    }

    pub fn rainbow_complete(n: usize) -> ColouredGraph {
        let mut triples = Vec::new();
        let mut c = 0;
        for u in 0..n {
            for v in u + 1..n {
                triples.push((u, v, c));
                c += 1;
            }
        }
        ColouredGraph::new(n, triples).unwrap()
    }

    pub fn cycle(n: usize, colours: &[u32]) -> ColouredGraph {
        ColouredGraph::new(
            n,
            (0..n).map(|i| (i, (i + 1) % n, colours[i % colours.len()])),
        )
        .unwrap()
    }
}
