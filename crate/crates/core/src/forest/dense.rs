//! Rainbow path forests in very dense hosts.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use super::merge::merge_rainbow_paths;
use crate::graph::{ColouredGraph, GraphError, PathForest, Vertex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DenseForestError {
    #[error("minimum degree {min_degree} is below (1 - {delta}) n = {required:.1}")]
    MinDegree {
        min_degree: usize,
        delta: f64,
        required: f64,
    },
    #[error("3 gamma delta - gamma^2 / 2 = {value:.6} is not above 1/n = {threshold:.6}")]
    Arithmetic { value: f64, threshold: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Serialize)]
pub struct DenseForest {
    pub forest: PathForest,
    pub edges: usize,
    /// Components, counting uncovered vertices as one-vertex paths.
    pub paths: usize,
    pub target_edges: f64,
    pub max_paths: f64,
    pub shortfall: bool,
}

/// Maximal rainbow linear forest grown greedily from single vertices.
/// Aims at `e(F) >= (1 - 4 delta) n` with at most `gamma n` paths.
pub fn rainbow_forest_dense(
    g: &ColouredGraph,
    delta: f64,
    gamma: f64,
    seed: u64,
) -> Result<DenseForest, DenseForestError> {
    g.ensure_proper()?;
    let n = g.n();
    let value = 3.0 * gamma * delta - gamma * gamma / 2.0;
    let threshold = 1.0 / n.max(1) as f64;
    if value <= threshold {
        return Err(DenseForestError::Arithmetic { value, threshold });
    }
    let required = (1.0 - delta) * n as f64;
    if (g.min_degree() as f64) < required {
        return Err(DenseForestError::MinDegree {
            min_degree: g.min_degree(),
            delta,
            required,
        });
    }
    let all: Vec<Vertex> = (0..n).collect();
    let merged = merge_rainbow_paths(g, &[], &all, &HashSet::new(), seed);
    let paths = merged.paths.len() + merged.loose.len();
    let forest =
        PathForest::new(g, merged.paths).expect("merge output is a path forest of the host");
    assert!(forest.rainbow, "dense forest lost rainbowness");
    let edges = forest.edge_count();
    let target_edges = (1.0 - 4.0 * delta) * n as f64;
    let max_paths = gamma * n as f64;
    Ok(DenseForest {
        shortfall: (edges as f64) < target_edges || paths as f64 > max_paths,
        forest,
        edges,
        paths,
        target_edges,
        max_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::rainbow_complete;

    /// Round-robin 1-factorisation of K_n, n even: n - 1 perfect matchings.
    fn one_factorisation(n: usize) -> ColouredGraph {
        let mut triples = Vec::new();
        for r in 0..n - 1 {
            triples.push((n - 1, r, r as u32));
            for k in 1..n / 2 {
                let a = (r + k) % (n - 1);
                let b = (r + n - 1 - k) % (n - 1);
                triples.push((a, b, r as u32));
            }
        }
        ColouredGraph::new(n, triples).unwrap()
    }

    #[test]
    fn rainbow_complete_gives_hamilton_path() {
        let g = rainbow_complete(40);
        let d = rainbow_forest_dense(&g, 0.1, 0.3, 2).unwrap();
        assert_eq!((d.paths, d.edges), (1, 39));
        assert!(!d.shortfall);
    }

    #[test]
    fn eighth_deficient_host_reaches_half() {
        let g = one_factorisation(64);
        assert!(g.is_proper());
        for seed in 0..5 {
            let d = rainbow_forest_dense(&g, 0.125, 0.5, seed).unwrap();
            assert!(d.edges >= 32, "seed {seed}: {} edges", d.edges);
        }
    }

    #[test]
    fn rejects_bad_arithmetic_and_sparse_hosts() {
        let g = rainbow_complete(10);
        assert!(matches!(
            rainbow_forest_dense(&g, 0.2, 0.001, 0),
            Err(DenseForestError::Arithmetic { .. })
        ));
        let sparse = ColouredGraph::new(10, [(0, 1, 0)]).unwrap();
        assert!(matches!(
            rainbow_forest_dense(&sparse, 0.3, 0.5, 0),
            Err(DenseForestError::MinDegree { .. })
        ));
    }
}
