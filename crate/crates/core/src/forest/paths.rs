//! Chaining slab matchings into paths.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::partition::PartitionPlan;
use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathBuildError {
    #[error("expected {expected} matchings, got {got}")]
    SlabCount { expected: usize, got: usize },
    #[error("pair {u}-{v} of matching {slab} does not join V_{} and V_{slab}", .slab - 1)]
    NotInSlab { slab: usize, u: Vertex, v: Vertex },
    #[error("vertex {vertex} is covered twice by matching {slab}")]
    NotAMatching { slab: usize, vertex: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathBuild {
    /// Paths with at least one edge, each starting in `V_0`.
    pub paths: Vec<Vec<Vertex>>,
    /// Paths that reached `V_m`.
    pub full_length: usize,
    pub deficiencies: Vec<usize>,
    /// `n' - sum of deficiencies`, a lower bound on `full_length`.
    pub guaranteed: usize,
}

/// Follows matching `i` from `V_{i-1}` into `V_i` for every path started in
/// `V_0`. A path that cannot continue keeps the prefix it has.
pub fn build_path_forest(
    matchings: &[Vec<(Vertex, Vertex)>],
    plan: &PartitionPlan,
) -> Result<PathBuild, PathBuildError> {
    if matchings.len() != plan.m {
        return Err(PathBuildError::SlabCount {
            expected: plan.m,
            got: matchings.len(),
        });
    }
    let mut part_of: HashMap<Vertex, usize> = HashMap::new();
    for (i, part) in plan.vertex_parts.iter().enumerate() {
        for &v in part {
            part_of.insert(v, i);
        }
    }
    let mut next: Vec<HashMap<Vertex, Vertex>> = Vec::with_capacity(plan.m);
    for (k, mat) in matchings.iter().enumerate() {
        let slab = k + 1;
        let mut step = HashMap::new();
        let mut seen_right = HashMap::new();
        for &(a, b) in mat {
            let (u, v) = match (part_of.get(&a), part_of.get(&b)) {
                (Some(&pa), Some(&pb)) if pa == k && pb == slab => (a, b),
                (Some(&pa), Some(&pb)) if pb == k && pa == slab => (b, a),
                _ => return Err(PathBuildError::NotInSlab { slab, u: a, v: b }),
            };
            if step.insert(u, v).is_some() {
                return Err(PathBuildError::NotAMatching { slab, vertex: u });
            }
            if seen_right.insert(v, u).is_some() {
                return Err(PathBuildError::NotAMatching { slab, vertex: v });
            }
        }
        next.push(step);
    }
    let mut paths = Vec::new();
    let mut full_length = 0;
    for &start in plan.vertex_parts.first().map(Vec::as_slice).unwrap_or(&[]) {
        let mut path = vec![start];
        for step in &next {
            match step.get(path.last().expect("path is non-empty")) {
                Some(&v) => path.push(v),
                None => break,
            }
        }
        if path.len() == plan.m + 1 {
            full_length += 1;
        }
        if path.len() > 1 {
            paths.push(path);
        }
    }
    let deficiencies: Vec<usize> = matchings
        .iter()
        .map(|m| plan.n_prime.saturating_sub(m.len()))
        .collect();
    let guaranteed = plan.n_prime.saturating_sub(deficiencies.iter().sum());
    debug_assert!(full_length >= guaranteed);
    Ok(PathBuild {
        paths,
        full_length,
        deficiencies,
        guaranteed,
    })
}
