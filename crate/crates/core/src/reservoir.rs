//! Reservoirs: small vertex sets holding common neighbours of every pair.

use fixedbitset::FixedBitSet;
use log::{debug, warn};
use rand::seq::IndexedRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ColouredGraph, Vertex};
use crate::rng::{derive_seed, rng_from_seed, Stage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSet {
    pub vertices: Vec<Vertex>,
    pub epsilon: f64,
    /// `min |N(x) ∩ N(y) ∩ R|` over all pairs `x != y`.
    pub min_codegree: usize,
    pub worst_pair: (Vertex, Vertex),
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReservoirError {
    #[error("reservoir of size {size} does not fit in the {available} available vertices")]
    TooLarge { size: usize, available: usize },
    #[error("reservoir must be non-empty and the host needs two vertices")]
    Degenerate,
    #[error("after {attempts} samples the pair {pair:?} has {codegree} common neighbours in R (need {required})")]
    Exhausted {
        attempts: u32,
        pair: (Vertex, Vertex),
        codegree: usize,
        required: usize,
    },
}

impl ReservoirSet {
    /// Fewest common neighbours in `R` every pair must have.
    pub fn required(&self) -> usize {
        required(self.epsilon, self.vertices.len())
    }

    /// Recomputes every pairwise codegree from the host adjacency.
    pub fn verify(&self, g: &ColouredGraph) -> bool {
        let n = g.n();
        let need = self.required();
        let bits = g.adjacency_bits();
        let worst = (0..n)
            .into_par_iter()
            .map(|x| {
                (x + 1..n)
                    .map(|y| {
                        self.vertices
                            .iter()
                            .filter(|&&r| bits.contains(x, r) && bits.contains(y, r))
                            .count()
                    })
                    .min()
                    .unwrap_or(usize::MAX)
            })
            .min()
            .unwrap_or(usize::MAX);
        worst >= need && worst == self.min_codegree
    }
}

fn required(epsilon: f64, size: usize) -> usize {
    (epsilon * size as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Minimum pairwise codegree into `r`, with a pair attaining it.
pub fn min_codegree_into(g: &ColouredGraph, r: &[Vertex]) -> (usize, (Vertex, Vertex)) {
    let n = g.n();
    let mut in_r = FixedBitSet::with_capacity(n);
    for &v in r {
        in_r.insert(v);
    }
    let bits = g.adjacency_bits();
    let rows: Vec<FixedBitSet> = (0..n)
        .map(|x| {
            let mut row = bits.row(x).clone();
            row.intersect_with(&in_r);
            row
        })
        .collect();
    (0..n)
        .into_par_iter()
        .filter_map(|x| {
            (x + 1..n)
                .map(|y| (rows[x].intersection_count(&rows[y]), (x, y)))
                .min()
        })
        .min()
        .unwrap_or((usize::MAX, (0, 0)))
}

/// Uniform `size`-subsets of `V(G) \ W`, resampled until every pair of host
/// vertices has at least `epsilon |R|` common neighbours inside.
pub fn build_reservoir(
    g: &ColouredGraph,
    excluded: &[Vertex],
    size: usize,
    epsilon: f64,
    seed: u64,
    max_retries: u32,
) -> Result<ReservoirSet, ReservoirError> {
    let n = g.n();
    if size == 0 || n < 2 {
        return Err(ReservoirError::Degenerate);
    }
    let mut banned = vec![false; n];
    for &w in excluded {
        banned[w] = true;
    }
    let pool: Vec<Vertex> = (0..n).filter(|&v| !banned[v]).collect();
    if size > pool.len() {
        return Err(ReservoirError::TooLarge {
            size,
            available: pool.len(),
        });
    }
    if excluded.len() as f64 > epsilon * n as f64 / 2.0 {
        warn!(
            "excluded set of {} exceeds epsilon n / 2 = {:.1}",
            excluded.len(),
            epsilon * n as f64 / 2.0
        );
    }
    let need = required(epsilon, size);
    let mut worst = (usize::MAX, (0, 0));
    for attempt in 0..max_retries.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, Stage::Reservoir, attempt as u64));
        let mut vertices: Vec<Vertex> = pool.choose_multiple(&mut rng, size).copied().collect();
        vertices.sort_unstable();
        let (min_codegree, pair) = min_codegree_into(g, &vertices);
        debug!("reservoir sample {attempt}: min codegree {min_codegree} at {pair:?}, need {need}");
        if min_codegree < worst.0 {
            worst = (min_codegree, pair);
        }
        if min_codegree >= need {
            return Ok(ReservoirSet {
                vertices,
                epsilon,
                min_codegree,
                worst_pair: pair,
                attempts: attempt + 1,
            });
        }
    }
    Err(ReservoirError::Exhausted {
        attempts: max_retries.max(1),
        pair: worst.1,
        codegree: worst.0,
        required: need,
    })
}
