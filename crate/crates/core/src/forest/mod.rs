//! Near-spanning rainbow path forests.
//!
//! The host is regularised, its vertices split into `m + 1` equal parts and
//! its colours into `m` parts. Slab `i` keeps the edges between parts
//! `i - 1` and `i` whose colour lies in colour part `i`; a rainbow matching
//! per slab is then chained into paths starting in part 0. Disjoint colour
//! parts make the union of the matchings rainbow.

pub mod dense;
pub mod merge;
pub mod near_regular;
pub mod partition;
pub mod paths;
pub mod rainbow_matching;

use std::collections::{BTreeSet, HashSet};

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Colour, ColouredGraph, ForestError, GraphError, PathForest, Vertex};
use crate::regular::{regular_spanning_subgraph, RegularizeError};
use crate::rng::{derive_seed, Stage};

pub use dense::{rainbow_forest_dense, DenseForest, DenseForestError};
pub use merge::{merge_rainbow_paths, MergeOutcome};
pub use near_regular::{
    check_degrees, check_near_regular, NearRegularityParams, NearRegularityReport,
};
pub use partition::{
    certify_partition, partition_colours, partition_plan, partition_vertices, CertifiedPlan,
    CertifyConfig, CertifyFailure, PartitionError, PartitionPlan, SlabCertificate, VertexPartition,
};
pub use paths::{build_path_forest, PathBuild, PathBuildError};
pub use rainbow_matching::{
    rainbow_matching, rainbow_matching_with, rainbow_upper_bound, MatchingEffort, RainbowMatching,
    SlabEdge, SlabGraph,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestConfig {
    pub alpha: f64,
    /// Slab count; defaults to `floor(n^alpha) - 1`.
    pub m: Option<usize>,
    /// Defaults to `n^(-sqrt(alpha))`, raised to `gamma_floor`.
    pub gamma: Option<f64>,
    pub gamma_floor: f64,
    /// Matching deficiency; defaults to `n^(-2 alpha)`.
    pub q: Option<f64>,
    pub max_resamples: u32,
    /// Colours the forest must not use.
    pub excluded_colours: BTreeSet<Colour>,
    /// Below this many vertices a small-n warning is raised.
    pub n0: usize,
    pub merge_paths: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            alpha: 0.25,
            m: None,
            gamma: None,
            gamma_floor: 0.25,
            q: None,
            max_resamples: 10,
            excluded_colours: BTreeSet::new(),
            n0: 100_000,
            merge_paths: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum ForestBuildError {
    #[error("validation: {0}")]
    Improper(#[from] GraphError),
    #[error("regularize: {0}")]
    Regularize(#[from] RegularizeError),
    #[error("partition: {0}")]
    Partition(#[from] PartitionError),
    #[error("certify: {0}")]
    Certify(#[from] CertifyFailure),
    #[error("paths: {0}")]
    Paths(#[from] PathBuildError),
    #[error("forest: {0}")]
    Forest(#[from] ForestError),
}

#[derive(Debug, Clone, Serialize)]
pub struct SlabSummary {
    pub index: usize,
    pub edges: usize,
    pub size: usize,
    pub target: usize,
    pub upper_bound: usize,
    pub shortfall: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForestReport {
    pub n: usize,
    pub r: Option<usize>,
    pub m: usize,
    pub n_prime: usize,
    pub gamma: f64,
    pub delta: f64,
    pub q: f64,
    pub resamples: u32,
    pub certificates: Vec<SlabCertificate>,
    pub slabs: Vec<SlabSummary>,
    pub lemma_paths: usize,
    pub full_length_paths: usize,
    pub guaranteed_full_length: usize,
    pub merge_joins: usize,
    pub paths: usize,
    pub v_f: usize,
    pub e_f: usize,
    pub distinct_colours: usize,
    /// Active vertices outside the forest.
    pub leftover: Vec<Vertex>,
    pub target_max_paths: f64,
    pub target_min_cover: f64,
    pub small_n: bool,
}

#[derive(Debug, Clone)]
pub struct ForestOutcome {
    pub forest: PathForest,
    pub report: ForestReport,
}

/// Builds a rainbow path forest of the whole of `g`.
pub fn rainbow_forest(
    g: &ColouredGraph,
    cfg: &ForestConfig,
    seed: u64,
) -> Result<ForestOutcome, ForestBuildError> {
    g.ensure_proper()?;
    let reg = regular_spanning_subgraph(g, derive_seed(seed, Stage::Regularize, 0))?;
    let all: Vec<Vertex> = (0..g.n()).collect();
    let mut out = forest_on(g, &reg.subgraph, &all, cfg, seed)?;
    out.report.r = Some(reg.r);
    Ok(out)
}

/// Builds the forest on `vertices` using slabs of `g_prime` (a spanning
/// subgraph of `g`, usually regular) and joins from `g`.
pub fn forest_on(
    g: &ColouredGraph,
    g_prime: &ColouredGraph,
    vertices: &[Vertex],
    cfg: &ForestConfig,
    seed: u64,
) -> Result<ForestOutcome, ForestBuildError> {
    let n_a = vertices.len();
    let small_n = n_a < cfg.n0;
    if small_n {
        warn!(
            "small-n regime: forest on {n_a} vertices is below the configured floor {}",
            cfg.n0
        );
    }
    let excluded = &cfg.excluded_colours;
    let mut active = vec![false; g.n()];
    for &v in vertices {
        active[v] = true;
    }
    let h = g_prime.filter_colours(|c| !excluded.contains(&c));
    let degree_sum: usize = vertices
        .iter()
        .map(|&v| h.neighbours(v).filter(|&w| active[w]).count())
        .sum();
    let nf = n_a.max(1) as f64;
    let delta = (degree_sum as f64 / nf / nf).clamp(f64::MIN_POSITIVE, 1.0);
    let m = cfg
        .m
        .unwrap_or_else(|| (nf.powf(cfg.alpha).floor() as usize).saturating_sub(1))
        .max(1);
    let gamma = cfg
        .gamma
        .unwrap_or_else(|| nf.powf(-cfg.alpha.sqrt()))
        .max(cfg.gamma_floor)
        .min(1.0);
    let q = cfg
        .q
        .unwrap_or_else(|| nf.powf(-2.0 * cfg.alpha))
        .clamp(0.0, 1.0);
    let colours: Vec<Colour> = h.colour_set().into_iter().collect();
    debug!("forest on {n_a} vertices: m={m} gamma={gamma:.3} delta={delta:.3} q={q:.4}");

    let plan = partition_plan(vertices, &colours, m, seed, 0)?;
    let certify = CertifyConfig {
        gamma,
        delta,
        q,
        max_resamples: cfg.max_resamples,
    };
    let certified = certify_partition(&h, vertices, &colours, plan, &certify, seed)?;

    let matchings: Vec<RainbowMatching> = certified
        .slabs
        .par_iter()
        .map(|slab| {
            rainbow_matching(
                slab,
                q,
                derive_seed(seed, Stage::SlabMatching, slab.index as u64),
            )
        })
        .collect();
    let mut pairs = Vec::with_capacity(m);
    let mut seen_colours: HashSet<Colour> = HashSet::new();
    for (slab, rm) in certified.slabs.iter().zip(&matchings) {
        let mut local = Vec::with_capacity(rm.size());
        for &e in &rm.edges {
            let se = &slab.edges[e];
            assert!(
                seen_colours.insert(se.colour),
                "colour {} used by two slab matchings",
                se.colour
            );
            local.push(slab.global_pair(se));
        }
        pairs.push(local);
    }
    let build = build_path_forest(&pairs, &certified.plan)?;
    assert!(build.full_length >= build.guaranteed);
    let lemma_paths = build.paths.len();

    let (paths, merge_joins) = if cfg.merge_paths {
        let mut covered = vec![false; g.n()];
        for &v in build.paths.iter().flatten() {
            covered[v] = true;
        }
        let loose: Vec<Vertex> = vertices.iter().copied().filter(|&v| !covered[v]).collect();
        let join_host = g.filter_colours(|c| !excluded.contains(&c));
        let forbidden: HashSet<Colour> = excluded.iter().copied().collect();
        let merged = merge_rainbow_paths(
            &join_host,
            &build.paths,
            &loose,
            &forbidden,
            derive_seed(seed, Stage::Merge, 0),
        );
        (merged.paths, merged.joins)
    } else {
        (build.paths.clone(), 0)
    };
    let forest = PathForest::new(g, paths)?;
    assert!(forest.rainbow, "forest is not rainbow");
    let forest_colours = forest.colours(g);
    assert!(
        forest_colours.is_disjoint(excluded),
        "forest uses an excluded colour"
    );

    let mut covered = vec![false; g.n()];
    for v in forest.vertices() {
        covered[v] = true;
    }
    let leftover: Vec<Vertex> = vertices.iter().copied().filter(|&v| !covered[v]).collect();
    let slabs = certified
        .slabs
        .iter()
        .zip(&matchings)
        .map(|(s, rm)| SlabSummary {
            index: s.index,
            edges: s.edges.len(),
            size: rm.size(),
            target: rm.target,
            upper_bound: rm.upper_bound,
            shortfall: rm.shortfall,
        })
        .collect();
    let report = ForestReport {
        n: n_a,
        r: None,
        m,
        n_prime: certified.plan.n_prime,
        gamma,
        delta,
        q,
        resamples: certified.resamples,
        certificates: certified.certificates,
        slabs,
        lemma_paths,
        full_length_paths: build.full_length,
        guaranteed_full_length: build.guaranteed,
        merge_joins,
        paths: forest.paths.len(),
        v_f: forest.vertex_count(),
        e_f: forest.edge_count(),
        distinct_colours: forest_colours.len(),
        leftover,
        target_max_paths: nf.powf(1.0 - cfg.alpha),
        target_min_cover: nf - 2.0 * nf.powf(1.0 - cfg.alpha),
        small_n,
    };
    Ok(ForestOutcome { forest, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::rainbow_complete;

    #[test]
    fn rainbow_complete_host() {
        let g = rainbow_complete(40);
        let out = rainbow_forest(&g, &ForestConfig::default(), 3).unwrap();
        assert!(out.forest.rainbow);
        assert!(out.report.small_n);
        assert_eq!(out.report.v_f + out.report.leftover.len(), 40);
        assert!(out.report.v_f >= 36, "v_f = {}", out.report.v_f);
    }

    #[test]
    fn without_merging_paths_start_in_first_part() {
        let g = rainbow_complete(30);
        let cfg = ForestConfig {
            merge_paths: false,
            m: Some(2),
            ..ForestConfig::default()
        };
        let out = rainbow_forest(&g, &cfg, 1).unwrap();
        assert_eq!(out.report.m, 2);
        assert!(out.forest.paths.iter().all(|p| p.len() <= 3));
        assert_eq!(out.report.lemma_paths, out.report.paths);
    }

    #[test]
    fn improper_input_is_rejected() {
        let g = ColouredGraph::new(3, [(0, 1, 1), (1, 2, 1), (0, 2, 2)]).unwrap();
        assert!(matches!(
            rainbow_forest(&g, &ForestConfig::default(), 0),
            Err(ForestBuildError::Improper(_))
        ));
    }

    #[test]
    fn excluded_colours_stay_out() {
        let g = rainbow_complete(24);
        let excluded: BTreeSet<Colour> = (0..276).step_by(5).map(Colour).collect();
        let cfg = ForestConfig {
            excluded_colours: excluded.clone(),
            ..ForestConfig::default()
        };
        let out = rainbow_forest(&g, &cfg, 8).unwrap_or_else(|e| panic!("{e}"));
        assert!(out.forest.colours(&g).is_disjoint(&excluded));
    }
}
