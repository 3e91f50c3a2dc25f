//! Near-rainbow Hamilton cycles.
//!
//! Absorber `A`, reservoir `R` and a rainbow path forest on the rest are
//! built in that order; forest paths and left-over vertices are closed into
//! a cycle with `A` through reservoir connectors, and whatever is still
//! outside (unused reservoir vertices, unconnected vertices) is absorbed.

pub mod connect;
pub mod small;

use std::collections::HashSet;
use std::sync::Mutex;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::absorber::{
    absorb, build_absorber, neighbourhood_matching, AbsorberError, NeighbourhoodParams,
};
use crate::forest::{forest_on, ForestBuildError, ForestConfig, ForestReport};
use crate::graph::{
    cycle_pairs, distinct_colours_of, split_colours, validate, Colour, ColouredGraph, GraphError,
    Vertex,
};
use crate::oracle::is_hamilton_cycle;
use crate::regular::{regular_spanning_subgraph, RegularizeError};
use crate::reservoir::{build_reservoir, ReservoirError};
use crate::rng::{derive_seed, Stage};

pub use connect::{
    connect_through_reservoir, extend_junctions, ConnectError, Connection, Extension,
};
pub use small::{palmer, small_n_cycle, SmallOutcome};

/// Desk-scale stage sizes. The theorem's constants only bite for enormous
/// `n`; these keep every stage meaningful at a few thousand vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeskBudgets {
    /// `|R| = ceil(reservoir_fraction n) + reservoir_extra`.
    pub reservoir_fraction: f64,
    pub reservoir_extra: usize,
    /// Absorption capacity aimed for: `ceil(capacity_fraction n) + capacity_extra`.
    pub capacity_fraction: f64,
    pub capacity_extra: usize,
    /// Standard deviations of headroom in the neighbourhood counts.
    pub z: f64,
    /// Share of sampled host edges expected to survive into the matching.
    pub matching_yield: f64,
}

impl Default for DeskBudgets {
    fn default() -> Self {
        DeskBudgets {
            reservoir_fraction: 0.04,
            reservoir_extra: 20,
            capacity_fraction: 0.02,
            capacity_extra: 15,
            z: 3.0,
            matching_yield: 0.75,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineParams {
    pub epsilon: f64,
    pub beta: f64,
    /// Defaults to `epsilon / 2^11`.
    pub c: Option<f64>,
    /// Defaults to `8 c / epsilon`.
    pub big_c: Option<f64>,
    pub seed: u64,
    pub attempts: u32,
    /// Run attempts concurrently (first success in index order wins).
    pub concurrent_attempts: bool,
    pub max_retries: u32,
    /// Largest colour class accepted; defaults to `ceil(n/8) + ceil(sqrt n)`.
    pub max_bound: Option<usize>,
    /// Hosts with fewer vertices go to the small-n search.
    pub small_n_below: usize,
    pub small_restarts: usize,
    /// `None` runs the theorem's budgets literally.
    pub desk: Option<DeskBudgets>,
    pub forest: ForestConfig,
}

impl PipelineParams {
    pub fn new(epsilon: f64) -> Self {
        PipelineParams {
            epsilon,
            beta: 0.1,
            c: None,
            big_c: None,
            seed: 0,
            attempts: 4,
            concurrent_attempts: true,
            max_retries: 5,
            max_bound: None,
            small_n_below: 400,
            small_restarts: 64,
            desk: Some(DeskBudgets::default()),
            forest: ForestConfig::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.beta
    }

    pub fn c(&self) -> f64 {
        self.c.unwrap_or(self.epsilon / 2048.0)
    }

    pub fn allowed_bound(&self, n: usize) -> usize {
        self.max_bound
            .unwrap_or_else(|| n.div_ceil(8) + (n as f64).sqrt().ceil() as usize)
    }
}

/// Stage sizes as the theorem sets them, for the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremBudgets {
    pub m: f64,
    pub c: f64,
    pub big_c: f64,
    pub b: f64,
    pub absorber_max_vertices: f64,
    pub capacity: f64,
    pub reservoir_size: f64,
    pub connector_demand_max: f64,
    pub colour_target: f64,
}

/// Stage sizes actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageBudgets {
    pub theorem: TheoremBudgets,
    pub desk: bool,
    pub m: f64,
    pub c: f64,
    pub big_c: f64,
    pub capacity_target: usize,
    pub reservoir_size: usize,
    pub min_neighbourhood_edges: usize,
}

impl StageBudgets {
    pub fn compute(g: &ColouredGraph, params: &PipelineParams) -> Self {
        let n = g.n() as f64;
        let eps = params.epsilon;
        let m = n.powf(1.0 - params.beta);
        let c = params.c();
        let big_c = params.big_c.unwrap_or(8.0 * c / eps);
        let theorem = TheoremBudgets {
            m,
            c,
            big_c,
            b: big_c + c,
            absorber_max_vertices: big_c * m,
            capacity: c * m,
            reservoir_size: c * m / 2.0,
            connector_demand_max: eps * c * m / 8.0,
            colour_target: n - (big_c + c) * m,
        };
        let min_nbhd = min_neighbourhood_edges(g);
        match &params.desk {
            None => StageBudgets {
                desk: false,
                m,
                c,
                big_c,
                capacity_target: (c * m).floor() as usize + 1,
                reservoir_size: ((c * m / 2.0).round() as usize).max(1),
                min_neighbourhood_edges: min_nbhd,
                theorem,
            },
            Some(d) => {
                let reservoir_size = (d.reservoir_fraction * n).ceil() as usize + d.reservoir_extra;
                let k = (d.capacity_fraction * n).ceil() as usize + d.capacity_extra;
                let kf = k as f64;
                // E[count_v] = p e(G[N(v)]) with p = C m / n^2, thinned by the matching.
                let big_cm =
                    n * n * (kf + d.z * kf.sqrt()) / (d.matching_yield * min_nbhd.max(1) as f64);
                StageBudgets {
                    desk: true,
                    m,
                    c: (kf - 0.5) / m,
                    big_c: params.big_c.unwrap_or(big_cm / m),
                    capacity_target: k,
                    reservoir_size,
                    min_neighbourhood_edges: min_nbhd,
                    theorem,
                }
            }
        }
    }
}

/// `min_v e(G[N(v)])`.
pub fn min_neighbourhood_edges(g: &ColouredGraph) -> usize {
    let bits = g.adjacency_bits();
    (0..g.n())
        .into_par_iter()
        .map(|v| g.neighbours(v).map(|u| bits.codegree(u, v)).sum::<usize>() / 2)
        .min()
        .unwrap_or(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct AbsorberLog {
    pub t: usize,
    pub vertices: usize,
    pub capacity: usize,
    pub matching_attempts: u32,
    pub min_count: usize,
    pub distinct_path_colours: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReservoirLog {
    pub size: usize,
    pub min_codegree: usize,
    pub required: usize,
    pub attempts: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectionLog {
    pub junctions: usize,
    pub forest_paths: usize,
    pub loose_connected: usize,
    pub fresh_junctions: usize,
    pub matching_fallback: bool,
    /// Unused reservoir vertices threaded into junctions.
    pub threaded: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageLog {
    pub n: usize,
    pub seed: u64,
    pub attempt: u32,
    pub small_n: bool,
    pub budgets: Option<StageBudgets>,
    pub regular_degree: Option<usize>,
    pub absorber: Option<AbsorberLog>,
    pub reservoir: Option<ReservoirLog>,
    pub forest: Option<ForestReport>,
    pub forest_builds: u32,
    pub connection: Option<ConnectionLog>,
    /// Vertices absorbed: unused reservoir plus unconnected forest leftovers.
    pub absorbed: usize,
    pub unused_reservoir: usize,
    pub forest_edges: usize,
    pub small_restarts: Option<usize>,
    /// Distinct colours of the split colouring, for the proper-colouring wrapper.
    pub split_distinct_colours: Option<usize>,
    pub distinct_colours: usize,
}

impl StageLog {
    fn new(n: usize, seed: u64, attempt: u32) -> Self {
        StageLog {
            n,
            seed,
            attempt,
            small_n: false,
            budgets: None,
            regular_degree: None,
            absorber: None,
            reservoir: None,
            forest: None,
            forest_builds: 0,
            connection: None,
            absorbed: 0,
            unused_reservoir: 0,
            forest_edges: 0,
            small_restarts: None,
            split_distinct_colours: None,
            distinct_colours: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HamiltonResult {
    pub cycle: Vec<Vertex>,
    pub distinct_colours: usize,
    pub stage_log: StageLog,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("epsilon = {0} is outside (0, 1/2]")]
    Epsilon(f64),
    #[error("colouring is not proper: {0}")]
    Improper(#[from] GraphError),
    #[error("a colour class has {max} edges, above the allowed {allowed}")]
    Bounded { max: usize, allowed: usize },
    #[error("minimum degree {min_degree} is below (1/2 + epsilon) n = {required:.1}")]
    MinDegree { min_degree: usize, required: f64 },
    #[error("a Hamilton cycle needs at least 3 vertices")]
    TooSmall,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("validation: {0}")]
    Input(#[from] InputError),
    #[error("regularize: {0}")]
    Regularize(#[from] RegularizeError),
    #[error("absorber: {0}")]
    Absorber(#[from] AbsorberError),
    #[error("reservoir: {0}")]
    Reservoir(#[from] ReservoirError),
    #[error("forest: {0}")]
    Forest(#[from] ForestBuildError),
    #[error("connect: {0}")]
    Connect(#[from] ConnectError),
    #[error("absorb: {leftover} vertices left over, capacity {capacity}")]
    Capacity { leftover: usize, capacity: usize },
    #[error("small-n: no Hamilton cycle found")]
    SmallN,
    #[error("all {} attempts failed; first: {}", .0.len(), .0.first().map(String::as_str).unwrap_or("-"))]
    Attempts(Vec<String>),
}

impl PipelineError {
    /// Failures on valid input, as opposed to rejected input.
    pub fn is_input(&self) -> bool {
        matches!(self, PipelineError::Input(_))
    }
}

/// Checks the theorem's hypotheses on `g`.
pub fn validate_input(g: &ColouredGraph, params: &PipelineParams) -> Result<(), InputError> {
    let n = g.n();
    if !(params.epsilon > 0.0 && params.epsilon <= 0.5) {
        return Err(InputError::Epsilon(params.epsilon));
    }
    if n < 3 {
        return Err(InputError::TooSmall);
    }
    g.ensure_proper()?;
    let report = validate(g);
    let allowed = params.allowed_bound(n);
    if report.max_colour_multiplicity > allowed {
        return Err(InputError::Bounded {
            max: report.max_colour_multiplicity,
            allowed,
        });
    }
    let required = (0.5 + params.epsilon) * n as f64;
    if (report.min_degree as f64) < required - 1e-9 {
        return Err(InputError::MinDegree {
            min_degree: report.min_degree,
            required,
        });
    }
    Ok(())
}

/// A Hamilton cycle of `g` with many distinct colours.
pub fn near_rainbow_hamilton(
    g: &ColouredGraph,
    params: &PipelineParams,
) -> Result<HamiltonResult, PipelineError> {
    validate_input(g, params)?;
    let n = g.n();
    if n < params.small_n_below {
        return small_mode(g, params);
    }
    let errors = Mutex::new(Vec::new());
    let run = |a: u32| {
        let seed = derive_seed(params.seed, Stage::Attempt, a as u64);
        match run_attempt(g, params, seed, a) {
            Ok(r) => Some(r),
            Err(e) => {
                warn!("attempt {a} failed: {e}");
                errors.lock().expect("error log").push((a, e.to_string()));
                None
            }
        }
    };
    let attempts = params.attempts.max(1);
    let found = if params.concurrent_attempts {
        (0..attempts).into_par_iter().find_map_first(run)
    } else {
        (0..attempts).find_map(run)
    };
    match found {
        Some(r) => Ok(r),
        None => {
            let mut errs = errors.into_inner().expect("error log");
            errs.sort_by_key(|e| e.0);
            Err(PipelineError::Attempts(
                errs.into_iter()
                    .map(|e| format!("attempt {}: {}", e.0, e.1))
                    .collect(),
            ))
        }
    }
}

fn small_mode(g: &ColouredGraph, params: &PipelineParams) -> Result<HamiltonResult, PipelineError> {
    info!("small-n mode on {} vertices", g.n());
    let out = small_n_cycle(
        g,
        params.small_restarts,
        derive_seed(params.seed, Stage::SmallN, u64::MAX),
    )
    .ok_or(PipelineError::SmallN)?;
    let mut log = StageLog::new(g.n(), params.seed, 0);
    log.small_n = true;
    log.small_restarts = Some(out.restarts);
    finish(g, out.cycle, log, &[])
}

/// Asserts the cycle, counts colours and fills in the log.
fn finish(
    g: &ColouredGraph,
    cycle: Vec<Vertex>,
    mut log: StageLog,
    forest_paths: &[Vec<Vertex>],
) -> Result<HamiltonResult, PipelineError> {
    assert!(
        is_hamilton_cycle(g, &cycle),
        "pipeline produced an invalid Hamilton cycle"
    );
    let pairs = cycle_pairs(&cycle);
    let distinct = distinct_colours_of(g, &pairs).expect("cycle edges lie in the host");
    let on_cycle: HashSet<(Vertex, Vertex)> =
        pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let forest_edges: usize = forest_paths.iter().map(|p| p.len().saturating_sub(1)).sum();
    for p in forest_paths {
        for w in p.windows(2) {
            assert!(
                on_cycle.contains(&(w[0].min(w[1]), w[0].max(w[1]))),
                "forest edge dropped from the cycle"
            );
        }
    }
    assert!(
        distinct >= forest_edges,
        "cycle has fewer colours than the rainbow forest"
    );
    log.forest_edges = forest_edges;
    log.distinct_colours = distinct;
    Ok(HamiltonResult {
        cycle,
        distinct_colours: distinct,
        stage_log: log,
    })
}

fn run_attempt(
    g: &ColouredGraph,
    params: &PipelineParams,
    seed: u64,
    attempt: u32,
) -> Result<HamiltonResult, PipelineError> {
    let n = g.n();
    let mut log = StageLog::new(n, seed, attempt);
    let reg = regular_spanning_subgraph(g, derive_seed(seed, Stage::Regularize, 0))?;
    log.regular_degree = Some(reg.r);
    let budgets = StageBudgets::compute(g, params);
    debug!("budgets: {budgets:?}");

    let np = NeighbourhoodParams {
        epsilon: params.epsilon,
        c: budgets.c,
        m: budgets.m,
        big_c: Some(budgets.big_c),
        rainbow: true,
        max_retries: params.max_retries,
    };
    let nm = neighbourhood_matching(g, &np, seed)?;
    let cert = build_absorber(g, &nm.edges, true)?;
    let a_colours: HashSet<Colour> = cert.colours.iter().copied().collect();
    log.absorber = Some(AbsorberLog {
        t: cert.t(),
        vertices: cert.vertex_count,
        capacity: cert.capacity,
        matching_attempts: nm.attempts,
        min_count: nm.min_count,
        distinct_path_colours: a_colours.len(),
    });
    if cert.vertex_count + budgets.reservoir_size >= n {
        return Err(AbsorberError::Exhausted {
            attempts: nm.attempts,
            worst_vertex: nm.worst_vertex,
            count: nm.min_count,
            required: np.required_count(),
        }
        .into());
    }

    let reservoir = build_reservoir(
        g,
        &cert.path,
        budgets.reservoir_size,
        params.epsilon,
        seed,
        params.max_retries,
    )?;
    log.reservoir = Some(ReservoirLog {
        size: reservoir.vertices.len(),
        min_codegree: reservoir.min_codegree,
        required: reservoir.required(),
        attempts: reservoir.attempts,
    });
    log.budgets = Some(budgets);

    let mut outside = vec![true; n];
    for &v in cert.path.iter().chain(&reservoir.vertices) {
        outside[v] = false;
    }
    let rest: Vec<Vertex> = (0..n).filter(|&v| outside[v]).collect();
    let mut cfg = params.forest.clone();
    cfg.alpha = params.alpha();
    cfg.excluded_colours = a_colours.iter().copied().collect();

    let mut last_capacity_error = None;
    for build in 0..2u32 {
        log.forest_builds = build + 1;
        let fseed = derive_seed(seed, Stage::Forest, build as u64);
        let outcome = forest_on(g, &reg.subgraph, &rest, &cfg, fseed)?;
        let paths = outcome.forest.paths.clone();
        let loose = outcome.report.leftover.clone();
        let mut used: HashSet<Colour> = a_colours.clone();
        used.extend(outcome.forest.colours(g));

        // Connect as many loose vertices as the reservoir allows, keeping one
        // connector per forest path and one for the absorber.
        let base = 1 + paths.len();
        let room = reservoir.vertices.len().saturating_sub(base);
        let mut connected = None;
        for take in [loose.len().min(room), 0] {
            let mut pieces = Vec::with_capacity(base + take);
            pieces.push(cert.path.clone());
            pieces.extend(paths.iter().cloned());
            pieces.extend(loose[..take].iter().map(|&v| vec![v]));
            match connect_through_reservoir(g, &pieces, &reservoir.vertices, &used) {
                Ok(c) => {
                    connected = Some((c, take));
                    break;
                }
                Err(e) if take > 0 => {
                    debug!("connecting {take} loose vertices failed ({e}); retrying without")
                }
                Err(e) => return Err(e.into()),
            }
        }
        let (conn, take) = connected.expect("loop returns or connects");
        let mut pieces = Vec::with_capacity(base + take);
        pieces.push(cert.path.clone());
        pieces.extend(paths.iter().cloned());
        pieces.extend(loose[..take].iter().map(|&v| vec![v]));
        let ext = extend_junctions(g, &pieces, &conn);
        let mut u_set: Vec<Vertex> = ext.unused.clone();
        u_set.extend_from_slice(&loose[take..]);
        log.connection = Some(ConnectionLog {
            junctions: conn.connectors.len(),
            forest_paths: paths.len(),
            loose_connected: take,
            fresh_junctions: conn.fresh_junctions,
            matching_fallback: conn.matching_fallback,
            threaded: ext.inserted,
        });
        log.forest = Some(outcome.report);
        if u_set.len() > cert.capacity {
            warn!(
                "forest build {build}: {} vertices left over exceed capacity {}",
                u_set.len(),
                cert.capacity
            );
            last_capacity_error = Some(PipelineError::Capacity {
                leftover: u_set.len(),
                capacity: cert.capacity,
            });
            continue;
        }
        let a_u = absorb(&cert, &u_set, g)?;
        log.absorbed = u_set.len();
        log.unused_reservoir = ext.unused.len();
        let mut cycle = a_u;
        cycle.extend_from_slice(&ext.cycle[cert.path.len()..]);
        return finish(g, cycle, log, &paths);
    }
    Err(last_capacity_error.expect("both builds hit capacity"))
}

/// Runs the pipeline on the colouring split four ways and reports colours
/// of the original colouring. Any proper colouring is `n/2`-bounded, so the
/// split one is `n/8`-bounded.
pub fn proper_colouring_hamilton(
    g: &ColouredGraph,
    params: &PipelineParams,
) -> Result<HamiltonResult, PipelineError> {
    g.ensure_proper().map_err(InputError::from)?;
    let split = split_colours(g, 4).map_err(InputError::from)?;
    let mut res = near_rainbow_hamilton(&split.graph, params)?;
    let mut original = HashSet::new();
    for (a, b) in cycle_pairs(&res.cycle) {
        let s = split.graph.colour(a, b).expect("cycle edge");
        let o = split.original(s);
        assert_eq!(
            Some(o),
            g.colour(a, b),
            "colour back-mapping disagrees with the host"
        );
        original.insert(o);
    }
    let split_count = res.distinct_colours;
    assert!(
        original.len() * 4 >= split_count,
        "original colour count below a quarter of the split count"
    );
    res.stage_log.split_distinct_colours = Some(split_count);
    res.distinct_colours = original.len();
    res.stage_log.distinct_colours = original.len();
    Ok(res)
}

/// Forest on every vertex, then the pieces in order with Palmer's repair:
/// the pipeline without absorber and reservoir.
pub fn forest_completion_cycle(
    g: &ColouredGraph,
    cfg: &ForestConfig,
    seed: u64,
) -> Result<Vec<Vertex>, PipelineError> {
    let out = crate::forest::rainbow_forest(g, cfg, seed)?;
    let mut order: Vec<Vertex> = out.forest.vertices().collect();
    order.extend_from_slice(&out.report.leftover);
    palmer(g, order).ok_or(PipelineError::SmallN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{k4_three_matchings, rainbow_complete};

    #[test]
    fn rainbow_complete_small_mode_is_rainbow() {
        let g = rainbow_complete(12);
        let r = near_rainbow_hamilton(&g, &PipelineParams::new(0.25)).unwrap();
        assert_eq!(r.distinct_colours, 12);
        assert!(r.stage_log.small_n);
    }

    #[test]
    fn input_validation() {
        let bad = ColouredGraph::new(3, [(0, 1, 0), (1, 2, 0), (0, 2, 1)]).unwrap();
        assert!(matches!(
            near_rainbow_hamilton(&bad, &PipelineParams::new(0.1)),
            Err(PipelineError::Input(InputError::Improper(_)))
        ));
        let mut p = PipelineParams::new(0.1);
        p.max_bound = Some(1);
        assert!(matches!(
            near_rainbow_hamilton(&k4_three_matchings(), &p),
            Err(PipelineError::Input(InputError::Bounded { .. }))
        ));
        assert!(matches!(
            near_rainbow_hamilton(
                &crate::graph::fixtures::cycle(6, &[0, 1, 2, 3, 4, 5]),
                &PipelineParams::new(0.1)
            ),
            Err(PipelineError::Input(InputError::MinDegree { .. }))
        ));
        assert!(near_rainbow_hamilton(&rainbow_complete(5), &PipelineParams::new(0.0)).is_err());
    }

    #[test]
    fn split_wrapper_reports_original_colours() {
        let g = k4_three_matchings();
        let r = proper_colouring_hamilton(&g, &PipelineParams::new(0.25)).unwrap();
        assert_eq!(r.distinct_colours, 2);
        assert!(r.stage_log.split_distinct_colours.unwrap() >= 2);
    }

    #[test]
    fn forest_alone_completes_on_complete_host() {
        let g = rainbow_complete(60);
        let c = forest_completion_cycle(&g, &ForestConfig::default(), 5).unwrap();
        assert!(is_hamilton_cycle(&g, &c));
    }

    #[test]
    fn theorem_budgets_are_logged() {
        let g = rainbow_complete(50);
        let p = PipelineParams::new(0.1);
        let b = StageBudgets::compute(&g, &p);
        assert!((b.theorem.c - 0.1 / 2048.0).abs() < 1e-12);
        assert!((b.theorem.big_c - 8.0 * b.theorem.c / 0.1).abs() < 1e-12);
        assert!((b.theorem.m - 50f64.powf(0.9)).abs() < 1e-9);
        // Every edge of K_50 inside N(v) = K_49.
        assert_eq!(b.min_neighbourhood_edges, 49 * 48 / 2);
        assert!(b.desk);
    }
}
