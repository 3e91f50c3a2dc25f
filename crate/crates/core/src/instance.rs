//! Random Dirac hosts with proper, globally bounded colourings.

use fixedbitset::FixedBitSet;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{validate, ColouredGraph, Edge, Vertex};
use crate::rng::{derive_seed, rng_from_seed, Rng, Stage};

const MAX_ATTEMPTS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ColouringMode {
    /// Every edge its own colour.
    Rainbow,
    /// Seeded first-fit over a rotating window of `k` colours with class cap.
    RoundRobin { k: Option<usize> },
    /// Union of `k` random matchings of size `ell`, one colour each.
    Matchings { k: usize, ell: usize },
    /// Misra-Gries: at most `max degree + 1` colours.
    VizingLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    /// Minimum degree margin: `delta(G) >= (1/2 + epsilon) n`. `None` means
    /// no degree requirement (used by matchings mode).
    pub epsilon: Option<f64>,
    pub colouring: ColouringMode,
    /// Largest allowed colour class; defaults per mode.
    pub target_bound: Option<usize>,
    /// Edge probability of the random host before top-up; defaults a little
    /// above the required density.
    pub host_density: Option<f64>,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(n: usize, epsilon: f64, colouring: ColouringMode, seed: u64) -> Self {
        InstanceSpec {
            n,
            epsilon: Some(epsilon),
            colouring,
            target_bound: None,
            host_density: None,
            seed,
        }
    }

    pub fn required_degree(&self) -> usize {
        self.epsilon.map_or(0, |e| {
            ((0.5 + e) * self.n as f64 - 1e-9).ceil().max(0.0) as usize
        })
    }

    pub fn bound(&self) -> usize {
        self.target_bound.unwrap_or(match self.colouring {
            ColouringMode::Rainbow => 1,
            ColouringMode::RoundRobin { .. } => (self.n / 8).max(1),
            ColouringMode::Matchings { ell, .. } => ell,
            ColouringMode::VizingLike => (self.n / 2).max(1),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("required minimum degree {required} is impossible on {n} vertices")]
    DegreeInfeasible { required: usize, n: usize },
    #[error("{edges} edges cannot be coloured with {k} colours of at most {bound} edges each")]
    ColoursInfeasible {
        edges: usize,
        k: usize,
        bound: usize,
    },
    #[error("matchings of size {ell} do not fit on {n} vertices")]
    MatchingTooLarge { ell: usize, n: usize },
    #[error("target bound must be positive")]
    ZeroBound,
    #[error("no valid instance after {attempts} attempts: {reason}")]
    Exhausted { attempts: u64, reason: String },
}

/// Generates an instance and re-validates every claim of the spec.
pub fn generate_instance(spec: &InstanceSpec) -> Result<ColouredGraph, InstanceError> {
    let n = spec.n;
    let required = spec.required_degree();
    if n > 0 && required > n - 1 {
        return Err(InstanceError::DegreeInfeasible { required, n });
    }
    let bound = spec.bound();
    if bound == 0 {
        return Err(InstanceError::ZeroBound);
    }
    if let ColouringMode::Matchings { ell, .. } = spec.colouring {
        if 2 * ell > n {
            return Err(InstanceError::MatchingTooLarge { ell, n });
        }
    }
    let mut reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = rng_from_seed(derive_seed(spec.seed, Stage::Instance, attempt));
        let g = match spec.colouring {
            ColouringMode::Matchings { k, ell } => matchings_union(n, k, ell, &mut rng),
            mode => {
                let host = dirac_host(n, required, spec.host_density, &mut rng);
                match mode {
                    ColouringMode::Rainbow => ColouredGraph::new(
                        n,
                        host.iter().enumerate().map(|(i, &(u, v))| (u, v, i as u32)),
                    )
                    .expect("host edges are simple"),
                    ColouringMode::RoundRobin { k } => {
                        let max_deg = max_degree(n, &host);
                        let k = k.unwrap_or_else(|| auto_colour_count(host.len(), bound, max_deg));
                        if k * bound < host.len() {
                            return Err(InstanceError::ColoursInfeasible {
                                edges: host.len(),
                                k,
                                bound,
                            });
                        }
                        match round_robin(n, &host, k, bound, &mut rng) {
                            Some(g) => g,
                            None => {
                                reason = format!("round-robin ran out of colours (k = {k})");
                                continue;
                            }
                        }
                    }
                    ColouringMode::VizingLike => misra_gries(n, &host),
                    ColouringMode::Matchings { .. } => unreachable!(),
                }
            }
        };
        let report = validate(&g);
        if !report.is_proper {
            reason = "colouring not proper".into();
        } else if report.max_colour_multiplicity > bound {
            reason = format!(
                "colour class of {} edges exceeds {bound}",
                report.max_colour_multiplicity
            );
        } else if report.min_degree < required {
            reason = format!("minimum degree {} below {required}", report.min_degree);
        } else {
            return Ok(g);
        }
        log::debug!("instance attempt {attempt} rejected: {reason}");
    }
    Err(InstanceError::Exhausted {
        attempts: MAX_ATTEMPTS,
        reason,
    })
}

/// `max(ceil(1.12 |E| / bound), 2 max_degree)`: enough colours that the
/// class cap and properness both leave room.
pub fn auto_colour_count(edges: usize, bound: usize, max_degree: usize) -> usize {
    ((1.12 * edges as f64 / bound as f64).ceil() as usize)
        .max(2 * max_degree)
        .max(1)
}

fn max_degree(n: usize, edges: &[(Vertex, Vertex)]) -> usize {
    let mut deg = vec![0usize; n];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

/// `G(n, p)` topped up until every degree reaches `required`.
fn dirac_host(
    n: usize,
    required: usize,
    density: Option<f64>,
    rng: &mut Rng,
) -> Vec<(Vertex, Vertex)> {
    let p = density.unwrap_or((required as f64 / n.max(1) as f64 + 0.03).min(1.0));
    let mut adj: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
    let mut deg = vec![0usize; n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p.clamp(0.0, 1.0)) {
                adj[u].insert(v);
                adj[v].insert(u);
                deg[u] += 1;
                deg[v] += 1;
            }
        }
    }
    let mut low: Vec<Vertex> = (0..n).filter(|&v| deg[v] < required).collect();
    low.shuffle(rng);
    for &u in &low {
        while deg[u] < required {
            let mut options: Vec<Vertex> =
                (0..n).filter(|&w| w != u && !adj[u].contains(w)).collect();
            // Prefer partners that also need edges.
            let needy: Vec<Vertex> = options
                .iter()
                .copied()
                .filter(|&w| deg[w] < required)
                .collect();
            if !needy.is_empty() {
                options = needy;
            }
            let w = *options
                .choose(rng)
                .expect("required degree below n leaves a non-neighbour");
            adj[u].insert(w);
            adj[w].insert(u);
            deg[u] += 1;
            deg[w] += 1;
        }
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in adj[u].ones().filter(|&v| v > u) {
            edges.push((u, v));
        }
    }
    edges
}

fn round_robin(
    n: usize,
    host: &[(Vertex, Vertex)],
    k: usize,
    bound: usize,
    rng: &mut Rng,
) -> Option<ColouredGraph> {
    let mut order: Vec<usize> = (0..host.len()).collect();
    order.shuffle(rng);
    let mut at: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(k)).collect();
    let mut class = vec![0usize; k];
    let mut colour = vec![0u32; host.len()];
    let mut window = 0usize;
    for i in order {
        let (u, v) = host[i];
        let c = (0..k)
            .map(|j| (window + j) % k)
            .find(|&c| class[c] < bound && !at[u].contains(c) && !at[v].contains(c))?;
        at[u].insert(c);
        at[v].insert(c);
        class[c] += 1;
        colour[i] = c as u32;
        window = (window + 1) % k;
    }
    Some(
        ColouredGraph::new(n, host.iter().zip(&colour).map(|(&(u, v), &c)| (u, v, c)))
            .expect("host edges are simple"),
    )
}

fn matchings_union(n: usize, k: usize, ell: usize, rng: &mut Rng) -> ColouredGraph {
    let mut seen = std::collections::HashSet::new();
    let mut triples = Vec::new();
    let mut order: Vec<Vertex> = (0..n).collect();
    for c in 0..k {
        order.shuffle(rng);
        for pair in order[..2 * ell].chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if seen.insert((u, v)) {
                triples.push((u, v, c as u32));
            }
        }
    }
    ColouredGraph::new(n, triples).expect("deduplicated pairs are simple")
}

/// Misra-Gries edge colouring with at most `max degree + 1` colours.
pub fn misra_gries(n: usize, host: &[(Vertex, Vertex)]) -> ColouredGraph {
    const NONE: usize = usize::MAX;
    let palette = max_degree(n, host) + 1;
    let words = palette.div_ceil(64);
    // `at[x][c]`: the neighbour joined to `x` in colour `c`.
    let mut at = vec![vec![NONE; palette]; n];
    let mut free = vec![vec![u64::MAX; words]; n];
    for f in &mut free {
        if !palette.is_multiple_of(64) {
            f[words - 1] = (1u64 << (palette % 64)) - 1;
        }
    }
    let set =
        |at: &mut Vec<Vec<usize>>, free: &mut Vec<Vec<u64>>, a: Vertex, b: Vertex, c: usize| {
            at[a][c] = b;
            at[b][c] = a;
            free[a][c / 64] &= !(1 << (c % 64));
            free[b][c / 64] &= !(1 << (c % 64));
        };
    let unset =
        |at: &mut Vec<Vec<usize>>, free: &mut Vec<Vec<u64>>, a: Vertex, b: Vertex, c: usize| {
            at[a][c] = NONE;
            at[b][c] = NONE;
            free[a][c / 64] |= 1 << (c % 64);
            free[b][c / 64] |= 1 << (c % 64);
        };
    let first_free = |free: &Vec<Vec<u64>>, x: Vertex| -> usize {
        free[x]
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
            .expect("palette exceeds the degree")
    };
    let colour_of = |at: &Vec<Vec<usize>>, a: Vertex, b: Vertex| at[a].iter().position(|&w| w == b);
    let mut in_fan = vec![usize::MAX; n];

    for (idx, &(u, v)) in host.iter().enumerate() {
        let mut fan = vec![v];
        in_fan[v] = idx;
        // Grow the fan until its last vertex shares a free colour with `u`,
        // or until it is maximal.
        let mut common = None;
        loop {
            let last = *fan.last().expect("fan starts non-empty");
            if let Some(c) = (0..words).find_map(|i| {
                let w = free[last][i] & free[u][i];
                (w != 0).then(|| i * 64 + w.trailing_zeros() as usize)
            }) {
                common = Some(c);
                break;
            }
            let mut next = None;
            'scan: for (i, &word) in free[last].iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let c = i * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let w = at[u][c];
                    if w != NONE && in_fan[w] != idx {
                        next = Some(w);
                        break 'scan;
                    }
                }
            }
            match next {
                Some(w) => {
                    in_fan[w] = idx;
                    fan.push(w);
                }
                None => break,
            }
        }
        let rotate = |at: &mut Vec<Vec<usize>>,
                      free: &mut Vec<Vec<u64>>,
                      fan: &[Vertex],
                      upto: usize,
                      d: usize| {
            for i in 0..upto {
                let c = colour_of(at, u, fan[i + 1]).expect("fan edges are coloured");
                unset(at, free, u, fan[i + 1], c);
                set(at, free, u, fan[i], c);
            }
            set(at, free, u, fan[upto], d);
        };
        if let Some(d) = common {
            let upto = fan.len() - 1;
            rotate(&mut at, &mut free, &fan, upto, d);
            continue;
        }
        let c = first_free(&free, u);
        let d = first_free(&free, *fan.last().expect("non-empty"));
        // Invert the c/d path starting at `u` (which begins with a d-edge).
        let mut path = vec![u];
        let mut want = d;
        loop {
            let x = *path.last().expect("non-empty");
            let y = at[x][want];
            if y == NONE {
                break;
            }
            path.push(y);
            want = if want == d { c } else { d };
        }
        let mut cols = Vec::with_capacity(path.len());
        for w in path.windows(2) {
            let col = colour_of(&at, w[0], w[1]).expect("path edges are coloured");
            cols.push(col);
            unset(&mut at, &mut free, w[0], w[1], col);
        }
        for (w, &col) in path.windows(2).zip(&cols) {
            let flipped = if col == c { d } else { c };
            set(&mut at, &mut free, w[0], w[1], flipped);
        }
        // First fan vertex with d free whose prefix is still a fan.
        let mut upto = None;
        for i in 0..fan.len() {
            if i > 0 {
                let col = colour_of(&at, u, fan[i]).expect("fan edges are coloured");
                if at[fan[i - 1]][col] != NONE {
                    break;
                }
            }
            if at[fan[i]][d] == NONE {
                upto = Some(i);
                break;
            }
        }
        let upto = upto.expect("Misra-Gries invariant: a fan prefix ends at a vertex missing d");
        rotate(&mut at, &mut free, &fan, upto, d);
    }
    let mut triples = Vec::with_capacity(host.len());
    for (a, row) in at.iter().enumerate() {
        for (c, &b) in row.iter().enumerate() {
            if b != NONE && a < b {
                triples.push((a, b, c as u32));
            }
        }
    }
    ColouredGraph::new(n, triples).expect("colouring keeps the host edges")
}

/// Edges of `g` as plain pairs.
pub fn host_pairs(g: &ColouredGraph) -> Vec<(Vertex, Vertex)> {
    g.edges().iter().map(Edge::endpoints).collect()
}

/// Recolours `g` with Misra-Gries.
pub fn recolour_vizing(g: &ColouredGraph) -> ColouredGraph {
    misra_gries(g.n(), &host_pairs(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rainbow_mode() {
        let g = generate_instance(&InstanceSpec::new(8, 0.1, ColouringMode::Rainbow, 1)).unwrap();
        let r = validate(&g);
        assert_eq!(r.max_colour_multiplicity, 1);
        assert_eq!(r.distinct_colours, g.edge_count());
        assert!(r.min_degree >= 5);
    }

    #[test]
    fn round_robin_respects_eighth_bound() {
        let spec = InstanceSpec::new(200, 0.1, ColouringMode::RoundRobin { k: None }, 4);
        let g = generate_instance(&spec).unwrap();
        let r = validate(&g);
        assert!(r.is_proper);
        assert!(r.max_colour_multiplicity <= 25);
        assert!(r.min_degree >= 120);
        assert_eq!(g, generate_instance(&spec).unwrap());
    }

    #[test]
    fn round_robin_infeasible_arithmetic() {
        let spec = InstanceSpec::new(40, 0.1, ColouringMode::RoundRobin { k: Some(3) }, 0);
        assert!(matches!(
            generate_instance(&spec),
            Err(InstanceError::ColoursInfeasible { .. })
        ));
    }

    #[test]
    fn matchings_mode_is_ell_bounded() {
        let spec = InstanceSpec {
            n: 64,
            epsilon: None,
            colouring: ColouringMode::Matchings { k: 20, ell: 16 },
            target_bound: None,
            host_density: None,
            seed: 2,
        };
        let g = generate_instance(&spec).unwrap();
        assert!(g.is_proper());
        assert!(g.max_colour_multiplicity() <= 16);
        assert!(g.colour_set().len() <= 20);
    }

    #[test]
    fn vizing_like_uses_at_most_degree_plus_one() {
        let g =
            generate_instance(&InstanceSpec::new(150, 0.1, ColouringMode::VizingLike, 7)).unwrap();
        assert!(g.is_proper());
        assert!(g.colour_set().len() <= g.max_degree() + 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn misra_gries_is_proper_within_palette(n in 2usize..14, raw in proptest::collection::vec((0usize..14, 0usize..14), 0..60)) {
            let mut pairs: Vec<(usize, usize)> = raw.into_iter()
                .map(|(a, b)| (a % n, b % n))
                .filter(|(a, b)| a != b)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            pairs.sort_unstable();
            pairs.dedup();
            let g = misra_gries(n, &pairs);
            prop_assert_eq!(g.edge_count(), pairs.len());
            prop_assert!(g.is_proper());
            prop_assert!(g.colour_set().len() <= max_degree(n, &pairs) + 1);
        }
    }
}
