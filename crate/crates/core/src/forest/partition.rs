//! Random vertex and colour partitions, and their certification.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use super::near_regular::{check_degrees, NearRegularityParams, NearRegularityReport};
use super::rainbow_matching::{SlabEdge, SlabGraph};
use crate::graph::{Colour, ColouredGraph, Vertex};
use crate::rng::{derive_seed, rng_from_seed, Stage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("need at least one slab")]
    NoSlabs,
    #[error("{parts} parts do not fit into {n} vertices")]
    TooManyParts { parts: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexPartition {
    /// `V_0, ..., V_m`, each of size `n_prime`.
    pub parts: Vec<Vec<Vertex>>,
    pub leftover: Vec<Vertex>,
    pub n_prime: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionPlan {
    pub vertex_parts: Vec<Vec<Vertex>>,
    pub leftover: Vec<Vertex>,
    /// `C_1, ..., C_m`; slab `i` (1-based) uses `colour_parts[i - 1]`.
    pub colour_parts: Vec<Vec<Colour>>,
    pub m: usize,
    pub n_prime: usize,
}

/// Uniform equipartition of `vertices` into `m + 1` parts of size
/// `floor(len / (m + 1))`; the remainder is the leftover set.
pub fn partition_vertices(
    vertices: &[Vertex],
    m: usize,
    seed: u64,
) -> Result<VertexPartition, PartitionError> {
    if m == 0 {
        return Err(PartitionError::NoSlabs);
    }
    let n = vertices.len();
    if m + 1 > n {
        return Err(PartitionError::TooManyParts { parts: m + 1, n });
    }
    let n_prime = n / (m + 1);
    let mut order = vertices.to_vec();
    order.shuffle(&mut rng_from_seed(seed));
    let leftover = order.split_off(n_prime * (m + 1));
    let parts = order.chunks(n_prime).map(<[Vertex]>::to_vec).collect();
    Ok(VertexPartition {
        parts,
        leftover,
        n_prime,
    })
}

/// Places each colour independently and uniformly into one of `m` parts.
pub fn partition_colours(
    colours: &[Colour],
    m: usize,
    seed: u64,
) -> Result<Vec<Vec<Colour>>, PartitionError> {
    if m == 0 {
        return Err(PartitionError::NoSlabs);
    }
    let mut rng = rng_from_seed(seed);
    let mut parts = vec![Vec::new(); m];
    for &c in colours {
        parts[rng.random_range(0..m)].push(c);
    }
    Ok(parts)
}

pub fn partition_plan(
    vertices: &[Vertex],
    colours: &[Colour],
    m: usize,
    seed: u64,
    attempt: u64,
) -> Result<PartitionPlan, PartitionError> {
    let vp = partition_vertices(
        vertices,
        m,
        derive_seed(seed, Stage::VertexPartition, attempt),
    )?;
    let colour_parts = partition_colours(
        colours,
        m,
        derive_seed(seed, Stage::ColourPartition, attempt),
    )?;
    Ok(PartitionPlan {
        vertex_parts: vp.parts,
        leftover: vp.leftover,
        colour_parts,
        m,
        n_prime: vp.n_prime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyConfig {
    pub gamma: f64,
    /// Density of the host: degree over vertex count.
    pub delta: f64,
    /// Matching deficiency; enters the per-slab colour bound.
    pub q: f64,
    pub max_resamples: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlabCertificate {
    pub index: usize,
    pub slab: NearRegularityReport,
    pub slab_colour_max: usize,
    /// Logged only.
    pub slab_colour_bound: f64,
    pub b: NearRegularityReport,
    pub b_colour_max: usize,
    pub b_colour_bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct CertifiedPlan {
    pub plan: PartitionPlan,
    pub slabs: Vec<SlabGraph>,
    pub certificates: Vec<SlabCertificate>,
    pub resamples: u32,
}

#[derive(Debug, Clone, Error)]
#[error("partition not certified after {attempts} samples; slab {} failed", .last.index)]
pub struct CertifyFailure {
    pub attempts: u32,
    pub last: Box<SlabCertificate>,
}

/// Slab window parameters: the slab `G'[V_{i-1}, V_i]` and its colour
/// restriction `B_i`, both normalised to the `2 n'` vertices of the pair.
pub fn slab_params(
    cfg: &CertifyConfig,
    m: usize,
    n_prime: usize,
) -> (NearRegularityParams, NearRegularityParams) {
    let n_ref = 2.0 * n_prime as f64;
    let slab = NearRegularityParams::new((2.0 * cfg.gamma).min(1.0), cfg.delta / 2.0, n_ref);
    let b = NearRegularityParams::new(
        (4.0 * cfg.gamma).min(1.0),
        cfg.delta / (2.0 * m as f64),
        n_ref,
    );
    (slab, b)
}

/// Checks one plan. Returns the slab graphs `B_i` and per-slab certificates.
pub fn certify_plan(
    g: &ColouredGraph,
    plan: &PartitionPlan,
    cfg: &CertifyConfig,
) -> (Vec<SlabGraph>, Vec<SlabCertificate>) {
    let m = plan.m;
    let mut part_of = vec![usize::MAX; g.n()];
    for (i, part) in plan.vertex_parts.iter().enumerate() {
        for &v in part {
            part_of[v] = i;
        }
    }
    let colour_part: HashMap<Colour, usize> = plan
        .colour_parts
        .iter()
        .enumerate()
        .flat_map(|(i, cs)| cs.iter().map(move |&c| (c, i)))
        .collect();
    let (slab_p, b_p) = slab_params(cfg, m, plan.n_prime);
    let slab_colour_bound = (1.0 + cfg.gamma) * plan.n_prime as f64 / (4.0 * m as f64);
    let b_colour_bound = (1.0 - cfg.q) * (cfg.delta / m as f64) * plan.n_prime as f64;

    let mut slabs = Vec::with_capacity(m);
    let mut certs = Vec::with_capacity(m);
    for i in 1..=m {
        let (left, right) = (&plan.vertex_parts[i - 1], &plan.vertex_parts[i]);
        let mut local = HashMap::new();
        for (j, &v) in right.iter().enumerate() {
            local.insert(v, j);
        }
        let mut slab_deg = Vec::with_capacity(2 * plan.n_prime);
        let mut b_deg = Vec::with_capacity(2 * plan.n_prime);
        let mut right_slab = vec![0usize; right.len()];
        let mut right_b = vec![0usize; right.len()];
        let mut slab_colours: HashMap<Colour, usize> = HashMap::new();
        let mut b_colours: HashMap<Colour, usize> = HashMap::new();
        let mut edges = Vec::new();
        for (l, &u) in left.iter().enumerate() {
            let (mut ds, mut db) = (0, 0);
            for &(w, e) in g.incident(u) {
                if part_of[w] != i {
                    continue;
                }
                let c = g.edge(e).colour;
                let r = local[&w];
                ds += 1;
                right_slab[r] += 1;
                *slab_colours.entry(c).or_default() += 1;
                if colour_part.get(&c) == Some(&(i - 1)) {
                    db += 1;
                    right_b[r] += 1;
                    *b_colours.entry(c).or_default() += 1;
                    edges.push(SlabEdge {
                        left: l,
                        right: r,
                        colour: c,
                    });
                }
            }
            slab_deg.push((u, ds));
            b_deg.push((u, db));
        }
        for (r, &v) in right.iter().enumerate() {
            slab_deg.push((v, right_slab[r]));
            b_deg.push((v, right_b[r]));
        }
        let slab = check_degrees(slab_deg, &slab_p);
        let b = check_degrees(b_deg, &b_p);
        let slab_colour_max = slab_colours.values().copied().max().unwrap_or(0);
        let b_colour_max = b_colours.values().copied().max().unwrap_or(0);
        let ok = slab.ok && b.ok && b_colour_max as f64 <= b_colour_bound;
        certs.push(SlabCertificate {
            index: i,
            slab,
            slab_colour_max,
            slab_colour_bound,
            b,
            b_colour_max,
            b_colour_bound,
            ok,
        });
        slabs.push(SlabGraph {
            index: i,
            left: left.clone(),
            right: right.clone(),
            edges,
            certificate: b_p,
        });
    }
    (slabs, certs)
}

/// Certifies `plan`, resampling both partitions with fresh derived seeds up
/// to `cfg.max_resamples` times.
pub fn certify_partition(
    g: &ColouredGraph,
    vertices: &[Vertex],
    colours: &[Colour],
    plan: PartitionPlan,
    cfg: &CertifyConfig,
    seed: u64,
) -> Result<CertifiedPlan, CertifyFailure> {
    let mut plan = plan;
    let mut resamples = 0;
    loop {
        let (slabs, certificates) = certify_plan(g, &plan, cfg);
        match certificates.iter().find(|c| !c.ok) {
            None => {
                return Ok(CertifiedPlan {
                    plan,
                    slabs,
                    certificates,
                    resamples,
                })
            }
            Some(bad) if resamples >= cfg.max_resamples => {
                return Err(CertifyFailure {
                    attempts: resamples + 1,
                    last: Box::new(bad.clone()),
                })
            }
            Some(bad) => {
                log::debug!(
                    "slab {} not certified (sample {resamples}); resampling",
                    bad.index
                );
                resamples += 1;
                plan = partition_plan(vertices, colours, plan.m, seed, resamples as u64)
                    .expect("resampling keeps the part count that already fit");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::rainbow_complete;

    #[test]
    fn exact_and_floor_division() {
        let v: Vec<Vertex> = (0..10).collect();
        let p = partition_vertices(&v, 1, 3).unwrap();
        assert_eq!(p.n_prime, 5);
        assert_eq!(p.parts.len(), 2);
        assert!(p.leftover.is_empty());
        let v: Vec<Vertex> = (0..11).collect();
        let p = partition_vertices(&v, 1, 3).unwrap();
        assert_eq!((p.n_prime, p.leftover.len()), (5, 1));
        let mut all: Vec<Vertex> = p.parts.concat();
        all.extend(&p.leftover);
        all.sort_unstable();
        assert_eq!(all, v);
    }

    #[test]
    fn seeded_determinism_and_rejection() {
        let v: Vec<Vertex> = (0..40).collect();
        assert_eq!(
            partition_vertices(&v, 3, 9).unwrap(),
            partition_vertices(&v, 3, 9).unwrap()
        );
        assert_eq!(
            partition_vertices(&v[..3], 3, 0).unwrap_err(),
            PartitionError::TooManyParts { parts: 4, n: 3 }
        );
    }

    #[test]
    fn colour_partition_shapes() {
        let cs: Vec<Colour> = (0..50).map(Colour).collect();
        assert_eq!(partition_colours(&cs, 1, 1).unwrap()[0].len(), 50);
        let empty = partition_colours(&[], 4, 1).unwrap();
        assert_eq!(empty, vec![Vec::<Colour>::new(); 4]);
    }

    #[test]
    fn single_slab_on_complete_graph_certifies() {
        let g = rainbow_complete(20);
        let v: Vec<Vertex> = (0..20).collect();
        let cs: Vec<Colour> = g.colour_set().into_iter().collect();
        let plan = partition_plan(&v, &cs, 1, 5, 0).unwrap();
        let cfg = CertifyConfig {
            gamma: 0.5,
            delta: 19.0 / 20.0,
            q: 0.0,
            max_resamples: 0,
        };
        let cert = certify_partition(&g, &v, &cs, plan, &cfg, 5).unwrap();
        assert_eq!(cert.resamples, 0);
        assert_eq!(cert.slabs[0].edges.len(), 100);
    }

    #[test]
    fn empty_part_fails_certification() {
        let g = rainbow_complete(12);
        let v: Vec<Vertex> = (0..12).collect();
        let cs: Vec<Colour> = g.colour_set().into_iter().collect();
        let mut plan = partition_plan(&v, &cs, 2, 1, 0).unwrap();
        plan.vertex_parts[1].clear();
        let mut cfg = CertifyConfig {
            gamma: 0.3,
            delta: 11.0 / 12.0,
            q: 0.0,
            max_resamples: 0,
        };
        let err = certify_partition(&g, &v, &cs, plan.clone(), &cfg, 1).unwrap_err();
        assert_eq!(err.last.index, 1);
        cfg.max_resamples = 10;
        let ok = certify_partition(&g, &v, &cs, plan, &cfg, 1).unwrap();
        assert!(ok.resamples >= 1);
        assert!(ok.plan.vertex_parts.iter().all(|p| p.len() == 4));
    }
}
