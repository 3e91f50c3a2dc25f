//! Dense properly coloured graphs whose Hamilton cycles all miss colours.
//!
//! A core `H` on `n/2 + q` vertices is a union of `k = 2q - t` random
//! matchings (one colour each); `n/2 - q` apex vertices are joined to all of
//! `H` with fresh colours. The apex set is independent, so every Hamilton
//! cycle spends `2(n/2 - q)` edges on apex vertices and the remaining `2q`
//! on `H`, which only has `2q - t` colours.

use std::collections::{BTreeSet, HashMap, HashSet};

use log::{debug, warn};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{validate, Colour, ColouredGraph, Vertex};
use crate::rng::{derive_seed, rng_from_seed, Stage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleParams {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub t: usize,
    pub q: usize,
    pub k: usize,
    pub ell: usize,
    pub d: usize,
    pub core: usize,
    pub apex: usize,
    /// `2^4 d^2 / n + 2 sqrt(d) log n`, logged only.
    pub h: f64,
    /// Built by [`CounterexampleParams::scaled`]; the size inequalities are
    /// not required.
    pub scaled: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("random matchings: {0}")]
    Precondition(String),
    #[error("after {attempts} samples the core has minimum degree {achieved} < {d}")]
    Exhausted {
        attempts: u32,
        achieved: usize,
        d: usize,
    },
}

impl CounterexampleParams {
    /// Integer parameters: `q = floor(s / 2^10)`, `k = 2q - t`,
    /// `ell = floor(n/8) + s`, `apex = floor(n/2) - q`, `core = n - apex`,
    /// `d = q + m + (n mod 2)` so that core degrees reach `n/2 + m`.
    pub fn new(n: usize, m: usize, s: usize, t: usize) -> Result<Self, AdversaryError> {
        let q = s >> 10;
        Self::assemble(n, m, s, t, q, false)
    }

    /// Small analogue with `q` chosen freely and `ell = floor(n/8) + s`.
    pub fn scaled(
        n: usize,
        m: usize,
        s: usize,
        t: usize,
        q: usize,
    ) -> Result<Self, AdversaryError> {
        Self::assemble(n, m, s, t, q, true)
    }

    fn assemble(
        n: usize,
        m: usize,
        s: usize,
        t: usize,
        q: usize,
        scaled: bool,
    ) -> Result<Self, AdversaryError> {
        if 2 * q < t {
            return Err(AdversaryError::Params(format!(
                "k = 2q - t is negative (q = {q}, t = {t})"
            )));
        }
        if q > n / 2 {
            return Err(AdversaryError::Params(format!("q = {q} exceeds n/2")));
        }
        let apex = n / 2 - q;
        let core = n - apex;
        let d = q + m + n % 2;
        let nf = n.max(2) as f64;
        let p = CounterexampleParams {
            n,
            m,
            s,
            t,
            q,
            k: 2 * q - t,
            ell: n / 8 + s,
            d,
            core,
            apex,
            h: 16.0 * (d as f64).powi(2) / nf + 2.0 * (d as f64).sqrt() * nf.ln(),
            scaled,
        };
        if !scaled {
            p.check_theorem()?;
        }
        Ok(p)
    }

    /// The size inequalities of the construction.
    pub fn check_theorem(&self) -> Result<(), AdversaryError> {
        let (n, nf) = (self.n, self.n as f64);
        let cap = nf / (1u64 << 20) as f64;
        if self.m as f64 > cap || self.t as f64 > cap {
            return Err(AdversaryError::Params(format!(
                "m, t <= 2^-20 n = {cap:.3} fails (m = {}, t = {})",
                self.m, self.t
            )));
        }
        if self.s > n / 8 {
            return Err(AdversaryError::Params(format!(
                "s = {} exceeds n/8 = {}",
                self.s,
                n / 8
            )));
        }
        let lhs = self.s as f64 / 1024.0;
        let rhs = ((self.m as f64) * nf)
            .sqrt()
            .max((self.t as f64 * nf).sqrt())
            .max((nf * nf.ln()).powf(2.0 / 3.0));
        if lhs < rhs {
            return Err(AdversaryError::Params(format!(
                "2^-10 s = {lhs:.1} is below max(sqrt(mn), sqrt(tn), (n log n)^(2/3)) = {rhs:.1}"
            )));
        }
        Ok(())
    }

    /// `c' = min(c, 1/4)`, `eps = (c' - 1/8)^2 2^-20`, `s = (c' - 1/8) n`,
    /// `m = t = eps n`, floored.
    pub fn proposition(n: usize, c: f64) -> Result<Self, AdversaryError> {
        let cp = c.min(0.25);
        if cp <= 0.125 {
            return Err(AdversaryError::Params(format!("c = {c} must exceed 1/8")));
        }
        let eps = (cp - 0.125).powi(2) / (1u64 << 20) as f64;
        let s = ((cp - 0.125) * n as f64).floor() as usize;
        let mt = (eps * n as f64).floor() as usize;
        Self::new(n, mt, s, mt)
    }

    /// `s = 2^10 (n log n)^(2/3)`, `m = t = 1`.
    pub fn corollary(n: usize) -> Result<Self, AdversaryError> {
        let nf = n as f64;
        let s = (1024.0 * (nf * nf.ln()).powf(2.0 / 3.0)).ceil() as usize;
        Self::new(n, 1, s, 1)
    }

    /// Bound implied by the structure: apex edges plus at most `k` core colours.
    pub fn derived_bound(&self) -> usize {
        let core_edges = self.n - 2 * self.apex;
        2 * self.apex + self.k.min(core_edges)
    }
}

/// Smallest `n` (searched over powers of two, then bisected) at which the
/// corollary's parameters satisfy the size inequalities.
pub fn smallest_valid_corollary_n() -> usize {
    let ok = |n: usize| CounterexampleParams::corollary(n).is_ok();
    let mut hi = 1usize << 20;
    while !ok(hi) {
        hi = hi.checked_mul(2).expect("a valid n exists below 2^64");
    }
    let mut lo = hi / 2;
    while hi - lo > hi / 1000 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Precondition of the random-matchings construction, in the stronger form
/// `2 k ell / n > d + 2^6 d^2 / n + 4 sqrt(d) log n`.
pub fn matchings_condition(
    n_h: usize,
    d: usize,
    k: usize,
    ell: usize,
) -> Result<(), AdversaryError> {
    let nf = n_h as f64;
    let df = d as f64;
    if 2 * ell > n_h {
        return Err(AdversaryError::Precondition(format!(
            "ell = {ell} exceeds n/2 = {}",
            n_h / 2
        )));
    }
    if df > nf / 32.0 {
        return Err(AdversaryError::Precondition(format!(
            "d = {d} exceeds 2^-5 n = {:.1}",
            nf / 32.0
        )));
    }
    let lhs = 2.0 * (k * ell) as f64 / nf;
    let rhs = df + 64.0 * df * df / nf + 4.0 * df.sqrt() * nf.ln();
    if lhs <= rhs {
        return Err(AdversaryError::Precondition(format!(
            "2 k ell / n = {lhs:.2} is not above {rhs:.2}"
        )));
    }
    Ok(())
}

/// Union of `k` uniform random `ell`-matchings on `n_h` vertices, colour `i`
/// on matching `i`, repeated edges keeping the first colour. Resampled until
/// the minimum degree reaches `d`. With `strict`, the arithmetic
/// precondition must hold.
pub fn random_matchings_graph(
    n_h: usize,
    d: usize,
    k: usize,
    ell: usize,
    seed: u64,
    max_retries: u32,
    strict: bool,
) -> Result<(ColouredGraph, u32), AdversaryError> {
    if 2 * ell > n_h {
        return Err(AdversaryError::Precondition(format!(
            "ell = {ell} exceeds n/2 = {}",
            n_h / 2
        )));
    }
    match matchings_condition(n_h, d, k, ell) {
        Ok(()) => {}
        Err(e) if strict => return Err(e),
        Err(e) => warn!("matching precondition relaxed: {e}"),
    }
    let mut achieved = 0;
    for attempt in 0..max_retries.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, Stage::Adversary, attempt as u64));
        let mut seen = HashSet::new();
        let mut triples = Vec::new();
        let mut order: Vec<Vertex> = (0..n_h).collect();
        for c in 0..k {
            order.shuffle(&mut rng);
            for pair in order[..2 * ell].chunks(2) {
                let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if seen.insert((u, v)) {
                    triples.push((u, v, c as u32));
                }
            }
        }
        let h = ColouredGraph::new(n_h, triples).expect("deduplicated pairs are simple");
        achieved = h.min_degree();
        debug!("random matchings sample {attempt}: min degree {achieved}, need {d}");
        if achieved >= d {
            return Ok((h, attempt + 1));
        }
    }
    Err(AdversaryError::Exhausted {
        attempts: max_retries.max(1),
        achieved,
        d,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCertificate {
    pub params: CounterexampleParams,
    pub core_vertices: Vec<Vertex>,
    pub apex_vertices: Vec<Vertex>,
    pub core_colour_count: usize,
    pub per_colour_max: usize,
    pub min_degree: usize,
    pub derived_bound: usize,
}

/// Builds the graph: core on `0..core`, apex vertices after it.
pub fn build_counterexample(
    params: &CounterexampleParams,
    seed: u64,
    max_retries: u32,
) -> Result<(ColouredGraph, CounterexampleCertificate), AdversaryError> {
    if !params.scaled {
        params.check_theorem()?;
    }
    let (h, _) = random_matchings_graph(
        params.core,
        params.d,
        params.k,
        params.ell,
        seed,
        max_retries,
        !params.scaled,
    )?;
    let core = params.core;
    let mut triples: Vec<(Vertex, Vertex, u32)> =
        h.edges().iter().map(|e| (e.u, e.v, e.colour.0)).collect();
    let mut next = params.k as u32;
    for a in core..params.n {
        for v in 0..core {
            triples.push((v, a, next));
            next += 1;
        }
    }
    let g = ColouredGraph::new(params.n, triples).expect("core and apex edges are disjoint");
    let report = validate(&g);
    let cert = CounterexampleCertificate {
        params: params.clone(),
        core_vertices: (0..core).collect(),
        apex_vertices: (core..params.n).collect(),
        core_colour_count: h.colour_set().len(),
        per_colour_max: report.max_colour_multiplicity,
        min_degree: report.min_degree,
        derived_bound: params.derived_bound(),
    };
    Ok((g, cert))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// (a) apex set independent and complete to the core; the two sets partition V.
    pub apex_structure: bool,
    /// (b) at most `2q - t` core colours; every apex colour used exactly once.
    pub colours: bool,
    /// (c) proper and `(n/8 + s)`-bounded.
    pub proper_bounded: bool,
    /// (d) minimum degree at least `n/2 + m`.
    pub min_degree: bool,
    pub core_colours: usize,
    pub derived_bound: usize,
    pub n_minus_t: usize,
    pub passed: bool,
    pub findings: Vec<String>,
}

/// Checks the certificate against the graph and derives the colour bound.
pub fn verify_counterexample(g: &ColouredGraph, cert: &CounterexampleCertificate) -> VerifyReport {
    let p = &cert.params;
    let n = g.n();
    let mut findings = Vec::new();
    let mut is_core = vec![false; n];
    let mut is_apex = vec![false; n];
    for &v in &cert.core_vertices {
        if v < n {
            is_core[v] = true;
        }
    }
    for &v in &cert.apex_vertices {
        if v < n {
            is_apex[v] = true;
        }
    }
    let partition = n == p.n
        && cert
            .core_vertices
            .iter()
            .chain(&cert.apex_vertices)
            .all(|&v| v < n)
        && (0..n).all(|v| is_core[v] ^ is_apex[v])
        && cert.core_vertices.len() + cert.apex_vertices.len() == n;
    if !partition {
        findings.push("core and apex sets do not partition the vertex set".into());
    }
    let independent = partition && g.edges().iter().all(|e| !(is_apex[e.u] && is_apex[e.v]));
    let complete = partition
        && cert
            .apex_vertices
            .iter()
            .all(|&a| cert.core_vertices.iter().all(|&v| g.has_edge(a, v)));
    if partition && !independent {
        findings.push("apex set is not independent".into());
    }
    if partition && !complete {
        findings.push("some apex vertex misses a core vertex".into());
    }
    let apex_structure = partition && independent && complete;

    let mut class: HashMap<Colour, usize> = HashMap::new();
    for e in g.edges() {
        *class.entry(e.colour).or_insert(0) += 1;
    }
    let core_colours: BTreeSet<Colour> = g
        .edges()
        .iter()
        .filter(|e| partition && is_core[e.u] && is_core[e.v])
        .map(|e| e.colour)
        .collect();
    let apex_unique = g
        .edges()
        .iter()
        .filter(|e| partition && (is_apex[e.u] || is_apex[e.v]))
        .all(|e| class[&e.colour] == 1);
    let k = (2 * p.q).saturating_sub(p.t);
    if core_colours.len() > k {
        findings.push(format!(
            "core uses {} colours, above 2q - t = {k}",
            core_colours.len()
        ));
    }
    if !apex_unique {
        findings.push("an apex colour is used more than once".into());
    }
    let colours = partition && core_colours.len() <= k && apex_unique;

    let report = validate(g);
    let proper_bounded = report.is_proper && report.max_colour_multiplicity <= p.ell;
    if !proper_bounded {
        findings.push(format!(
            "proper = {}, largest class {} vs allowed {}",
            report.is_proper, report.max_colour_multiplicity, p.ell
        ));
    }
    let min_degree = report.min_degree as f64 >= n as f64 / 2.0 + p.m as f64;
    if !min_degree {
        findings.push(format!(
            "minimum degree {} below n/2 + m = {:.1}",
            report.min_degree,
            n as f64 / 2.0 + p.m as f64
        ));
    }
    // A Hamilton cycle has 2|apex| apex edges (the apex set is independent)
    // and n - 2|apex| core edges, so at most that many core colours.
    let apex = cert.apex_vertices.len();
    let core_edges = n.saturating_sub(2 * apex);
    let derived_bound = 2 * apex + core_colours.len().min(core_edges);
    let n_minus_t = n.saturating_sub(p.t);
    let passed =
        apex_structure && colours && proper_bounded && min_degree && derived_bound <= n_minus_t;
    VerifyReport {
        apex_structure,
        colours,
        proper_bounded,
        min_degree,
        core_colours: core_colours.len(),
        derived_bound,
        n_minus_t,
        passed,
        findings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::rainbow_complete;
    use crate::oracle::{max_colour_hamilton_bruteforce, OracleBudget};

    #[test]
    fn derived_integers() {
        let n = 1usize << 56;
        let s = n / 8;
        let p = CounterexampleParams::new(n, 1, s, 1).unwrap();
        assert_eq!(p.q, s / 1024);
        assert_eq!(p.core, n / 2 + p.q);
        assert_eq!(p.d, p.q + 1);
        assert_eq!(p.ell, n / 8 + s);
        assert_eq!(p.k, 2 * p.q - 1);
        assert_eq!(p.derived_bound(), n - 1);
    }

    #[test]
    fn instantiations_need_astronomical_n() {
        assert!(CounterexampleParams::corollary(1 << 30).is_err());
        assert!(CounterexampleParams::corollary(1 << 56).is_ok());
        let p = CounterexampleParams::proposition(1 << 56, 0.2).unwrap();
        assert_eq!(p.m, p.t);
        assert!(p.m >= 1);
        let small = smallest_valid_corollary_n();
        assert!(
            small > 100_000_000_000_000 && small < 1_000_000_000_000_000,
            "{small}"
        );
    }

    #[test]
    fn single_matching_core() {
        let (h, _) = random_matchings_graph(8, 1, 1, 4, 0, 1, false).unwrap();
        assert_eq!(h.edge_count(), 4);
        assert_eq!(h.max_colour_multiplicity(), 4);
        assert!(random_matchings_graph(8, 2, 1, 4, 0, 3, false).is_err());
        assert!(random_matchings_graph(8, 1, 1, 4, 0, 1, true).is_err());
    }

    #[test]
    fn scaled_round_trip_and_enumeration() {
        let p = CounterexampleParams::scaled(10, 0, 0, 1, 2).unwrap();
        assert_eq!((p.core, p.apex, p.k, p.d, p.ell), (7, 3, 3, 2, 1));
        let p = CounterexampleParams { ell: 3, ..p };
        let (g, cert) = build_counterexample(&p, 4, 200).unwrap();
        let r = verify_counterexample(&g, &cert);
        assert!(r.passed, "{:?}", r.findings);
        let best = max_colour_hamilton_bruteforce(&g, &OracleBudget::default())
            .unwrap()
            .unwrap();
        assert!(best.best <= r.n_minus_t);
        assert!(best.best <= r.derived_bound);
    }

    #[test]
    fn fake_certificate_fails() {
        let g = rainbow_complete(10);
        let p = CounterexampleParams::scaled(10, 0, 0, 1, 2).unwrap();
        let cert = CounterexampleCertificate {
            params: p.clone(),
            core_vertices: (0..7).collect(),
            apex_vertices: (7..10).collect(),
            core_colour_count: 3,
            per_colour_max: 1,
            min_degree: 9,
            derived_bound: p.derived_bound(),
        };
        let r = verify_counterexample(&g, &cert);
        assert!(!r.colours);
        assert!(!r.apex_structure);
        assert!(!r.passed);
    }
}
