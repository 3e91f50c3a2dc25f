//! Seeded trial runs with aggregate statistics and pass/fail checks.

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::warn;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{build_counterexample, verify_counterexample, CounterexampleParams};
use crate::assembler::{
    near_rainbow_hamilton, proper_colouring_hamilton, PipelineParams, StageLog,
};
use crate::forest::{rainbow_matching_with, MatchingEffort, SlabGraph};
use crate::graph::{ColouredGraph, Vertex};
use crate::instance::{generate_instance, ColouringMode, InstanceSpec};
use crate::io::{read_graph, write_json, FormatError};
use crate::oracle::{
    is_hamilton_cycle, max_colour_hamilton_bruteforce, max_rainbow_matching_exact, OracleBudget,
};
use crate::rng::{derive_seed, rng_from_seed, Stage};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub root_seed: u64,
    /// Report destination; nothing is written when absent.
    pub output: Option<PathBuf>,
    #[serde(flatten)]
    pub kind: SuiteKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
pub enum SuiteKind {
    Pipeline(PipelineSuite),
    Adversary(AdversarySuite),
    OracleEquivalence(OracleSuite),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineSuite {
    pub n: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub colouring: ColouringMode,
    /// Run on the four-way split and count original colours.
    pub split_wrapper: bool,
    /// A success meets the target when `distinct >= target_fraction * n`.
    pub target_fraction: f64,
    pub min_success_rate: f64,
    pub min_target_rate: f64,
}

impl PipelineSuite {
    /// Round-robin `n/8`-bounded hosts, 90% targets.
    pub fn round_robin(n: usize, trials: usize) -> Self {
        PipelineSuite {
            n,
            epsilon: 0.1,
            trials,
            colouring: ColouringMode::RoundRobin { k: None },
            split_wrapper: false,
            target_fraction: 0.9,
            min_success_rate: 0.9,
            min_target_rate: 0.9,
        }
    }

    /// Misra-Gries colourings through the split wrapper.
    pub fn proper(n: usize, trials: usize) -> Self {
        PipelineSuite {
            colouring: ColouringMode::VizingLike,
            split_wrapper: true,
            target_fraction: 0.22,
            ..Self::round_robin(n, trials)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdversarySuite {
    /// Sizes for scaled constructions checked by exhaustive enumeration.
    pub exhaustive_n: Vec<usize>,
    /// Sizes for scaled constructions checked by the verifier only.
    pub roundtrip_n: Vec<usize>,
    pub max_retries: u32,
}

impl Default for AdversarySuite {
    fn default() -> Self {
        AdversarySuite {
            exhaustive_n: (6..=10).collect(),
            roundtrip_n: vec![64, 256, 1024],
            max_retries: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleTarget {
    /// Rainbow matching engine against the exact optimum; must agree.
    Matching,
    /// Small-n pipeline against exhaustive Hamilton enumeration.
    Hamilton,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSuite {
    pub target: OracleTarget,
    /// Directory of graph files; when absent, `generated` instances are drawn.
    pub corpus: Option<PathBuf>,
    pub generated: usize,
    /// Required share of equalities for the Hamilton target.
    pub min_equality_rate: f64,
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Corpus {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    /// Instance label: file name, or the construction parameters.
    pub label: Option<String>,
    pub success: bool,
    pub distinct_colours: Option<usize>,
    /// Oracle value or derived bound the result is compared with.
    pub reference: Option<usize>,
    pub agrees: Option<bool>,
    pub met_target: Option<bool>,
    pub wall_ms: f64,
    pub stage_log: Option<StageLog>,
    pub error: Option<String>,
}

impl TrialRecord {
    fn new(trial: usize, seed: u64, n: usize) -> Self {
        TrialRecord {
            trial,
            seed,
            n,
            label: None,
            success: false,
            distinct_colours: None,
            reference: None,
            agrees: None,
            met_target: None,
            wall_ms: 0.0,
            stage_log: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
    pub mean: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles; `None` for no values.
    pub fn of(values: &[f64]) -> Option<Quantiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let rank = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Some(Quantiles {
            min: v[0],
            p10: rank(0.1),
            p50: rank(0.5),
            p90: rank(0.9),
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub distinct_colours: Option<Quantiles>,
    pub wall_ms: Option<Quantiles>,
    /// Share of successes that met the target.
    pub target_rate: Option<f64>,
    /// Share of compared trials that agreed with the reference.
    pub agreement_rate: Option<f64>,
}

impl Aggregates {
    pub fn from_records(records: &[TrialRecord]) -> Aggregates {
        let trials = records.len();
        let successes = records.iter().filter(|r| r.success).count();
        let rate = |num: usize, den: usize| {
            if den == 0 {
                None
            } else {
                Some(num as f64 / den as f64)
            }
        };
        let distinct: Vec<f64> = records
            .iter()
            .filter_map(|r| r.distinct_colours.map(|d| d as f64))
            .collect();
        let wall: Vec<f64> = records.iter().map(|r| r.wall_ms).collect();
        let targeted: Vec<bool> = records
            .iter()
            .filter(|r| r.success)
            .filter_map(|r| r.met_target)
            .collect();
        let compared: Vec<bool> = records.iter().filter_map(|r| r.agrees).collect();
        Aggregates {
            trials,
            successes,
            success_rate: rate(successes, trials).unwrap_or(1.0),
            distinct_colours: Quantiles::of(&distinct),
            wall_ms: Quantiles::of(&wall),
            target_rate: rate(targeted.iter().filter(|&&b| b).count(), targeted.len()),
            agreement_rate: rate(compared.iter().filter(|&&b| b).count(), compared.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: SuiteConfig,
    pub records: Vec<TrialRecord>,
    pub aggregates: Aggregates,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl RunReport {
    fn assemble(
        config: &SuiteConfig,
        records: Vec<TrialRecord>,
        checks: Vec<Check>,
        mut warnings: Vec<String>,
    ) -> RunReport {
        if records.is_empty() {
            warn!("empty corpus: nothing to run");
            warnings.push("empty corpus: nothing to run".into());
        }
        let aggregates = Aggregates::from_records(&records);
        let passed = checks.iter().all(|c| c.passed);
        RunReport {
            config: config.clone(),
            records,
            aggregates,
            checks,
            warnings,
            passed,
        }
    }
}

/// Runs the suite; trials in parallel, each from its own derived seed.
/// Writes the report when `config.output` is set.
pub fn run_suite(config: &SuiteConfig) -> Result<RunReport, SuiteError> {
    let report = match &config.kind {
        SuiteKind::Pipeline(p) => pipeline_suite(config, p),
        SuiteKind::Adversary(a) => adversary_suite(config, a),
        SuiteKind::OracleEquivalence(o) => oracle_suite(config, o)?,
    };
    if let Some(path) = &config.output {
        write_json(path, &report)?;
    }
    Ok(report)
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn pipeline_suite(config: &SuiteConfig, p: &PipelineSuite) -> RunReport {
    let root = config.root_seed;
    let records: Vec<TrialRecord> = (0..p.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(root, Stage::Trial, trial as u64);
            let mut rec = TrialRecord::new(trial, seed, p.n);
            let spec = InstanceSpec::new(
                p.n,
                p.epsilon,
                p.colouring,
                derive_seed(root, Stage::Instance, trial as u64),
            );
            let g = match generate_instance(&spec) {
                Ok(g) => g,
                Err(e) => {
                    rec.error = Some(format!("instance: {e}"));
                    return rec;
                }
            };
            let mut params = PipelineParams::new(p.epsilon).with_seed(seed);
            params.concurrent_attempts = false;
            let start = Instant::now();
            let out = if p.split_wrapper {
                proper_colouring_hamilton(&g, &params)
            } else {
                near_rainbow_hamilton(&g, &params)
            };
            rec.wall_ms = elapsed_ms(start);
            match out {
                Ok(r) => {
                    rec.success = true;
                    rec.distinct_colours = Some(r.distinct_colours);
                    rec.met_target =
                        Some(r.distinct_colours as f64 >= p.target_fraction * p.n as f64);
                    rec.stage_log = Some(r.stage_log);
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            rec
        })
        .collect();
    let agg = Aggregates::from_records(&records);
    let target_rate = agg.target_rate.unwrap_or(1.0);
    let checks = vec![
        Check {
            name: "success rate".into(),
            passed: agg.success_rate >= p.min_success_rate,
            detail: format!(
                "{}/{} (need {:.0}%)",
                agg.successes,
                agg.trials,
                100.0 * p.min_success_rate
            ),
        },
        Check {
            name: format!("distinct colours >= {}n", p.target_fraction),
            passed: target_rate >= p.min_target_rate,
            detail: format!(
                "{:.1}% of successes (need {:.0}%)",
                100.0 * target_rate,
                100.0 * p.min_target_rate
            ),
        },
    ];
    RunReport::assemble(config, records, checks, Vec::new())
}

/// Scaled parameter tuples `(m, s, t, q)` on `n` vertices whose core has a
/// chance of reaching minimum degree `d`.
pub fn scaled_tuples(n: usize) -> Vec<CounterexampleParams> {
    let mut out = Vec::new();
    for q in 1..=n / 2 {
        for t in 1..2 * q {
            for m in 0..=1 {
                let Ok(base) = CounterexampleParams::scaled(n, m, 0, t, q) else {
                    continue;
                };
                let max_ell = base.core / 2;
                if base.k < base.d || max_ell < n / 8 {
                    continue;
                }
                let s = max_ell - n / 8;
                let p = CounterexampleParams::scaled(n, m, s, t, q).expect("checked above");
                if 2 * p.k * p.ell >= p.core * p.d {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn adversary_suite(config: &SuiteConfig, a: &AdversarySuite) -> RunReport {
    let budget = OracleBudget::from_env();
    let mut jobs: Vec<(CounterexampleParams, bool)> = Vec::new();
    for &n in &a.exhaustive_n {
        jobs.extend(scaled_tuples(n).into_iter().map(|p| (p, true)));
    }
    for &n in &a.roundtrip_n {
        // Apex a quarter of the vertices, core degree n/8 from n/4 + 1 colours.
        let q = n / 4;
        if let Ok(mut p) = CounterexampleParams::scaled(n, 0, 0, 1, q) {
            p.ell = p.core / 2;
            jobs.push((p, false));
        }
    }
    let mut warnings = Vec::new();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .enumerate()
        .map(|(trial, (p, exhaustive))| {
            let seed = derive_seed(config.root_seed, Stage::Adversary, trial as u64);
            let mut rec = TrialRecord::new(trial, seed, p.n);
            rec.label = Some(format!(
                "n={} m={} s={} t={} q={} ell={}",
                p.n, p.m, p.s, p.t, p.q, p.ell
            ));
            let start = Instant::now();
            let (g, cert) = match build_counterexample(p, seed, a.max_retries) {
                Ok(x) => x,
                Err(e) => {
                    rec.error = Some(e.to_string());
                    rec.wall_ms = elapsed_ms(start);
                    return rec;
                }
            };
            let report = verify_counterexample(&g, &cert);
            rec.success = report.passed;
            rec.reference = Some(report.derived_bound);
            if !report.passed {
                rec.error = Some(report.findings.join("; "));
            }
            if *exhaustive {
                match max_colour_hamilton_bruteforce(&g, &budget) {
                    Ok(best) => {
                        let best = best.map_or(0, |b| b.best);
                        rec.distinct_colours = Some(best);
                        rec.agrees = Some(best <= report.derived_bound && best <= report.n_minus_t);
                    }
                    Err(e) => rec.error = Some(e.to_string()),
                }
            }
            rec.wall_ms = elapsed_ms(start);
            rec
        })
        .collect();
    let built = records.iter().filter(|r| r.reference.is_some()).count();
    if built < records.len() {
        warnings.push(format!(
            "{} of {} tuples could not be constructed",
            records.len() - built,
            records.len()
        ));
    }
    let verified = records
        .iter()
        .filter(|r| r.reference.is_some() && r.success)
        .count();
    let compared: Vec<bool> = records.iter().filter_map(|r| r.agrees).collect();
    let checks = vec![
        Check {
            name: "certificates verify".into(),
            passed: verified == built,
            detail: format!("{verified}/{built}"),
        },
        Check {
            name: "enumeration within derived bound".into(),
            passed: compared.iter().all(|&b| b),
            detail: format!(
                "{}/{}",
                compared.iter().filter(|&&b| b).count(),
                compared.len()
            ),
        },
    ];
    RunReport::assemble(config, records, checks, warnings)
}

/// Random bipartite coloured graphs on at most `max_vertices` vertices.
/// Half use a proper colouring, half a random palette.
pub fn bipartite_corpus(count: usize, max_vertices: usize, seed: u64) -> Vec<ColouredGraph> {
    (0..count)
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, Stage::Instance, i as u64));
            let n = rng.random_range(2..=max_vertices.max(2));
            let a = rng.random_range(1..n);
            let density = rng.random_range(0.2..0.9);
            let palette = rng.random_range(1..=n.max(2));
            let proper = i % 2 == 0;
            let mut triples = Vec::new();
            let mut used: Vec<Vec<u32>> = vec![Vec::new(); n];
            for u in 0..a {
                for v in a..n {
                    if !rng.random_bool(density) {
                        continue;
                    }
                    let c = if proper {
                        let free: Vec<u32> = (0..(n as u32 + palette as u32))
                            .filter(|c| !used[u].contains(c) && !used[v].contains(c))
                            .take(palette)
                            .collect();
                        free[rng.random_range(0..free.len())]
                    } else {
                        rng.random_range(0..palette as u32)
                    };
                    used[u].push(c);
                    used[v].push(c);
                    triples.push((u, v, c));
                }
            }
            ColouredGraph::new(n, triples).expect("bipartite pairs are simple")
        })
        .collect()
}

/// Proper colourings of small hosts with `delta >= (1/2 + epsilon) n`,
/// `n` between 5 and 10, mixing Misra-Gries and few-colour round-robin.
pub fn small_hamilton_corpus(count: usize, epsilon: f64, seed: u64) -> Vec<ColouredGraph> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0u64;
    while out.len() < count {
        let mut rng = rng_from_seed(derive_seed(seed, Stage::SmallN, i));
        let n = rng.random_range(5..=10);
        let (colouring, bound) = match i % 3 {
            0 => (ColouringMode::VizingLike, None),
            1 => (ColouringMode::RoundRobin { k: None }, Some(2)),
            _ => (ColouringMode::RoundRobin { k: None }, Some(3)),
        };
        let mut spec = InstanceSpec::new(n, epsilon, colouring, rng.random());
        spec.target_bound = bound;
        spec.host_density = Some(rng.random_range(0.5..1.0));
        if let Ok(g) = generate_instance(&spec) {
            out.push(g);
        }
        i += 1;
    }
    out
}

/// Two-colours the vertices; `None` if the graph is not bipartite.
pub fn bipartition(g: &ColouredGraph) -> Option<(Vec<Vertex>, Vec<Vertex>)> {
    let mut side = vec![None; g.n()];
    for s in 0..g.n() {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(false);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let su = side[u].expect("assigned on push");
            for w in g.neighbours(u) {
                match side[w] {
                    None => {
                        side[w] = Some(!su);
                        stack.push(w);
                    }
                    Some(sw) if sw == su => return None,
                    _ => {}
                }
            }
        }
    }
    let left = (0..g.n()).filter(|&v| side[v] == Some(false)).collect();
    let right = (0..g.n()).filter(|&v| side[v] == Some(true)).collect();
    Some((left, right))
}

fn load_corpus(dir: &Path) -> Result<Vec<(String, ColouredGraph)>, SuiteError> {
    let corpus_err = |source| SuiteError::Corpus {
        path: dir.to_owned(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(corpus_err)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(corpus_err)?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let g = read_graph(&p)?;
            Ok((
                p.file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                g,
            ))
        })
        .collect()
}

fn oracle_suite(config: &SuiteConfig, o: &OracleSuite) -> Result<RunReport, SuiteError> {
    let root = config.root_seed;
    let corpus: Vec<(Option<String>, ColouredGraph)> = match &o.corpus {
        Some(dir) => load_corpus(dir)?
            .into_iter()
            .map(|(l, g)| (Some(l), g))
            .collect(),
        None => match o.target {
            OracleTarget::Matching => bipartite_corpus(o.generated, 14, root),
            OracleTarget::Hamilton => small_hamilton_corpus(o.generated, 0.05, root),
        }
        .into_iter()
        .map(|g| (None, g))
        .collect(),
    };
    let budget = OracleBudget::from_env();
    let records: Vec<TrialRecord> = corpus
        .par_iter()
        .enumerate()
        .map(|(trial, (label, g))| {
            let seed = derive_seed(root, Stage::Trial, trial as u64);
            let mut rec = TrialRecord::new(trial, seed, g.n());
            rec.label = label.clone();
            let start = Instant::now();
            match o.target {
                OracleTarget::Matching => matching_trial(g, seed, &budget, &mut rec),
                OracleTarget::Hamilton => hamilton_trial(g, seed, &budget, &mut rec),
            }
            rec.wall_ms = elapsed_ms(start);
            rec
        })
        .collect();
    let compared: Vec<&TrialRecord> = records.iter().filter(|r| r.agrees.is_some()).collect();
    let agreeing = compared.iter().filter(|r| r.agrees == Some(true)).count();
    let checks = match o.target {
        OracleTarget::Matching => vec![Check {
            name: "engine attains the exact optimum".into(),
            passed: agreeing == compared.len() && compared.len() == records.len(),
            detail: format!("{agreeing}/{} ({} compared)", records.len(), compared.len()),
        }],
        OracleTarget::Hamilton => {
            let sound = records.iter().all(|r| r.error.is_none() || !r.success);
            let rate = if compared.is_empty() {
                1.0
            } else {
                agreeing as f64 / compared.len() as f64
            };
            vec![
                Check {
                    name: "cycles valid and within the optimum".into(),
                    passed: sound,
                    detail: format!(
                        "{} violations",
                        records
                            .iter()
                            .filter(|r| r.success && r.error.is_some())
                            .count()
                    ),
                },
                Check {
                    name: "equality with the optimum".into(),
                    passed: rate >= o.min_equality_rate,
                    detail: format!(
                        "{agreeing}/{} (need {:.0}%)",
                        compared.len(),
                        100.0 * o.min_equality_rate
                    ),
                },
            ]
        }
    };
    Ok(RunReport::assemble(config, records, checks, Vec::new()))
}

fn matching_trial(g: &ColouredGraph, seed: u64, budget: &OracleBudget, rec: &mut TrialRecord) {
    let Some((left, right)) = bipartition(g) else {
        rec.error = Some("not bipartite".into());
        return;
    };
    let exact = match max_rainbow_matching_exact(g, budget) {
        Ok(m) => m.len(),
        Err(e) => {
            rec.error = Some(e.to_string());
            return;
        }
    };
    let slab = SlabGraph::from_bipartite(g, &left, &right);
    let found = rainbow_matching_with(&slab, 0.0, seed, MatchingEffort::EXHAUSTIVE).size();
    rec.success = true;
    rec.distinct_colours = Some(found);
    rec.reference = Some(exact);
    rec.agrees = Some(found == exact);
}

/// Success means the pipeline returned a cycle; a returned cycle that is
/// not Hamilton or beats the optimum is recorded as an error.
fn hamilton_trial(g: &ColouredGraph, seed: u64, budget: &OracleBudget, rec: &mut TrialRecord) {
    let best = match max_colour_hamilton_bruteforce(g, budget) {
        Ok(b) => b,
        Err(e) => {
            rec.error = Some(e.to_string());
            return;
        }
    };
    let params = PipelineParams::new(0.05).with_seed(seed);
    let res = match near_rainbow_hamilton(g, &params) {
        Ok(r) => r,
        Err(e) => {
            rec.error = Some(e.to_string());
            return;
        }
    };
    rec.success = true;
    rec.distinct_colours = Some(res.distinct_colours);
    let Some(best) = best else {
        rec.error = Some("pipeline returned a cycle on a non-Hamiltonian graph".into());
        return;
    };
    rec.reference = Some(best.best);
    if !is_hamilton_cycle(g, &res.cycle) || res.distinct_colours > best.best {
        rec.error = Some(format!(
            "unsound: {} colours against optimum {}",
            res.distinct_colours, best.best
        ));
    }
    rec.agrees = Some(res.distinct_colours == best.best);
    rec.stage_log = Some(res.stage_log);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kind: SuiteKind) -> SuiteConfig {
        SuiteConfig {
            root_seed: 7,
            output: None,
            kind,
        }
    }

    #[test]
    fn quantiles_nearest_rank() {
        let q = Quantiles::of(&[5.0, 1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(
            (q.min, q.p10, q.p50, q.p90, q.max, q.mean),
            (1.0, 1.0, 3.0, 5.0, 5.0, 3.0)
        );
        assert!(Quantiles::of(&[]).is_none());
    }

    #[test]
    fn empty_corpus_passes_with_warning() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(SuiteKind::OracleEquivalence(OracleSuite {
            target: OracleTarget::Matching,
            corpus: Some(dir.path().to_owned()),
            generated: 0,
            min_equality_rate: 0.8,
        }));
        let r = run_suite(&cfg).unwrap();
        assert!(r.records.is_empty());
        assert!(r.passed);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn missing_corpus_names_the_directory() {
        let cfg = config(SuiteKind::OracleEquivalence(OracleSuite {
            target: OracleTarget::Matching,
            corpus: Some("/nonexistent/corpus".into()),
            generated: 0,
            min_equality_rate: 0.8,
        }));
        let e = run_suite(&cfg).unwrap_err().to_string();
        assert!(e.contains("/nonexistent/corpus"), "{e}");
    }

    #[test]
    fn matching_suite_agrees_and_aggregates_recompute() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report.json");
        let mut cfg = config(SuiteKind::OracleEquivalence(OracleSuite {
            target: OracleTarget::Matching,
            corpus: None,
            generated: 40,
            min_equality_rate: 1.0,
        }));
        cfg.output = Some(out.clone());
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(Aggregates::from_records(&r.records), r.aggregates);
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
        assert_eq!(v["config"]["suite"], "oracle-equivalence");
        assert_eq!(v["records"].as_array().unwrap().len(), 40);
    }

    #[test]
    fn reproducible_from_root_seed() {
        let cfg = config(SuiteKind::OracleEquivalence(OracleSuite {
            target: OracleTarget::Hamilton,
            corpus: None,
            generated: 6,
            min_equality_rate: 0.0,
        }));
        let a = run_suite(&cfg).unwrap();
        let b = run_suite(&cfg).unwrap();
        let key = |r: &RunReport| {
            r.records
                .iter()
                .map(|t| (t.seed, t.distinct_colours, t.reference))
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&a), key(&b));
        assert!(a.checks[0].passed);
    }

    #[test]
    fn corpora_meet_their_descriptions() {
        for g in bipartite_corpus(30, 14, 3) {
            assert!(g.n() <= 14);
            assert!(bipartition(&g).is_some());
        }
        for g in small_hamilton_corpus(12, 0.05, 3) {
            assert!((5..=10).contains(&g.n()));
            assert!(g.is_proper());
            assert!(g.min_degree() as f64 >= 0.55 * g.n() as f64 - 1e-9);
        }
    }

    #[test]
    fn scaled_tuples_exist_for_tiny_n() {
        for n in 6..=10 {
            assert!(!scaled_tuples(n).is_empty(), "n = {n}");
        }
    }
}
