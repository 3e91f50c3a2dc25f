//! `dirac-rainbow` command-line front end.
//!
//! Exit codes: 0 on success, 1 on malformed or rejected input (including
//! I/O errors), 2 when valid input leads to a failed run or a failed check.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_rainbow::absorber::{
    absorb, build_absorber, neighbourhood_matching, NeighbourhoodParams,
};
use dirac_rainbow::adversary::{
    build_counterexample, verify_counterexample, CounterexampleCertificate, CounterexampleParams,
};
use dirac_rainbow::assembler::{
    near_rainbow_hamilton, proper_colouring_hamilton, PipelineError, PipelineParams,
};
use dirac_rainbow::forest::{rainbow_forest, rainbow_forest_dense, ForestConfig};
use dirac_rainbow::graph::ColouredGraph;
use dirac_rainbow::instance::{generate_instance, ColouringMode, InstanceSpec};
use dirac_rainbow::io::{read_graph, read_json, to_json_string, write_graph, write_json};
use dirac_rainbow::oracle::{
    max_colour_hamilton_bruteforce, max_rainbow_matching_exact, OracleBudget,
};
use dirac_rainbow::regular::regular_spanning_subgraph;
use dirac_rainbow::suite::{
    run_suite, AdversarySuite, OracleSuite, OracleTarget, PipelineSuite, SuiteConfig, SuiteKind,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "dirac-rainbow",
    version,
    about = "Near-rainbow Hamilton cycles in properly edge-coloured dense graphs"
)]
struct Cli {
    /// Root seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Summary format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Suppress summaries and warnings.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a host with a proper bounded colouring.
    Gen(GenArgs),
    /// Extract an even-regular spanning subgraph.
    Regularize { input: PathBuf, output: PathBuf },
    /// Build a rainbow path forest.
    Forest {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        /// Greedy forest for hosts of minimum degree at least (1 - delta) n.
        #[arg(long)]
        dense: bool,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.25)]
        gamma: f64,
    },
    /// Build an absorbing path and print its certificate.
    Absorber(AbsorberArgs),
    /// Find a Hamilton cycle with many colours.
    Solve(SolveArgs),
    /// Counterexample construction and verification.
    #[command(subcommand)]
    Adversary(AdversaryCommand),
    /// Exact answers for small graphs.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Seeded acceptance runs.
    #[command(subcommand)]
    Suite(SuiteCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Rainbow,
    RoundRobin,
    Matchings,
    Vizing,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = Mode::RoundRobin)]
    mode: Mode,
    /// Colour count (round-robin, matchings).
    #[arg(long)]
    k: Option<usize>,
    /// Matching size (matchings).
    #[arg(long)]
    ell: Option<usize>,
    /// Largest colour class.
    #[arg(long)]
    bound: Option<usize>,
    /// Edge probability of the random host.
    #[arg(long)]
    density: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AbsorberArgs {
    input: PathBuf,
    #[arg(long)]
    m: f64,
    /// Degree margin; defaults to delta/n - 1/2.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Defaults to epsilon / 2^11.
    #[arg(long)]
    c: Option<f64>,
    /// Defaults to 8c / epsilon.
    #[arg(long)]
    big_c: Option<f64>,
    /// Keep one matching edge per colour.
    #[arg(long)]
    rainbow: bool,
    /// Also absorb these vertices (comma-separated) and print the path.
    #[arg(long, value_delimiter = ',')]
    absorb: Vec<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 4)]
    attempts: u32,
    /// Accept any proper colouring: split each colour four ways and report
    /// original colours.
    #[arg(long)]
    proper: bool,
    /// Use the literal asymptotic budgets instead of the desk calibration.
    #[arg(long)]
    theorem_budgets: bool,
    /// Cycle destination, one vertex per line; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Stage log destination; stderr when absent.
    #[arg(long)]
    stage_log: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AdversaryCommand {
    /// Build a counterexample graph and certificate.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        /// Scaled construction with this q; the size inequalities are waived.
        #[arg(long)]
        q: Option<usize>,
        /// Override the matching size of a scaled construction.
        #[arg(long, requires = "q")]
        ell: Option<usize>,
        #[arg(long, default_value_t = 50)]
        retries: u32,
        graph: PathBuf,
        cert: PathBuf,
    },
    /// Check a certificate against a graph.
    Verify { graph: PathBuf, cert: PathBuf },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Most colours on any Hamilton cycle.
    Hamilton { input: PathBuf },
    /// Largest rainbow matching.
    Matching { input: PathBuf },
}

#[derive(Subcommand)]
enum SuiteCommand {
    /// Pipeline trials on generated hosts.
    Pipeline {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Misra-Gries colourings through the split wrapper.
        #[arg(long)]
        proper: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scaled counterexamples, verified and enumerated.
    Adversary {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Engine against oracle.
    Oracle {
        #[arg(value_enum)]
        target: Target,
        /// Directory of graph files; generated instances when absent.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        generated: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a suite described by a JSON config.
    Config { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Matching,
    Hamilton,
}

/// A run that failed on valid input.
struct Failure;

fn main() -> ExitCode {
    // Usage errors are malformed input, not clap's default exit code 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure)) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn summary(cli: &Cli, text: impl FnOnce() -> String, value: Value) {
    if cli.quiet {
        return;
    }
    match cli.format {
        Format::Text => println!("{}", text()),
        Format::Json => println!("{value}"),
    }
}

fn load(path: &Path) -> Result<ColouredGraph> {
    read_graph(path).with_context(|| format!("reading {}", path.display()))
}

type Outcome = Result<Result<(), Failure>>;

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Gen(a) => gen(cli, a),
        Command::Regularize { input, output } => {
            let g = load(input)?;
            let res = regular_spanning_subgraph(&g, cli.seed).context("regularize")?;
            write_graph(output, &res.subgraph)?;
            summary(
                cli,
                || format!("{}-regular spanning subgraph on {} vertices", res.r, g.n()),
                json!({"r": res.r, "n": g.n()}),
            );
            Ok(Ok(()))
        }
        Command::Forest {
            input,
            output,
            alpha,
            dense,
            delta,
            gamma,
        } => {
            let g = load(input)?;
            let (forest, value) = if *dense {
                let f =
                    rainbow_forest_dense(&g, *delta, *gamma, cli.seed).context("dense forest")?;
                let v = json!({
                    "paths": f.paths, "v_F": f.forest.vertex_count(),
                    "distinct_colours": f.forest.colours(&g).len(), "shortfall": f.shortfall,
                });
                (f.forest, v)
            } else {
                let cfg = ForestConfig {
                    alpha: *alpha,
                    ..ForestConfig::default()
                };
                let out = rainbow_forest(&g, &cfg, cli.seed).context("forest")?;
                let shortfalls: Vec<bool> = out.report.slabs.iter().map(|s| s.shortfall).collect();
                let v = json!({
                    "paths": out.report.paths, "v_F": out.report.v_f,
                    "distinct_colours": out.report.distinct_colours, "shortfalls": shortfalls,
                });
                (out.forest, v)
            };
            write_json(output, &forest.paths)?;
            summary(
                cli,
                || {
                    format!(
                        "{} paths covering {} vertices, {} colours",
                        value["paths"], value["v_F"], value["distinct_colours"]
                    )
                },
                value.clone(),
            );
            Ok(Ok(()))
        }
        Command::Absorber(a) => absorber(cli, a),
        Command::Solve(a) => solve(cli, a),
        Command::Adversary(a) => adversary(cli, a),
        Command::Oracle(o) => oracle(o),
        Command::Suite(s) => suite(cli, s),
    }
}

fn gen(cli: &Cli, a: &GenArgs) -> Outcome {
    let colouring = match a.mode {
        Mode::Rainbow => ColouringMode::Rainbow,
        Mode::RoundRobin => ColouringMode::RoundRobin { k: a.k },
        Mode::Vizing => ColouringMode::VizingLike,
        Mode::Matchings => {
            let (Some(k), Some(ell)) = (a.k, a.ell) else {
                bail!("matchings mode needs --k and --ell");
            };
            ColouringMode::Matchings { k, ell }
        }
    };
    let mut spec = InstanceSpec::new(a.n, a.epsilon, colouring, cli.seed);
    if let ColouringMode::Matchings { .. } = colouring {
        spec.epsilon = None;
    }
    spec.target_bound = a.bound;
    spec.host_density = a.density;
    let g = generate_instance(&spec)?;
    match &a.output {
        Some(p) => {
            write_graph(p, &g)?;
            let r = dirac_rainbow::validate(&g);
            summary(
                cli,
                || {
                    format!(
                        "{} vertices, {} edges, min degree {}, largest class {}",
                        g.n(),
                        g.edge_count(),
                        r.min_degree,
                        r.max_colour_multiplicity
                    )
                },
                json!({"n": g.n(), "edges": g.edge_count(), "min_degree": r.min_degree, "max_class": r.max_colour_multiplicity}),
            );
        }
        None => print!("{}", to_json_string(&g)),
    }
    Ok(Ok(()))
}

fn absorber(cli: &Cli, a: &AbsorberArgs) -> Outcome {
    let g = load(&a.input)?;
    let eps = a
        .epsilon
        .unwrap_or_else(|| g.min_degree() as f64 / g.n().max(1) as f64 - 0.5);
    let mut params = NeighbourhoodParams::new(eps, a.c.unwrap_or(eps / 2048.0), a.m);
    params.big_c = a.big_c;
    params.rainbow = a.rainbow;
    let matching = neighbourhood_matching(&g, &params, cli.seed)?;
    let cert = build_absorber(&g, &matching.edges, a.rainbow)?;
    let absorbed = if a.absorb.is_empty() {
        None
    } else {
        Some(absorb(&cert, &a.absorb, &g)?)
    };
    let doc = json!({
        "path": cert.path,
        "core_edge_indices": cert.core_edge_indices(&g),
        "capacity": cert.capacity,
        "certificate": cert,
        "absorbed_path": absorbed,
    });
    match &a.output {
        Some(p) => {
            write_json(p, &doc)?;
            summary(
                cli,
                || {
                    format!(
                        "absorber on {} vertices, {} core edges, capacity {}",
                        cert.vertex_count,
                        cert.t(),
                        cert.capacity
                    )
                },
                json!({"vertices": cert.vertex_count, "t": cert.t(), "capacity": cert.capacity}),
            );
        }
        None => println!("{doc}"),
    }
    Ok(Ok(()))
}

fn solve(cli: &Cli, a: &SolveArgs) -> Outcome {
    let g = load(&a.input)?;
    let mut params = PipelineParams::new(a.epsilon).with_seed(cli.seed);
    params.beta = a.beta;
    params.attempts = a.attempts;
    if a.theorem_budgets {
        params.desk = None;
    }
    let out = if a.proper {
        proper_colouring_hamilton(&g, &params)
    } else {
        near_rainbow_hamilton(&g, &params)
    };
    let res = match out {
        Ok(r) => r,
        Err(e) if e.is_input() => return Err(e.into()),
        Err(e) => {
            report_failure(cli, &e);
            return Ok(Err(Failure));
        }
    };
    let mut lines = String::with_capacity(res.cycle.len() * 6);
    for v in &res.cycle {
        lines.push_str(&v.to_string());
        lines.push('\n');
    }
    match &a.output {
        Some(p) => fs::write(p, &lines).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(lines.as_bytes())?,
    }
    match &a.stage_log {
        Some(p) => write_json(p, &res.stage_log)?,
        None if !cli.quiet => eprintln!("{}", serde_json::to_string(&res.stage_log)?),
        None => {}
    }
    if a.output.is_some() {
        summary(
            cli,
            || {
                format!(
                    "Hamilton cycle on {} vertices with {} distinct colours",
                    res.cycle.len(),
                    res.distinct_colours
                )
            },
            json!({"n": res.cycle.len(), "distinct_colours": res.distinct_colours}),
        );
    }
    Ok(Ok(()))
}

fn report_failure(cli: &Cli, e: &PipelineError) {
    if !cli.quiet {
        eprintln!("pipeline failed: {e}");
    }
}

fn adversary(cli: &Cli, a: &AdversaryCommand) -> Outcome {
    match a {
        AdversaryCommand::Gen {
            n,
            m,
            s,
            t,
            q,
            ell,
            retries,
            graph,
            cert,
        } => {
            let mut params = match q {
                Some(q) => CounterexampleParams::scaled(*n, *m, *s, *t, *q)?,
                None => CounterexampleParams::new(*n, *m, *s, *t)?,
            };
            if let Some(ell) = ell {
                params.ell = *ell;
            }
            let (g, c) = build_counterexample(&params, cli.seed, *retries)?;
            write_graph(graph, &g)?;
            write_json(cert, &c)?;
            summary(
                cli,
                || {
                    format!(
                        "core {} + apex {}, {} core colours, derived bound {}",
                        c.core_vertices.len(),
                        c.apex_vertices.len(),
                        c.core_colour_count,
                        c.derived_bound
                    )
                },
                json!({"core": c.core_vertices.len(), "apex": c.apex_vertices.len(), "core_colours": c.core_colour_count, "derived_bound": c.derived_bound}),
            );
            Ok(Ok(()))
        }
        AdversaryCommand::Verify { graph, cert } => {
            let g = load(graph)?;
            let c: CounterexampleCertificate =
                read_json(cert).with_context(|| format!("reading {}", cert.display()))?;
            let r = verify_counterexample(&g, &c);
            summary(
                cli,
                || {
                    let mark = |b: bool| if b { "ok" } else { "FAILED" };
                    let mut s = format!(
                        "(a) apex structure {}\n(b) colours {}\n(c) proper and bounded {}\n(d) minimum degree {}\nderived bound {} (n - t = {})",
                        mark(r.apex_structure),
                        mark(r.colours),
                        mark(r.proper_bounded),
                        mark(r.min_degree),
                        r.derived_bound,
                        r.n_minus_t
                    );
                    for f in &r.findings {
                        s.push_str("\n  ");
                        s.push_str(f);
                    }
                    s
                },
                serde_json::to_value(&r)?,
            );
            Ok(if r.passed { Ok(()) } else { Err(Failure) })
        }
    }
}

fn oracle(o: &OracleCommand) -> Outcome {
    let budget = OracleBudget::from_env();
    let doc = match o {
        OracleCommand::Hamilton { input } => {
            let g = load(input)?;
            match max_colour_hamilton_bruteforce(&g, &budget)? {
                Some(h) => json!({"best": h.best, "witness": h.witness}),
                None => json!({"best": null, "witness": null}),
            }
        }
        OracleCommand::Matching { input } => {
            let g = load(input)?;
            let m = max_rainbow_matching_exact(&g, &budget)?;
            let witness: Vec<[u64; 3]> = m
                .iter()
                .map(|&i| {
                    let e = g.edge(i);
                    [e.u as u64, e.v as u64, e.colour.0 as u64]
                })
                .collect();
            json!({"best": m.len(), "witness": witness})
        }
    };
    println!("{doc}");
    Ok(Ok(()))
}

fn suite(cli: &Cli, s: &SuiteCommand) -> Outcome {
    let config = match s {
        SuiteCommand::Pipeline {
            n,
            trials,
            epsilon,
            proper,
            output,
        } => {
            let mut p = if *proper {
                PipelineSuite::proper(*n, *trials)
            } else {
                PipelineSuite::round_robin(*n, *trials)
            };
            p.epsilon = *epsilon;
            SuiteConfig {
                root_seed: cli.seed,
                output: output.clone(),
                kind: SuiteKind::Pipeline(p),
            }
        }
        SuiteCommand::Adversary { output } => SuiteConfig {
            root_seed: cli.seed,
            output: output.clone(),
            kind: SuiteKind::Adversary(AdversarySuite::default()),
        },
        SuiteCommand::Oracle {
            target,
            corpus,
            generated,
            output,
        } => SuiteConfig {
            root_seed: cli.seed,
            output: output.clone(),
            kind: SuiteKind::OracleEquivalence(OracleSuite {
                target: match target {
                    Target::Matching => OracleTarget::Matching,
                    Target::Hamilton => OracleTarget::Hamilton,
                },
                corpus: corpus.clone(),
                generated: *generated,
                min_equality_rate: 0.8,
            }),
        },
        SuiteCommand::Config { path } => {
            read_json(path).with_context(|| format!("reading {}", path.display()))?
        }
    };
    let report = run_suite(&config)?;
    if !cli.quiet {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    summary(
        cli,
        || {
            let a = &report.aggregates;
            let mut s = format!("{} trials, {} successes", a.trials, a.successes);
            if let Some(q) = &a.distinct_colours {
                s.push_str(&format!(
                    ", colours min {} median {} max {}",
                    q.min, q.p50, q.max
                ));
            }
            for c in &report.checks {
                s.push_str(&format!(
                    "\n{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            s
        },
        json!({"aggregates": report.aggregates, "checks": report.checks, "passed": report.passed}),
    );
    Ok(if report.passed { Ok(()) } else { Err(Failure) })
}
