//! Hamilton cycles with nearly all colours distinct in properly edge-coloured
//! graphs of minimum degree above `n/2`, the adversarial colourings that
//! limit them, and exact oracles for small instances.
//!
//! The pipeline ([`near_rainbow_hamilton`]) builds an absorbing path, a
//! reservoir of well-connected vertices and a rainbow path forest, joins the
//! pieces through the reservoir and absorbs what is left.

pub mod absorber;
pub mod adversary;
pub mod assembler;
pub mod flow;
pub mod forest;
pub mod graph;
pub mod instance;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod regular;
pub mod reservoir;
pub mod rng;
pub mod suite;

pub use absorber::{
    absorb, build_absorber, neighbourhood_matching, AbsorberCertificate, AbsorberError,
    NeighbourhoodParams,
};
pub use adversary::{
    build_counterexample, random_matchings_graph, verify_counterexample, AdversaryError,
    CounterexampleCertificate, CounterexampleParams, VerifyReport,
};
pub use assembler::{
    near_rainbow_hamilton, proper_colouring_hamilton, HamiltonResult, InputError, PipelineError,
    PipelineParams, StageLog,
};
pub use forest::{rainbow_forest, ForestConfig, ForestReport};
pub use graph::{
    validate, Colour, ColouredGraph, ColouringReport, Edge, GraphError, PathForest, Vertex,
};
pub use instance::{generate_instance, ColouringMode, InstanceError, InstanceSpec};
pub use io::{read_graph, write_graph, FormatError};
pub use oracle::{
    is_hamilton_cycle, max_colour_hamilton_bruteforce, max_rainbow_matching_exact, HamiltonOptimum,
    OracleBudget, OracleError,
};
pub use regular::{regular_spanning_subgraph, RegularSubgraphResult, RegularizeError};
pub use reservoir::{build_reservoir, ReservoirSet};
pub use suite::{run_suite, RunReport, SuiteConfig, SuiteKind};
