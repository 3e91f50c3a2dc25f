//! Fixtures shared by the benchmarks.

use dirac_rainbow::{generate_instance, ColouredGraph, ColouringMode, InstanceSpec};

/// A round-robin `n/8`-bounded host with minimum degree `0.6 n`.
pub fn round_robin_host(n: usize, seed: u64) -> ColouredGraph {
    generate_instance(&InstanceSpec::new(
        n,
        0.1,
        ColouringMode::RoundRobin { k: None },
        seed,
    ))
    .expect("feasible instance")
}

/// A Misra-Gries coloured host with minimum degree `0.6 n`.
pub fn vizing_host(n: usize, seed: u64) -> ColouredGraph {
    generate_instance(&InstanceSpec::new(n, 0.1, ColouringMode::VizingLike, seed))
        .expect("feasible instance")
}
