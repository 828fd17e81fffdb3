//! Workloads shared by the benchmarks.

use fpa::markov::{builtin_lattice, LatticeProblem};
use fpa::objectives::{Benchmark, ProblemSpec};
use fpa::FpaParams;

/// A four-dimensional benchmark problem.
pub fn problem(b: Benchmark) -> ProblemSpec {
    ProblemSpec::builtin(b, 4).expect("valid builtin")
}

/// Default parameters with a shorter horizon.
pub fn params(iterations: usize) -> FpaParams {
    FpaParams {
        max_iterations: iterations,
        ..FpaParams::default()
    }
}

pub fn lattice(name: &str) -> LatticeProblem {
    builtin_lattice(name).expect("builtin lattice")
}
