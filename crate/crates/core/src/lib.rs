//! Flower pollination algorithm with a discrete Markov-chain convergence verifier.
//!
//! - [`rng`]: seedable draw source and Mantegna Lévy steps.
//! - [`objectives`]: the benchmark functions and box-bounded problems.
//! - [`fpa`]: the optimizer (full and simplified variants).
//! - [`markov`]: exact transition matrices of the simplified variant on
//!   small lattices, and numerical checks of their convergence properties.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fpa;
pub mod markov;
pub mod objectives;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use fpa::{FpaParams, RunResult, SwarmState, TraceRecord, Variant};
pub use objectives::{Benchmark, ProblemSpec};
pub use rng::{DrawSource, LevyParams, RngState};
