//! Flower pollination engine: full and simplified variants, convergence
//! traces and multi-run hit-probability estimation.

mod engine;
mod output;
mod params;
mod state;

pub use engine::{
    global_pollination_step, hit_estimate, hit_probability, init_population, iterate,
    iterate_simplified, local_pollination_step, run, run_with, HitEstimate,
};
pub use output::{read_trace_csv, write_trace_csv, RunSummary, SPEC_VERSION, TRACE_HEADER};
pub use params::{BranchRule, FpaParams, LevyMode, Variant};
pub use state::{PollenState, RunResult, SwarmState, TraceRecord};
