//! CSV trace and JSON summary serialization of a [`RunResult`].

use std::io::{self, Write};

use serde::Serialize;

use super::params::FpaParams;
use super::state::{RunResult, TraceRecord};

/// Version tag written into every JSON document.
pub const SPEC_VERSION: &str = "1.0";

pub const TRACE_HEADER: &str = "iteration,best_fitness,evaluations";

/// Writes the trace as CSV. Floats use the shortest round-trip scientific form.
pub fn write_trace_csv<W: Write>(trace: &[TraceRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for rec in trace {
        writeln!(
            out,
            "{},{:e},{}",
            rec.iteration, rec.best_fitness, rec.evaluations
        )?;
    }
    Ok(())
}

/// Parses a trace written by [`write_trace_csv`].
pub fn read_trace_csv(text: &str) -> Result<Vec<TraceRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            let bad = || format!("line {}: malformed record `{line}`", i + 2);
            if fields.len() != 3 {
                return Err(bad());
            }
            Ok(TraceRecord {
                iteration: fields[0].parse().map_err(|_| bad())?,
                best_fitness: fields[1].parse().map_err(|_| bad())?,
                evaluations: fields[2].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// JSON summary of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub spec_version: &'static str,
    pub problem: String,
    pub dimension: usize,
    pub seed: u64,
    pub params: FpaParams,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub initial_best_fitness: f64,
    pub iterations: usize,
    pub evaluations: u64,
    /// Only present when timing output is requested; it would otherwise
    /// break byte-for-byte reproducibility of the summary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl RunSummary {
    pub fn from_result(result: &RunResult, include_timing: bool) -> Self {
        let s = &result.final_state;
        Self {
            spec_version: SPEC_VERSION,
            problem: result.problem.clone(),
            dimension: s.global_best.len(),
            seed: result.seed,
            params: result.params,
            best_position: s.global_best.clone(),
            best_fitness: s.global_best_fitness,
            initial_best_fitness: result.initial_best_fitness(),
            iterations: s.iteration,
            evaluations: s.evaluations,
            wall_time_seconds: include_timing.then_some(result.wall_time.as_secs_f64()),
        }
    }
}
