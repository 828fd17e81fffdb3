use std::time::Duration;

use serde::Serialize;

use super::params::FpaParams;
use crate::objectives::ProblemSpec;

/// One candidate solution and the best point it has visited.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PollenState {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub personal_best: Vec<f64>,
    pub personal_best_fitness: f64,
}

impl PollenState {
    pub fn new(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            personal_best: position.clone(),
            personal_best_fitness: fitness,
            position,
            fitness,
        }
    }
}

/// Population plus the historical global best.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwarmState {
    pub pollens: Vec<PollenState>,
    pub global_best: Vec<f64>,
    pub global_best_fitness: f64,
    pub iteration: usize,
    pub evaluations: u64,
}

impl SwarmState {
    pub fn trace_record(&self) -> TraceRecord {
        TraceRecord {
            iteration: self.iteration,
            best_fitness: self.global_best_fitness,
            evaluations: self.evaluations,
        }
    }

    /// Checks the per-pollen, global-best and bounds invariants, returning a
    /// description of the first violation.
    pub fn check_invariants(&self, spec: &ProblemSpec) -> std::result::Result<(), String> {
        for (i, p) in self.pollens.iter().enumerate() {
            if p.personal_best_fitness > p.fitness {
                return Err(format!(
                    "pollen {i}: personal best {} worse than position {}",
                    p.personal_best_fitness, p.fitness
                ));
            }
            if !spec.contains(&p.position) {
                return Err(format!(
                    "pollen {i}: position {:?} outside the box",
                    p.position
                ));
            }
        }
        let min = self
            .pollens
            .iter()
            .map(|p| p.personal_best_fitness)
            .fold(f64::INFINITY, f64::min);
        if min != self.global_best_fitness {
            return Err(format!(
                "global best {} differs from min personal best {min}",
                self.global_best_fitness
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub best_fitness: f64,
    pub evaluations: u64,
}

/// Outcome of a complete run: one trace record per iteration (including
/// iteration 0) and the final swarm.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub problem: String,
    pub seed: u64,
    pub params: FpaParams,
    pub trace: Vec<TraceRecord>,
    pub final_state: SwarmState,
    pub wall_time: Duration,
}

impl RunResult {
    pub fn best_fitness(&self) -> f64 {
        self.final_state.global_best_fitness
    }

    pub fn initial_best_fitness(&self) -> f64 {
        self.trace[0].best_fitness
    }
}
