//! Structural checks on transition matrices: closedness, reachability of the
//! optimal set, and long-run mass on it.

use std::collections::VecDeque;

use serde::Serialize;

use super::matrix::TransitionMatrix;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedReport {
    pub is_closed: bool,
    /// Sum over members `i` and non-members `j` of `P[i][j]`.
    pub total_outflow: f64,
    /// Number of stored positive entries leaving the set.
    pub leaking_entries: usize,
}

/// Whether no probability leaves `set`. Closedness is decided on the stored
/// support, so any positive exit probability counts, however small.
pub fn check_closed(matrix: &TransitionMatrix, set: &[bool]) -> ClosedReport {
    let mut total_outflow = 0.0;
    let mut leaking_entries = 0;
    for i in (0..matrix.len()).filter(|&i| set[i]) {
        let (cols, vals) = matrix.row(i);
        for (c, v) in cols.iter().zip(vals) {
            if !set[*c] {
                total_outflow += v;
                leaking_entries += 1;
            }
        }
    }
    ClosedReport {
        is_closed: leaking_entries == 0,
        total_outflow,
        leaking_entries,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachabilityReport {
    pub holds: bool,
    pub states_outside: usize,
    pub unreachable: usize,
    /// A closed set of states disjoint from the optimal set, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offending_set: Option<Vec<usize>>,
}

/// Whether every state outside the optimal set has a positive-probability
/// path into it.
pub fn check_no_disjoint_closed_set(matrix: &TransitionMatrix) -> ReachabilityReport {
    let n = matrix.len();
    let optimal = matrix.optimal();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for &j in matrix.row(i).0 {
            reverse[j].push(i);
        }
    }
    let mut reaches = optimal.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| optimal[i]).collect();
    while let Some(j) = queue.pop_front() {
        for &i in &reverse[j] {
            if !reaches[i] {
                reaches[i] = true;
                queue.push_back(i);
            }
        }
    }
    let unreachable: Vec<usize> = (0..n).filter(|&i| !reaches[i]).collect();
    // The forward closure of a state that cannot reach the optimal set is
    // itself closed and never meets it.
    let offending_set = unreachable.first().map(|&start| {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for &j in matrix.row(i).0 {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        (0..n).filter(|&i| seen[i]).collect()
    });
    ReachabilityReport {
        holds: unreachable.is_empty(),
        states_outside: optimal.iter().filter(|o| !**o).count(),
        unreachable: unreachable.len(),
        offending_set,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitingReport {
    pub distribution: Vec<f64>,
    /// Mass on the optimal set after `0..=steps` steps.
    pub mass_on_optimal: Vec<f64>,
}

impl LimitingReport {
    pub fn final_mass(&self) -> f64 {
        *self
            .mass_on_optimal
            .last()
            .expect("step 0 is always recorded")
    }

    /// Whether the mass curve never decreases by more than `tolerance`.
    pub fn is_monotone(&self, tolerance: f64) -> bool {
        self.mass_on_optimal
            .windows(2)
            .all(|w| w[1] >= w[0] - tolerance)
    }
}

/// `initial × P^steps` by repeated multiplication.
pub fn limiting_distribution(
    matrix: &TransitionMatrix,
    initial: &[f64],
    steps: usize,
) -> Result<LimitingReport> {
    if initial.len() != matrix.len() {
        return Err(crate::Error::DimensionMismatch {
            expected: matrix.len(),
            got: initial.len(),
        });
    }
    if initial.iter().any(|m| !(*m >= 0.0)) {
        return Err(invalid("initial", "masses must be non-negative"));
    }
    let total: f64 = initial.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid("initial", format!("masses sum to {total}, not 1")));
    }
    let mut dist = initial.to_vec();
    let mut mass = Vec::with_capacity(steps + 1);
    mass.push(matrix.mass_on_optimal(&dist));
    for _ in 0..steps {
        dist = matrix.propagate(&dist);
        mass.push(matrix.mass_on_optimal(&dist));
    }
    Ok(LimitingReport {
        distribution: dist,
        mass_on_optimal: mass,
    })
}

pub fn uniform_distribution(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}
