//! Runs every chain check and collects the results into one report.

use std::borrow::Cow;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::chain::{
    group_transition_matrix, pollen_transition_matrix, MoveDirection, DEFAULT_STATE_CAP,
};
use super::checks::{
    check_closed, check_no_disjoint_closed_set, limiting_distribution, uniform_distribution,
};
use super::lattice::LatticeProblem;
use super::matrix::{TransitionMatrix, ROW_SUM_TOLERANCE};
use super::simulate::{
    check_homogeneity, monte_carlo_mass_on_optimal, ChainModel, SimplifiedLatticeChain,
};
use crate::error::{invalid, Result};
use crate::fpa::{run, FpaParams, Variant, SPEC_VERSION};
use crate::objectives::{Benchmark, ProblemSpec};
use crate::rng::{DrawSource, RngState};

/// Required mass on the optimal set at the last propagated step.
pub const CONVERGENCE_MASS: f64 = 1.0 - 1e-6;

/// A hand-written chain given as a dense matrix with its optimal set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFixture {
    pub name: String,
    pub matrix: Vec<Vec<f64>>,
    pub optimal: Vec<bool>,
}

#[derive(Debug, Clone)]
pub enum ChainSource {
    Lattice {
        lattice: LatticeProblem,
        n: usize,
        p: f64,
        direction: MoveDirection,
    },
    Fixture(MatrixFixture),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub steps: usize,
    pub sample_times: Vec<usize>,
    pub homogeneity_samples: usize,
    pub trajectories: usize,
    pub elitism_runs: usize,
    pub elitism_iterations: usize,
    pub seed: u64,
    pub state_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            steps: 1000,
            sample_times: vec![1, 50],
            homogeneity_samples: 10_000,
            trajectories: 100_000,
            elitism_runs: 20,
            elitism_iterations: 200,
            seed: 1,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub spec_version: &'static str,
    pub chain: Value,
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
    pub failed_checks: Vec<&'static str>,
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub report: VerifyReport,
    /// Mass on the optimal set after `0..=steps` steps from the uniform start.
    pub mass_curve: Vec<f64>,
}

/// A chain given only by its matrix; steps are drawn row by row.
struct MatrixChain(TransitionMatrix);

impl ChainModel for MatrixChain {
    fn states(&self) -> usize {
        self.0.len()
    }

    fn kernel_at(&self, _t: usize) -> Cow<'_, TransitionMatrix> {
        Cow::Borrowed(&self.0)
    }

    fn sample_step(&self, state: usize, _t: usize, rng: &mut RngState) -> usize {
        let (cols, vals) = self.0.row(state);
        let u = rng.uniform();
        let mut acc = 0.0;
        for (c, v) in cols.iter().zip(vals) {
            acc += v;
            if u < acc {
                return *c;
            }
        }
        *cols
            .last()
            .expect("rows of a stochastic matrix are non-empty")
    }
}

enum Model {
    Lattice(Box<SimplifiedLatticeChain>),
    Matrix(MatrixChain),
}

impl Model {
    fn as_chain(&self) -> &dyn ChainModelDyn {
        match self {
            Model::Lattice(c) => c.as_ref(),
            Model::Matrix(c) => c,
        }
    }
}

/// Object-safe view used to dispatch over the two chain kinds.
trait ChainModelDyn {
    fn homogeneity(
        &self,
        times: &[usize],
        samples: usize,
        seed: u64,
    ) -> Result<super::simulate::HomogeneityReport>;
    fn monte_carlo(&self, init: &[f64], steps: usize, n: usize, seed: u64) -> Result<Vec<f64>>;
}

impl<M: ChainModel> ChainModelDyn for M {
    fn homogeneity(
        &self,
        times: &[usize],
        samples: usize,
        seed: u64,
    ) -> Result<super::simulate::HomogeneityReport> {
        check_homogeneity(self, times, samples, seed)
    }

    fn monte_carlo(&self, init: &[f64], steps: usize, n: usize, seed: u64) -> Result<Vec<f64>> {
        monte_carlo_mass_on_optimal(self, init, steps, n, seed)
    }
}

fn check(name: &'static str, passed: bool, measured: Value) -> CheckResult {
    CheckResult {
        name,
        passed,
        measured,
    }
}

/// Builds the chain described by `source` and runs every check on it.
pub fn verify(source: &ChainSource, options: &VerifyOptions) -> Result<VerifyOutcome> {
    if options.steps == 0 {
        return Err(invalid("steps", "must be at least 1"));
    }
    let (chain_info, pollen, model) = match source {
        ChainSource::Lattice {
            lattice,
            n,
            p,
            direction,
        } => {
            let chain =
                SimplifiedLatticeChain::new(lattice, *n, *p, *direction, options.state_cap)?;
            let pollen = chain.pollen().matrix.clone();
            let info = json!({
                "kind": "lattice",
                "name": lattice.name(),
                "grid_points": lattice.len(),
                "optimum_index": lattice.optimum(),
                "optimum_value": lattice.optimum_value(),
                "n": n,
                "switch_probability": p,
                "direction": direction,
                "branch_probabilities": { "keep": 1.0 - p, "perturb": p },
                "pollen_states": pollen.len(),
                "group_states": chain.states(),
                "optimal_group_states": chain.matrix().optimal_count(),
            });
            (info, pollen, Model::Lattice(Box::new(chain)))
        }
        ChainSource::Fixture(fixture) => {
            let matrix = TransitionMatrix::from_dense(&fixture.matrix, fixture.optimal.clone())?;
            let info = json!({
                "kind": "fixture",
                "name": fixture.name,
                "group_states": matrix.len(),
                "optimal_group_states": matrix.optimal_count(),
            });
            (info, matrix.clone(), Model::Matrix(MatrixChain(matrix)))
        }
    };
    let group = match &model {
        Model::Lattice(c) => c.matrix(),
        Model::Matrix(c) => &c.0,
    };

    let mut checks = Vec::new();

    let row_error = group.max_row_error().max(pollen.max_row_error());
    checks.push(check(
        "row_stochastic",
        row_error <= ROW_SUM_TOLERANCE,
        json!({ "max_row_error": row_error, "tolerance": ROW_SUM_TOLERANCE }),
    ));

    let homogeneity = model.as_chain().homogeneity(
        &options.sample_times,
        options.homogeneity_samples,
        options.seed,
    )?;
    checks.push(check(
        "homogeneous",
        homogeneity.holds,
        serde_json::to_value(&homogeneity).expect("serializable"),
    ));

    let pollen_closed = check_closed(&pollen, pollen.optimal());
    checks.push(check(
        "pollen_optimal_set_closed",
        pollen_closed.is_closed,
        serde_json::to_value(&pollen_closed).expect("serializable"),
    ));

    let group_closed = check_closed(group, group.optimal());
    checks.push(check(
        "group_optimal_set_closed",
        group_closed.is_closed,
        serde_json::to_value(&group_closed).expect("serializable"),
    ));

    let reach = check_no_disjoint_closed_set(group);
    checks.push(check(
        "optimal_set_reachable",
        reach.holds,
        serde_json::to_value(&reach).expect("serializable"),
    ));

    let init = uniform_distribution(group.len());
    let limit = limiting_distribution(group, &init, options.steps)?;
    let final_mass = limit.final_mass();
    let monotone = limit.is_monotone(1e-12);
    let mc = if options.trajectories > 0 {
        Some(model.as_chain().monte_carlo(
            &init,
            options.steps,
            options.trajectories,
            options.seed,
        )?)
    } else {
        None
    };
    let mc_agrees = mc.as_ref().map(|curve| {
        let m = *curve.last().expect("non-empty curve");
        let se = (final_mass * (1.0 - final_mass) / options.trajectories as f64).sqrt();
        (m - final_mass).abs() <= 3.0 * se
    });
    let converges = final_mass >= CONVERGENCE_MASS && monotone && mc_agrees.unwrap_or(true);
    checks.push(check(
        "converges_to_optimal_set",
        converges,
        json!({
            "steps": options.steps,
            "final_mass": final_mass,
            "required_mass": CONVERGENCE_MASS,
            "monotone": monotone,
            "monte_carlo_final_mass": mc.as_ref().map(|c| *c.last().expect("non-empty curve")),
            "monte_carlo_agrees": mc_agrees,
            "mass_on_optimal": limit.mass_on_optimal,
        }),
    ));

    let elitism_violations = simplified_elitism_violations(options)?;
    checks.push(check(
        "elitist_global_convergence",
        elitism_violations == 0 && converges,
        json!({
            "runs": options.elitism_runs,
            "iterations": options.elitism_iterations,
            "elitism_violations": elitism_violations,
            "chain_converges": converges,
        }),
    ));

    let failed_checks: Vec<&'static str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    Ok(VerifyOutcome {
        report: VerifyReport {
            spec_version: SPEC_VERSION,
            chain: chain_info,
            options: options.clone(),
            passed: failed_checks.is_empty(),
            failed_checks,
            checks,
        },
        mass_curve: limit.mass_on_optimal,
    })
}

/// Counts iterations where the best-so-far of a simplified run increased,
/// over every benchmark in two dimensions.
fn simplified_elitism_violations(options: &VerifyOptions) -> Result<usize> {
    let mut violations = 0;
    for b in Benchmark::ALL {
        let spec = ProblemSpec::builtin(b, 2)?;
        for k in 0..options.elitism_runs as u64 {
            let params = FpaParams {
                variant: Variant::Simplified,
                max_iterations: options.elitism_iterations,
                seed: options.seed.wrapping_add(k),
                ..FpaParams::default()
            };
            let result = run(&spec, &params)?;
            violations += result
                .trace
                .windows(2)
                .filter(|w| w[1].best_fitness > w[0].best_fitness)
                .count();
        }
    }
    Ok(violations)
}

/// Writes the mass curve as `step,mass_on_optimal` CSV.
pub fn write_mass_curve_csv<W: std::io::Write>(curve: &[f64], mut out: W) -> std::io::Result<()> {
    writeln!(out, "step,mass_on_optimal")?;
    for (t, m) in curve.iter().enumerate() {
        writeln!(out, "{t},{m:e}")?;
    }
    Ok(())
}

/// Group matrix for `lattice`, exposed for callers that only need the kernel.
pub fn lattice_group_matrix(
    lattice: &LatticeProblem,
    n: usize,
    p: f64,
    direction: MoveDirection,
    cap: usize,
) -> Result<TransitionMatrix> {
    let pollen = pollen_transition_matrix(lattice, p, direction)?;
    group_transition_matrix(&pollen.matrix, n, cap)
}
