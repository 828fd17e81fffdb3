//! Population initialization, pollination moves and the two iteration rules.
//!
//! Draw order for one pollen in a full-variant iteration: the branch draw
//! `r`, then either the Lévy steps of the global move (`d` steps, or one in
//! [`LevyMode::Shared`]) or the partner indices `j`, `k` and the scalar `U`
//! of the local move. The simplified variant draws `r` and, when moving, the
//! Lévy steps. Pollens are processed in index order and the global best is
//! updated as soon as a pollen improves on it.

use std::time::Instant;

use rayon::prelude::*;

use super::params::{FpaParams, LevyMode, Variant};
use super::state::{PollenState, RunResult, SwarmState};
use crate::error::{Error, Result};
use crate::objectives::ProblemSpec;
use crate::rng::{DrawSource, RngState};

fn evaluate(spec: &ProblemSpec, x: &[f64]) -> Result<f64> {
    let f = spec.evaluate_unchecked(x);
    if f.is_nan() {
        return Err(Error::Domain(format!(
            "objective `{}` returned NaN",
            spec.name()
        )));
    }
    Ok(f)
}

fn check_len(spec: &ProblemSpec, x: &[f64]) -> Result<()> {
    if x.len() != spec.dimension() {
        return Err(Error::DimensionMismatch {
            expected: spec.dimension(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `n` positions drawn uniformly in the box, evaluated, with the best as `g*`.
pub fn init_population<D: DrawSource>(
    spec: &ProblemSpec,
    params: &FpaParams,
    draws: &mut D,
) -> Result<SwarmState> {
    params.validate()?;
    let mut pollens = Vec::with_capacity(params.population_size);
    for _ in 0..params.population_size {
        let position: Vec<f64> = spec
            .lower()
            .iter()
            .zip(spec.upper())
            .map(|(lo, hi)| lo + draws.uniform() * (hi - lo))
            .collect();
        let fitness = evaluate(spec, &position)?;
        pollens.push(PollenState::new(position, fitness));
    }
    let best = pollens
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.fitness.total_cmp(&b.1.fitness))
        .map(|(i, _)| i)
        .expect("population is non-empty");
    Ok(SwarmState {
        global_best: pollens[best].position.clone(),
        global_best_fitness: pollens[best].fitness,
        evaluations: pollens.len() as u64,
        pollens,
        iteration: 0,
    })
}

/// Global move `x + γ L ⊙ (g* - x)`, projected onto the box.
pub fn global_pollination_step<D: DrawSource>(
    spec: &ProblemSpec,
    x: &[f64],
    g_star: &[f64],
    params: &FpaParams,
    draws: &mut D,
) -> Result<Vec<f64>> {
    check_len(spec, x)?;
    check_len(spec, g_star)?;
    let d = x.len();
    let steps = match params.levy_mode {
        LevyMode::PerCoordinate => draws.levy_vector(&params.levy, d)?,
        LevyMode::Shared => vec![draws.levy_step(&params.levy); d],
    };
    let mut out: Vec<f64> = x
        .iter()
        .zip(g_star)
        .zip(&steps)
        .map(|((xi, gi), li)| xi + params.gamma * li * (gi - xi))
        .collect();
    spec.clamp_in_place(&mut out)?;
    Ok(out)
}

/// Local move `x + U (x_j - x_k)` with scalar `U ~ U[0, 1)`, projected onto the box.
pub fn local_pollination_step<D: DrawSource>(
    spec: &ProblemSpec,
    x: &[f64],
    x_j: &[f64],
    x_k: &[f64],
    draws: &mut D,
) -> Result<Vec<f64>> {
    check_len(spec, x)?;
    check_len(spec, x_j)?;
    check_len(spec, x_k)?;
    let u = draws.uniform();
    let mut out: Vec<f64> = x
        .iter()
        .zip(x_j.iter().zip(x_k))
        .map(|(xi, (a, b))| xi + u * (a - b))
        .collect();
    spec.clamp_in_place(&mut out)?;
    Ok(out)
}

/// Two distinct indices drawn uniformly from `0..n` (`n >= 2`).
fn distinct_pair<D: DrawSource>(n: usize, draws: &mut D) -> (usize, usize) {
    let j = draws.index(n);
    let mut k = draws.index(n - 1);
    if k >= j {
        k += 1;
    }
    (j, k)
}

/// Greedy retention of `candidate` for pollen `i` plus best-tracking.
fn accept(
    state: &mut SwarmState,
    i: usize,
    candidate: Vec<f64>,
    fitness: f64,
    accept_on_equal: bool,
) {
    let pollen = &mut state.pollens[i];
    let improves_best = fitness <= pollen.personal_best_fitness;
    let replaces = if accept_on_equal {
        fitness <= pollen.fitness
    } else {
        fitness < pollen.fitness
    };
    if improves_best {
        pollen.personal_best = candidate.clone();
        pollen.personal_best_fitness = fitness;
    }
    if replaces {
        pollen.position = candidate;
        pollen.fitness = fitness;
    }
    if pollen.personal_best_fitness < state.global_best_fitness {
        state.global_best = pollen.personal_best.clone();
        state.global_best_fitness = pollen.personal_best_fitness;
    }
}

/// One iteration of the full variant.
pub fn iterate<D: DrawSource>(
    state: &mut SwarmState,
    spec: &ProblemSpec,
    params: &FpaParams,
    draws: &mut D,
) -> Result<()> {
    let n = state.pollens.len();
    for i in 0..n {
        let r = draws.uniform();
        let x = &state.pollens[i].position;
        let candidate = if params
            .branch_rule
            .takes_global(r, params.switch_probability)
        {
            global_pollination_step(spec, x, &state.global_best, params, draws)?
        } else if n >= 2 {
            let (j, k) = distinct_pair(n, draws);
            local_pollination_step(
                spec,
                x,
                &state.pollens[j].position,
                &state.pollens[k].position,
                draws,
            )?
        } else {
            x.clone()
        };
        let fitness = evaluate(spec, &candidate)?;
        state.evaluations += 1;
        accept(state, i, candidate, fitness, params.accept_on_equal);
    }
    state.iteration += 1;
    Ok(())
}

/// One iteration of the simplified (global-branch only) variant.
pub fn iterate_simplified<D: DrawSource>(
    state: &mut SwarmState,
    spec: &ProblemSpec,
    params: &FpaParams,
    draws: &mut D,
) -> Result<()> {
    for i in 0..state.pollens.len() {
        let r = draws.uniform();
        if !params
            .branch_rule
            .takes_global(r, params.switch_probability)
        {
            continue;
        }
        let candidate = global_pollination_step(
            spec,
            &state.pollens[i].position,
            &state.global_best,
            params,
            draws,
        )?;
        let fitness = evaluate(spec, &candidate)?;
        state.evaluations += 1;
        accept(state, i, candidate, fitness, params.accept_on_equal);
    }
    state.iteration += 1;
    Ok(())
}

/// Initializes and runs `max_iterations` iterations with a generator seeded
/// from `params.seed`.
pub fn run(spec: &ProblemSpec, params: &FpaParams) -> Result<RunResult> {
    let mut rng = RngState::new(params.seed);
    run_with(spec, params, &mut rng)
}

pub fn run_with<D: DrawSource>(
    spec: &ProblemSpec,
    params: &FpaParams,
    draws: &mut D,
) -> Result<RunResult> {
    let started = Instant::now();
    let mut state = init_population(spec, params, draws)?;
    let mut trace = Vec::with_capacity(params.max_iterations + 1);
    trace.push(state.trace_record());
    for _ in 0..params.max_iterations {
        match params.variant {
            Variant::Full => iterate(&mut state, spec, params, draws)?,
            Variant::Simplified => iterate_simplified(&mut state, spec, params, draws)?,
        }
        trace.push(state.trace_record());
    }
    Ok(RunResult {
        problem: spec.name().to_string(),
        seed: params.seed,
        params: *params,
        trace,
        final_state: state,
        wall_time: started.elapsed(),
    })
}

/// Successes over independent runs seeded `seed_base..seed_base + num_runs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitEstimate {
    pub successes: usize,
    pub runs: usize,
}

impl HitEstimate {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.runs as f64
    }
}

/// Fraction of runs whose final best lies in the ε-optimal region.
pub fn hit_probability(
    spec: &ProblemSpec,
    params: &FpaParams,
    epsilon: f64,
    num_runs: usize,
    seed_base: u64,
) -> Result<f64> {
    Ok(hit_estimate(spec, params, epsilon, num_runs, seed_base)?.fraction())
}

pub fn hit_estimate(
    spec: &ProblemSpec,
    params: &FpaParams,
    epsilon: f64,
    num_runs: usize,
    seed_base: u64,
) -> Result<HitEstimate> {
    if num_runs == 0 {
        return Err(crate::error::invalid("num_runs", "must be at least 1"));
    }
    if !(epsilon > 0.0) {
        return Err(crate::error::invalid("epsilon", "must be positive"));
    }
    let hits = (0..num_runs as u64)
        .into_par_iter()
        .map(|k| {
            let p = FpaParams {
                seed: seed_base.wrapping_add(k),
                ..*params
            };
            run(spec, &p).map(|r| spec.in_optimal_region(r.best_fitness(), epsilon))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(HitEstimate {
        successes: hits.into_iter().filter(|h| *h).count(),
        runs: num_runs,
    })
}


#[cfg(test)]
mod proptests {
    use proptest::prelude::*;

    use super::*;
    use crate::objectives::Benchmark;
    use crate::rng::LevyParams;

    fn params_strategy() -> impl Strategy<Value = FpaParams> {
        (
            1usize..12,
            0.0f64..=1.0,
            0.0f64..2.0,
            1.05f64..=2.0,
            any::<u64>(),
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(
                |(n, p, gamma, lambda, seed, simplified, shared)| FpaParams {
                    population_size: n,
                    switch_probability: p,
                    gamma,
                    levy: LevyParams::new(lambda, 0.01, 1.0).unwrap(),
                    levy_mode: if shared {
                        LevyMode::Shared
                    } else {
                        LevyMode::PerCoordinate
                    },
                    max_iterations: 15,
                    seed,
                    variant: if simplified {
                        Variant::Simplified
                    } else {
                        Variant::Full
                    },
                    ..FpaParams::default()
                },
            )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn swarm_invariants_hold(params in params_strategy(), which in 0usize..5) {
            let spec = ProblemSpec::builtin(Benchmark::ALL[which], 3).unwrap();
            let mut rng = RngState::new(params.seed);
            let mut state = init_population(&spec, &params, &mut rng).unwrap();
            prop_assert!(state.check_invariants(&spec).is_ok());
            for _ in 0..params.max_iterations {
                let before = state.global_best_fitness;
                match params.variant {
                    Variant::Full => iterate(&mut state, &spec, &params, &mut rng).unwrap(),
                    Variant::Simplified => iterate_simplified(&mut state, &spec, &params, &mut rng).unwrap(),
                }
                prop_assert!(state.global_best_fitness <= before);
                let check = state.check_invariants(&spec);
                prop_assert!(check.is_ok(), "{:?}", check);
            }
        }
    }
}
