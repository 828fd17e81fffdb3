//! Stochastic simulation of lattice chains, used to cross-check the analytic
//! kernels: empirical one-step frequencies (homogeneity) and Monte-Carlo
//! mass on the optimal set.

use std::borrow::Cow;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::chain::{
    decode_group_state, encode_group_state, group_transition_matrix, pollen_transition_matrix,
    MoveDirection, PollenChain, PollenStateIndex,
};
use super::lattice::LatticeProblem;
use super::matrix::TransitionMatrix;
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, DrawSource, RngState};

/// Minimum samples per source state and time point for a homogeneity check.
pub const MIN_HOMOGENEITY_SAMPLES: usize = 10_000;

/// Per-entry false-alarm rate of a plain 3-sigma test.
const THREE_SIGMA_ALPHA: f64 = 0.0027;

/// A finite chain that can both state its kernel and be simulated.
pub trait ChainModel: Sync {
    fn states(&self) -> usize;

    /// Analytic kernel of the step taken at time `t`.
    fn kernel_at(&self, t: usize) -> Cow<'_, TransitionMatrix>;

    /// Simulates the step from `state` at time `t`.
    fn sample_step(&self, state: usize, t: usize, rng: &mut RngState) -> usize;

    fn optimal(&self) -> Cow<'_, [bool]> {
        Cow::Owned(self.kernel_at(0).optimal().to_vec())
    }
}

/// Index of the grid coordinate nearest to `u` (lower index on ties).
fn snap(axis: &[f64], u: f64) -> usize {
    let above = axis.partition_point(|c| *c < u);
    if above == 0 {
        0
    } else if above == axis.len() {
        axis.len() - 1
    } else if u - axis[above - 1] <= axis[above] - u {
        above - 1
    } else {
        above
    }
}

/// Per-axis indices of a point of a lattice with at most two axes.
fn axis_indices(axes: &[Vec<f64>], point: usize) -> [usize; 2] {
    match axes {
        [_] => [point, 0],
        [_, ys] => [point / ys.len(), point % ys.len()],
        _ => unreachable!("lattices have one or two axes"),
    }
}

/// Simulates one transition of a single pollen: a continuous uniform draw on
/// the move segment (redrawn until it lands inside the lattice span), snapped
/// to the nearest grid point, then the keep/perturb branch.
pub fn simulate_pollen_step<D: DrawSource>(
    lattice: &LatticeProblem,
    state: PollenStateIndex,
    p: f64,
    direction: MoveDirection,
    draws: &mut D,
) -> PollenStateIndex {
    let axes = lattice.axes();
    let (xi, gi) = (axis_indices(axes, state.x), axis_indices(axes, state.g));
    let mut moved = xi;
    for (a, axis) in axes.iter().enumerate() {
        let from = axis[xi[a]];
        let to = direction.endpoint(from, axis[gi[a]]);
        let (lo, hi) = (from.min(to), from.max(to));
        let (first, last) = (axis[0], axis[axis.len() - 1]);
        if !(hi.min(last) - lo.max(first) > 0.0) {
            continue;
        }
        let u = loop {
            let u = lo + draws.uniform() * (hi - lo);
            if (first..=last).contains(&u) {
                break u;
            }
        };
        moved[a] = snap(axis, u);
    }
    let better = |candidate: usize, g: usize| {
        if lattice.value(candidate) <= lattice.value(g) {
            candidate
        } else {
            g
        }
    };
    let x1 = lattice.ravel(&moved[..axes.len()]);
    let g1 = better(x1, state.g);
    if draws.uniform() < p {
        let x2 = draws.index(lattice.len());
        PollenStateIndex {
            x: x2,
            g: better(x2, g1),
        }
    } else {
        PollenStateIndex { x: x1, g: g1 }
    }
}

/// The simplified algorithm on a lattice with `n` pollens and fixed `p`.
#[derive(Debug, Clone)]
pub struct SimplifiedLatticeChain {
    pollen: PollenChain,
    n: usize,
    group: TransitionMatrix,
}

impl SimplifiedLatticeChain {
    pub fn new(
        lattice: &LatticeProblem,
        n: usize,
        p: f64,
        direction: MoveDirection,
        cap: usize,
    ) -> Result<Self> {
        let pollen = pollen_transition_matrix(lattice, p, direction)?;
        let group = group_transition_matrix(&pollen.matrix, n, cap)?;
        Ok(Self { pollen, n, group })
    }

    pub fn pollen(&self) -> &PollenChain {
        &self.pollen
    }

    pub fn population(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.group
    }
}

impl ChainModel for SimplifiedLatticeChain {
    fn states(&self) -> usize {
        self.group.len()
    }

    fn kernel_at(&self, _t: usize) -> Cow<'_, TransitionMatrix> {
        Cow::Borrowed(&self.group)
    }

    fn sample_step(&self, state: usize, _t: usize, rng: &mut RngState) -> usize {
        step_group(
            &self.pollen,
            self.n,
            self.pollen.switch_probability,
            state,
            rng,
        )
    }

    fn optimal(&self) -> Cow<'_, [bool]> {
        Cow::Borrowed(self.group.optimal())
    }
}

fn step_group(pollen: &PollenChain, n: usize, p: f64, state: usize, rng: &mut RngState) -> usize {
    let s = pollen.states.len();
    let step = |c: usize, rng: &mut RngState| {
        let y = simulate_pollen_step(&pollen.lattice, pollen.states[c], p, pollen.direction, rng);
        pollen.state_index(y).expect("simulated state is valid")
    };
    if n == 1 {
        return step(state, rng);
    }
    let next: Vec<usize> = decode_group_state(state, s, n)
        .into_iter()
        .map(|c| step(c, rng))
        .collect();
    encode_group_state(&next, s)
}

/// A chain whose switch probability changes at `switch_time`; it is not
/// homogeneous and serves as a negative control.
#[derive(Debug, Clone)]
pub struct TimeVaryingChain {
    early: PollenChain,
    late: PollenChain,
    switch_time: usize,
}

impl TimeVaryingChain {
    pub fn new(
        lattice: &LatticeProblem,
        p_early: f64,
        p_late: f64,
        switch_time: usize,
        direction: MoveDirection,
    ) -> Result<Self> {
        Ok(Self {
            early: pollen_transition_matrix(lattice, p_early, direction)?,
            late: pollen_transition_matrix(lattice, p_late, direction)?,
            switch_time,
        })
    }

    fn at(&self, t: usize) -> &PollenChain {
        if t < self.switch_time {
            &self.early
        } else {
            &self.late
        }
    }
}

impl ChainModel for TimeVaryingChain {
    fn states(&self) -> usize {
        self.early.states.len()
    }

    fn kernel_at(&self, t: usize) -> Cow<'_, TransitionMatrix> {
        Cow::Borrowed(&self.at(t).matrix)
    }

    fn sample_step(&self, state: usize, t: usize, rng: &mut RngState) -> usize {
        let chain = self.at(t);
        step_group(chain, 1, chain.switch_probability, state, rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub holds: bool,
    pub sample_times: Vec<usize>,
    pub samples_per_state: usize,
    /// Whether the analytic kernels agree exactly at every sample time.
    pub analytic_time_invariant: bool,
    pub max_discrepancy_vs_analytic: f64,
    pub max_discrepancy_between_times: f64,
    /// Largest standardized deviation across all compared entries.
    pub max_z: f64,
    pub z_threshold: f64,
    /// Entries with analytic probability 0 or 1 whose frequency differs.
    pub exact_mismatches: usize,
    pub compared_entries: usize,
}

/// Two-sided critical value keeping the family-wise false-alarm rate of
/// `m` tests at that of one 3-sigma test, and never below 3.
pub fn family_z_threshold(m: usize) -> f64 {
    if m <= 1 {
        return 3.0;
    }
    let per_test = -(-THREE_SIGMA_ALPHA).ln_1p() / m as f64;
    let per_test = -(-per_test).exp_m1();
    let normal = Normal::standard();
    normal.inverse_cdf(1.0 - per_test / 2.0).max(3.0)
}

fn empirical_rows<M: ChainModel>(
    model: &M,
    t: usize,
    num_samples: usize,
    seed: u64,
) -> Vec<Vec<(usize, u32)>> {
    (0..model.states())
        .into_par_iter()
        .map(|i| {
            let stream = (t as u64) << 32 | i as u64;
            let mut rng = RngState::new(derive_seed(seed, stream));
            let mut counts = std::collections::BTreeMap::new();
            for _ in 0..num_samples {
                *counts
                    .entry(model.sample_step(i, t, &mut rng))
                    .or_insert(0u32) += 1;
            }
            counts.into_iter().collect()
        })
        .collect()
}

/// Compares empirical one-step frequencies at each of `sample_times` against
/// the analytic kernel at the first sample time and against each other.
pub fn check_homogeneity<M: ChainModel>(
    model: &M,
    sample_times: &[usize],
    num_samples: usize,
    seed: u64,
) -> Result<HomogeneityReport> {
    if num_samples < MIN_HOMOGENEITY_SAMPLES {
        return Err(invalid(
            "num_samples",
            format!("need at least {MIN_HOMOGENEITY_SAMPLES} samples per state, got {num_samples}"),
        ));
    }
    if sample_times.is_empty() {
        return Err(invalid(
            "sample_times",
            "at least one sample time is required",
        ));
    }
    let reference = model.kernel_at(sample_times[0]);
    let analytic_time_invariant = sample_times[1..]
        .iter()
        .all(|&t| *model.kernel_at(t) == *reference);
    let empirical: Vec<Vec<Vec<(usize, u32)>>> = sample_times
        .iter()
        .map(|&t| empirical_rows(model, t, num_samples, seed))
        .collect();

    let n = num_samples as f64;
    let freq = |rows: &Vec<(usize, u32)>, j: usize| {
        rows.binary_search_by_key(&j, |e| e.0)
            .map(|k| rows[k].1 as f64 / n)
            .unwrap_or(0.0)
    };
    let times = sample_times.len();
    let pairs = times * (times - 1) / 2;

    // Entries with 0 < p < 1 are tested statistically; the rest exactly.
    let mut stochastic_entries = 0;
    for i in 0..model.states() {
        let (_, vals) = reference.row(i);
        stochastic_entries += vals.iter().filter(|v| **v < 1.0).count();
    }
    let z_threshold = family_z_threshold(stochastic_entries * (times + pairs));

    let mut max_vs = 0.0f64;
    let mut max_between = 0.0f64;
    let mut max_z = 0.0f64;
    let mut exact_mismatches = 0;
    let mut compared = 0;
    for i in 0..model.states() {
        let mut support: Vec<usize> = reference.row(i).0.to_vec();
        for rows in &empirical {
            support.extend(rows[i].iter().map(|e| e.0));
        }
        support.sort_unstable();
        support.dedup();
        for &j in &support {
            let p = reference.get(i, j);
            let q: Vec<f64> = empirical.iter().map(|rows| freq(&rows[i], j)).collect();
            compared += 1;
            for (a, qa) in q.iter().enumerate() {
                max_vs = max_vs.max((qa - p).abs());
                for qb in &q[a + 1..] {
                    max_between = max_between.max((qa - qb).abs());
                }
            }
            if p == 0.0 || p == 1.0 {
                exact_mismatches += q.iter().filter(|qa| **qa != p).count();
                continue;
            }
            let se = (p * (1.0 - p) / n).sqrt();
            for (a, qa) in q.iter().enumerate() {
                max_z = max_z.max((qa - p).abs() / se);
                for qb in &q[a + 1..] {
                    max_z = max_z.max((qa - qb).abs() / (se * 2f64.sqrt()));
                }
            }
        }
    }
    Ok(HomogeneityReport {
        holds: analytic_time_invariant && exact_mismatches == 0 && max_z <= z_threshold,
        sample_times: sample_times.to_vec(),
        samples_per_state: num_samples,
        analytic_time_invariant,
        max_discrepancy_vs_analytic: max_vs,
        max_discrepancy_between_times: max_between,
        max_z,
        z_threshold,
        exact_mismatches,
        compared_entries: compared,
    })
}

/// Samples a state from `dist` by inversion.
fn sample_initial(dist: &[f64], rng: &mut RngState) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, m) in dist.iter().enumerate() {
        acc += m;
        if u < acc {
            return i;
        }
    }
    dist.iter().rposition(|m| *m > 0.0).unwrap_or(0)
}

const TRAJECTORY_CHUNK: usize = 1024;

/// Fraction of `trajectories` simulated paths in the optimal set after
/// `0..=steps` steps, starting from `initial`.
pub fn monte_carlo_mass_on_optimal<M: ChainModel>(
    model: &M,
    initial: &[f64],
    steps: usize,
    trajectories: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if initial.len() != model.states() {
        return Err(crate::Error::DimensionMismatch {
            expected: model.states(),
            got: initial.len(),
        });
    }
    if trajectories == 0 {
        return Err(invalid("trajectories", "need at least one trajectory"));
    }
    let optimal = model.optimal();
    let chunks = trajectories.div_ceil(TRAJECTORY_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngState::new(derive_seed(seed, c as u64));
            let size = TRAJECTORY_CHUNK.min(trajectories - c * TRAJECTORY_CHUNK);
            let mut counts = vec![0u64; steps + 1];
            for _ in 0..size {
                let mut state = sample_initial(initial, &mut rng);
                counts[0] += optimal[state] as u64;
                for (t, count) in counts.iter_mut().enumerate().skip(1) {
                    state = model.sample_step(state, t - 1, &mut rng);
                    *count += optimal[state] as u64;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; steps + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / trajectories as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::chain::DEFAULT_STATE_CAP;
    use crate::markov::checks::{limiting_distribution, uniform_distribution};
    use crate::markov::lattice::builtin_lattice;

    #[test]
    fn snapping() {
        let axis = [-1.0, 0.0, 1.0];
        assert_eq!(snap(&axis, -1.0), 0);
        assert_eq!(snap(&axis, -0.6), 0);
        assert_eq!(snap(&axis, -0.4), 1);
        assert_eq!(snap(&axis, 0.9), 2);
        assert_eq!(snap(&axis, 1.0), 2);
    }

    #[test]
    fn z_threshold_grows_with_family() {
        assert_eq!(family_z_threshold(1), 3.0);
        let z = family_z_threshold(1000);
        assert!(z > 4.0 && z < 5.0, "{z}");
        assert!(family_z_threshold(10_000) > z);
    }

    #[test]
    fn simplified_chain_is_homogeneous() {
        let l = builtin_lattice("line-5").unwrap();
        let chain =
            SimplifiedLatticeChain::new(&l, 1, 0.8, MoveDirection::TowardG, DEFAULT_STATE_CAP)
                .unwrap();
        let r = check_homogeneity(&chain, &[1, 50], 20_000, 7).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.analytic_time_invariant);
    }

    #[test]
    fn time_varying_chain_is_flagged() {
        let l = builtin_lattice("line-5").unwrap();
        let chain = TimeVaryingChain::new(&l, 0.2, 0.8, 10, MoveDirection::TowardG).unwrap();
        let r = check_homogeneity(&chain, &[1, 50], 20_000, 7).unwrap();
        assert!(!r.holds);
        assert!(!r.analytic_time_invariant);
        assert!(r.max_discrepancy_between_times > 0.05);
    }

    #[test]
    fn too_few_samples_rejected() {
        let l = builtin_lattice("line-3").unwrap();
        let chain =
            SimplifiedLatticeChain::new(&l, 1, 0.8, MoveDirection::TowardG, DEFAULT_STATE_CAP)
                .unwrap();
        assert!(check_homogeneity(&chain, &[1], 100, 1).is_err());
    }

    #[test]
    fn monte_carlo_tracks_matrix_power() {
        let l = builtin_lattice("line-5").unwrap();
        let chain =
            SimplifiedLatticeChain::new(&l, 1, 0.8, MoveDirection::TowardG, DEFAULT_STATE_CAP)
                .unwrap();
        let init = uniform_distribution(chain.states());
        let exact = limiting_distribution(chain.matrix(), &init, 5).unwrap();
        let mc = monte_carlo_mass_on_optimal(&chain, &init, 5, 20_000, 3).unwrap();
        for (m, e) in mc.iter().zip(&exact.mass_on_optimal) {
            let se = (e * (1.0 - e) / 20_000.0).sqrt().max(1e-9);
            assert!((m - e).abs() <= 4.5 * se, "{m} vs {e}");
        }
    }
}
