//! Exact transition kernels of the simplified algorithm on a lattice.
//!
//! A pollen state is a pair `(x, g)` of grid points with `f(g) <= f(x)`.
//! One transition has two stages:
//!
//! 1. `x` moves uniformly over the box spanned by `x` and the segment
//!    endpoint (`g` for [`MoveDirection::TowardG`], `2x - g` for
//!    [`MoveDirection::AwayFromG`]). The continuous density is mapped to
//!    grid cells by overlap length per axis; the part of the segment
//!    outside the lattice is dropped and the rest renormalized. Then
//!    `g ← x'` when `f(x') <= f(g)`.
//! 2. With probability `1 - p` the position is kept; with probability `p`
//!    it jumps to a uniformly chosen grid point. Then `g` is updated by the
//!    same `<=` rule.
//!
//! The group kernel over `n` pollens is the product of the per-pollen kernels.

use serde::{Deserialize, Serialize};

use super::lattice::LatticeProblem;
use super::matrix::TransitionMatrix;
use crate::error::{invalid, Error, Result};

/// Default cap on the number of group states.
pub const DEFAULT_STATE_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PollenStateIndex {
    pub x: usize,
    pub g: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MoveDirection {
    /// Segment from `x` to `g`.
    #[default]
    TowardG,
    /// Segment from `x` to `x + (x - g)`.
    AwayFromG,
}

impl MoveDirection {
    pub fn endpoint(self, x: f64, g: f64) -> f64 {
        match self {
            MoveDirection::TowardG => g,
            MoveDirection::AwayFromG => x + (x - g),
        }
    }
}

/// All `(x, g)` with `f(g) <= f(x)`, ordered by `x` then `g`.
pub fn enumerate_pollen_states(lattice: &LatticeProblem) -> Vec<PollenStateIndex> {
    let k = lattice.len();
    (0..k)
        .flat_map(|x| (0..k).map(move |g| PollenStateIndex { x, g }))
        .filter(|s| lattice.value(s.g) <= lattice.value(s.x))
        .collect()
}

/// Probability of each axis cell under a uniform density on the segment
/// `[from, to]` (in coordinates), restricted to the lattice span.
///
/// Cell `i` covers `[mid(c[i-1], c[i]), mid(c[i], c[i+1])]`, with the outer
/// cells ending at the first and last coordinates. `from` must be a grid
/// coordinate with index `from_index`; a zero-length overlap yields a point
/// mass there.
pub fn axis_cell_weights(axis: &[f64], from_index: usize, to: f64) -> Vec<(usize, f64)> {
    let from = axis[from_index];
    let lo = from.min(to).max(axis[0]);
    let hi = from.max(to).min(axis[axis.len() - 1]);
    let length = hi - lo;
    if !(length > 0.0) {
        return vec![(from_index, 1.0)];
    }
    let last = axis.len() - 1;
    let mut weights = Vec::new();
    for i in 0..axis.len() {
        let cell_lo = if i == 0 {
            axis[0]
        } else {
            0.5 * (axis[i - 1] + axis[i])
        };
        let cell_hi = if i == last {
            axis[last]
        } else {
            0.5 * (axis[i] + axis[i + 1])
        };
        let overlap = cell_hi.min(hi) - cell_lo.max(lo);
        if overlap > 0.0 {
            weights.push((i, overlap));
        }
    }
    let total: f64 = weights.iter().map(|w| w.1).sum();
    for w in &mut weights {
        w.1 /= total;
    }
    weights
}

/// Stage-1 distribution of the moved position `x'` over grid points.
pub fn stage_one_distribution(
    lattice: &LatticeProblem,
    x: usize,
    g: usize,
    direction: MoveDirection,
) -> Vec<(usize, f64)> {
    let xi = lattice.unravel(x);
    let gi = lattice.unravel(g);
    let mut joint: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
    for (a, axis) in lattice.axes().iter().enumerate() {
        let to = direction.endpoint(axis[xi[a]], axis[gi[a]]);
        let w = axis_cell_weights(axis, xi[a], to);
        joint = joint
            .into_iter()
            .flat_map(|(idx, p)| {
                w.iter().map(move |&(i, q)| {
                    let mut next = idx.clone();
                    next.push(i);
                    (next, p * q)
                })
            })
            .collect();
    }
    joint
        .into_iter()
        .map(|(idx, p)| (lattice.ravel(&idx), p))
        .collect()
}

/// The per-pollen chain: enumerated states plus its kernel, whose optimal
/// set is `R = {(x, g) | f(g) = f(g_b)}`.
#[derive(Debug, Clone)]
pub struct PollenChain {
    pub lattice: LatticeProblem,
    pub states: Vec<PollenStateIndex>,
    pub matrix: TransitionMatrix,
    pub switch_probability: f64,
    pub direction: MoveDirection,
    lookup: Vec<Option<usize>>,
}

impl PollenChain {
    pub fn state_index(&self, s: PollenStateIndex) -> Option<usize> {
        self.lookup[s.x * self.lattice.len() + s.g]
    }

    /// Keep and perturb probabilities of the second stage.
    pub fn branch_probabilities(&self) -> (f64, f64) {
        (1.0 - self.switch_probability, self.switch_probability)
    }
}

fn best_update(lattice: &LatticeProblem, candidate: usize, g: usize) -> usize {
    if lattice.value(candidate) <= lattice.value(g) {
        candidate
    } else {
        g
    }
}

/// Builds the per-pollen transition kernel.
pub fn pollen_transition_matrix(
    lattice: &LatticeProblem,
    p: f64,
    direction: MoveDirection,
) -> Result<PollenChain> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(
            "switch_probability",
            format!("{p} is outside [0, 1]"),
        ));
    }
    let k = lattice.len();
    let states = enumerate_pollen_states(lattice);
    let mut lookup = vec![None; k * k];
    for (i, s) in states.iter().enumerate() {
        lookup[s.x * k + s.g] = Some(i);
    }
    let index = |x: usize, g: usize| lookup[x * k + g].expect("best update keeps f(g) <= f(x)");

    let rows = states
        .iter()
        .map(|s| {
            let mut row = Vec::new();
            for (x1, w1) in stage_one_distribution(lattice, s.x, s.g, direction) {
                let g1 = best_update(lattice, x1, s.g);
                if p < 1.0 {
                    row.push((index(x1, g1), w1 * (1.0 - p)));
                }
                if p > 0.0 {
                    let jump = w1 * p / k as f64;
                    for x2 in 0..k {
                        row.push((index(x2, best_update(lattice, x2, g1)), jump));
                    }
                }
            }
            row
        })
        .collect();
    let optimal = states.iter().map(|s| lattice.is_optimal(s.g)).collect();
    let matrix = TransitionMatrix::from_rows(rows, optimal)?;
    Ok(PollenChain {
        lattice: lattice.clone(),
        states,
        matrix,
        switch_probability: p,
        direction,
        lookup,
    })
}

/// Number of group states `S^n`, or an error above `cap`.
pub fn group_state_count(pollen_states: usize, n: usize, cap: usize) -> Result<usize> {
    if n == 0 {
        return Err(invalid("n", "population must have at least one pollen"));
    }
    let count = (pollen_states as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::StateCap { states: count, cap });
    }
    Ok(count as usize)
}

/// Decodes a group index into pollen-state indices (first pollen most significant).
pub fn decode_group_state(q: usize, pollen_states: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    let mut rest = q;
    for slot in out.iter_mut().rev() {
        *slot = rest % pollen_states;
        rest /= pollen_states;
    }
    out
}

pub fn encode_group_state(components: &[usize], pollen_states: usize) -> usize {
    components.iter().fold(0, |acc, c| acc * pollen_states + c)
}

/// Product kernel over `n` independent pollens, with
/// `H = {q | some component is in R}`.
pub fn group_transition_matrix(
    pollen: &TransitionMatrix,
    n: usize,
    cap: usize,
) -> Result<TransitionMatrix> {
    let s = pollen.len();
    let total = group_state_count(s, n, cap)?;
    let mut rows = Vec::with_capacity(total);
    let mut optimal = Vec::with_capacity(total);
    for q in 0..total {
        let comps = decode_group_state(q, s, n);
        optimal.push(comps.iter().any(|&c| pollen.optimal()[c]));
        let mut row: Vec<(usize, f64)> = vec![(0, 1.0)];
        for &c in &comps {
            let (cols, vals) = pollen.row(c);
            row = row
                .iter()
                .flat_map(|&(idx, p)| {
                    cols.iter()
                        .zip(vals)
                        .map(move |(j, v)| (idx * s + j, p * v))
                })
                .collect();
        }
        rows.push(row);
    }
    TransitionMatrix::from_rows(rows, optimal)
}
