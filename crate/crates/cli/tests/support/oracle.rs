//! Brute-force enumeration of every discrete outcome of one chain step,
//! written without the library's kernel code.

use std::collections::HashMap;

use fpa::markov::{
    group_transition_matrix, pollen_transition_matrix, LatticeProblem, MoveDirection,
    DEFAULT_STATE_CAP,
};

pub type Pollen = (usize, usize);

/// Stage-1 outcomes on a 1-D grid: split the clipped segment at every
/// breakpoint and give each piece to the grid point nearest its centre.
pub fn stage_one(points: &[f64], x: usize, g: usize, literal: bool) -> Vec<(usize, f64)> {
    let from = points[x];
    let to = if literal {
        2.0 * from - points[g]
    } else {
        points[g]
    };
    let a = from.min(to).max(points[0]);
    let b = from.max(to).min(*points.last().unwrap());
    if b <= a {
        return vec![(x, 1.0)];
    }
    let mut cuts = vec![a, b];
    for w in points.windows(2) {
        let m = (w[0] + w[1]) / 2.0;
        if m > a && m < b {
            cuts.push(m);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut out: HashMap<usize, f64> = HashMap::new();
    for w in cuts.windows(2) {
        let centre = (w[0] + w[1]) / 2.0;
        let nearest = (0..points.len())
            .min_by(|&i, &j| {
                (points[i] - centre)
                    .abs()
                    .total_cmp(&(points[j] - centre).abs())
            })
            .unwrap();
        *out.entry(nearest).or_default() += (w[1] - w[0]) / (b - a);
    }
    out.into_iter().collect()
}

pub fn outcomes(points: &[f64], f: &[f64], y: Pollen, p: f64, literal: bool) -> Vec<(Pollen, f64)> {
    let k = points.len();
    let upd = |cand: usize, g: usize| if f[cand] <= f[g] { cand } else { g };
    let mut out = Vec::new();
    for (x1, w) in stage_one(points, y.0, y.1, literal) {
        let g1 = upd(x1, y.1);
        out.push(((x1, g1), w * (1.0 - p)));
        for x2 in 0..k {
            out.push(((x2, upd(x2, g1)), w * p / k as f64));
        }
    }
    out
}

/// Brute-force group kernel keyed by state tuples.
pub fn brute_force(
    points: &[f64],
    f: &[f64],
    n: usize,
    p: f64,
    literal: bool,
) -> HashMap<(Vec<Pollen>, Vec<Pollen>), f64> {
    let k = points.len();
    let singles: Vec<Pollen> = (0..k)
        .flat_map(|x| (0..k).map(move |g| (x, g)))
        .filter(|&(x, g)| f[g] <= f[x])
        .collect();
    let mut groups: Vec<Vec<Pollen>> = vec![vec![]];
    for _ in 0..n {
        groups = groups
            .into_iter()
            .flat_map(|gr| {
                singles.iter().map(move |s| {
                    let mut v = gr.clone();
                    v.push(*s);
                    v
                })
            })
            .collect();
    }
    let mut table = HashMap::new();
    for from in &groups {
        let mut joint: Vec<(Vec<Pollen>, f64)> = vec![(vec![], 1.0)];
        for y in from {
            let o = outcomes(points, f, *y, p, literal);
            joint = joint
                .into_iter()
                .flat_map(|(acc, pr)| {
                    o.iter().map(move |(z, q)| {
                        let mut v = acc.clone();
                        v.push(*z);
                        (v, pr * q)
                    })
                })
                .collect();
        }
        for (to, pr) in joint {
            *table.entry((from.clone(), to)).or_insert(0.0) += pr;
        }
    }
    table
}

pub fn compare(lattice: &LatticeProblem, n: usize, p: f64, direction: MoveDirection) -> f64 {
    let points = lattice.axes()[0].clone();
    let f = lattice.values().to_vec();
    let chain = pollen_transition_matrix(lattice, p, direction).unwrap();
    let group = group_transition_matrix(&chain.matrix, n, DEFAULT_STATE_CAP).unwrap();
    let s = chain.states.len();
    let tuple = |q: usize| -> Vec<Pollen> {
        let mut v = Vec::new();
        let mut rest = q;
        for _ in 0..n {
            let st = chain.states[rest % s];
            v.push((st.x, st.g));
            rest /= s;
        }
        v.reverse();
        v
    };
    let oracle = brute_force(&points, &f, n, p, direction == MoveDirection::AwayFromG);
    assert_eq!(
        oracle
            .keys()
            .map(|k| &k.0)
            .collect::<std::collections::HashSet<_>>()
            .len(),
        group.len()
    );
    let mut worst = 0.0f64;
    for i in 0..group.len() {
        for j in 0..group.len() {
            let expect = oracle.get(&(tuple(i), tuple(j))).copied().unwrap_or(0.0);
            worst = worst.max((group.get(i, j) - expect).abs());
        }
    }
    worst
}
