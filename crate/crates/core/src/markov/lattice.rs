//! Finite lattice problems: a 1-D or 2-D grid of points with objective values.

use serde::Serialize;

use crate::error::{invalid, Result};

/// A grid of `K` points (`K = K₁` or `K₁ × K₂`) with one objective value per point.
///
/// Points are indexed row-major with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeProblem {
    name: String,
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
    optimum: usize,
}

impl LatticeProblem {
    pub fn one_dimensional(
        name: impl Into<String>,
        points: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        Self::new(name, vec![points], values)
    }

    /// 1-D lattice with values `f(point)`.
    pub fn from_fn(
        name: impl Into<String>,
        points: Vec<f64>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = points.iter().map(|&x| f(x)).collect();
        Self::one_dimensional(name, points, values)
    }

    /// 2-D lattice over `xs × ys` with values `f(x, y)`.
    pub fn grid_2d(
        name: impl Into<String>,
        xs: Vec<f64>,
        ys: Vec<f64>,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let values = xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(name, vec![xs, ys], values)
    }

    pub fn new(name: impl Into<String>, axes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(invalid("axes", "lattices have one or two axes"));
        }
        for axis in &axes {
            if axis.is_empty() {
                return Err(invalid("axes", "every axis needs at least one point"));
            }
            if axis.windows(2).any(|w| !(w[0] < w[1])) || axis.iter().any(|c| !c.is_finite()) {
                return Err(invalid(
                    "axes",
                    "axis coordinates must be finite and strictly increasing",
                ));
            }
        }
        let k: usize = axes.iter().map(Vec::len).product();
        if values.len() != k {
            return Err(invalid(
                "values",
                format!("expected {k} values, got {}", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values", "objective values must be finite"));
        }
        // lowest index among ties
        let optimum = values
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v < values[best] { i } else { best });
        Ok(Self {
            name: name.into(),
            axes,
            values,
            optimum,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, point: usize) -> f64 {
        self.values[point]
    }

    /// Index of the designated optimum `g_b` (lowest index among ties).
    pub fn optimum(&self) -> usize {
        self.optimum
    }

    pub fn optimum_value(&self) -> f64 {
        self.values[self.optimum]
    }

    /// Whether `point` attains the optimum value; ties all count.
    pub fn is_optimal(&self, point: usize) -> bool {
        self.values[point] == self.optimum_value()
    }

    /// Per-axis coordinate indices of a point.
    pub fn unravel(&self, point: usize) -> Vec<usize> {
        let mut rest = point;
        let mut idx = vec![0; self.axes.len()];
        for (a, axis) in self.axes.iter().enumerate().rev() {
            idx[a] = rest % axis.len();
            rest /= axis.len();
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (i, axis)| acc * axis.len() + i)
    }

    pub fn coordinates(&self, point: usize) -> Vec<f64> {
        self.unravel(point)
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis[i])
            .collect()
    }
}

/// The lattices checked by default.
pub fn builtin_lattices() -> Vec<LatticeProblem> {
    let line = |k: i32| (-(k / 2)..=k / 2).map(f64::from).collect::<Vec<_>>();
    vec![
        LatticeProblem::from_fn("line-3", line(3), |x| x * x + 0.25 * x).expect("valid"),
        LatticeProblem::from_fn("line-5", line(5), |x| x * x - 0.3 * x).expect("valid"),
        LatticeProblem::one_dimensional("multimodal-5", line(5), vec![0.6, 1.0, 0.3, 0.9, 0.0])
            .expect("valid"),
        LatticeProblem::one_dimensional("plateau-5", line(5), vec![1.0, 0.0, 0.5, 0.0, 1.0])
            .expect("valid"),
        LatticeProblem::grid_2d("grid-3x3", line(3), line(3), |x, y| x * x + y * y + 0.1 * x)
            .expect("valid"),
    ]
}

pub fn builtin_lattice(name: &str) -> Option<LatticeProblem> {
    builtin_lattices().into_iter().find(|l| l.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimum_ties_take_lowest_index() {
        let l = builtin_lattice("plateau-5").unwrap();
        assert_eq!(l.optimum(), 1);
        assert!(l.is_optimal(3));
        assert!(!l.is_optimal(2));
    }

    #[test]
    fn ravel_roundtrip_2d() {
        let l = builtin_lattice("grid-3x3").unwrap();
        assert_eq!(l.len(), 9);
        for p in 0..9 {
            assert_eq!(l.ravel(&l.unravel(p)), p);
        }
        assert_eq!(l.coordinates(5), vec![0.0, 1.0]);
        assert_eq!(l.optimum(), 4);
    }

    #[test]
    fn rejects_bad_lattices() {
        assert!(LatticeProblem::one_dimensional("x", vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(LatticeProblem::one_dimensional("x", vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(LatticeProblem::one_dimensional("x", vec![0.0, 1.0], vec![0.0, f64::NAN]).is_err());
        assert!(LatticeProblem::new("x", vec![], vec![]).is_err());
    }

    #[test]
    fn builtin_values() {
        let l3 = builtin_lattice("line-3").unwrap();
        assert_eq!(l3.values(), &[0.75, 0.0, 1.25]);
        let l5 = builtin_lattice("line-5").unwrap();
        assert_eq!(l5.optimum(), 2);
    }
}
