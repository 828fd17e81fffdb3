//! Benchmark objectives, box-bounded problem specifications and the
//! ε-optimal region predicate.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// The five built-in benchmark functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Ackley,
    Sphere,
    Rosenbrock,
    YangForest,
    Zakharov,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [
        Benchmark::Ackley,
        Benchmark::Sphere,
        Benchmark::Rosenbrock,
        Benchmark::YangForest,
        Benchmark::Zakharov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Ackley => "ackley",
            Benchmark::Sphere => "sphere",
            Benchmark::Rosenbrock => "rosenbrock",
            Benchmark::YangForest => "yang-forest",
            Benchmark::Zakharov => "zakharov",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::UnknownProblem(name.to_string()))
    }

    /// Symmetric half-width of the search box.
    pub fn half_width(self) -> f64 {
        match self {
            Benchmark::Ackley => 32.768,
            Benchmark::Sphere => 5.12,
            Benchmark::Rosenbrock => 5.0,
            Benchmark::YangForest => 2.0 * PI,
            Benchmark::Zakharov => 5.0,
        }
    }

    pub fn optimizer(self, d: usize) -> Vec<f64> {
        match self {
            Benchmark::Rosenbrock => vec![1.0; d],
            _ => vec![0.0; d],
        }
    }

    pub fn evaluate(self, x: &[f64]) -> f64 {
        match self {
            Benchmark::Ackley => ackley(x),
            Benchmark::Sphere => sphere(x),
            Benchmark::Rosenbrock => rosenbrock(x),
            Benchmark::YangForest => yang_forest(x),
            Benchmark::Zakharov => zakharov(x),
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sum_sq = x.iter().map(|v| v * v).sum::<f64>();
    let sum_cos = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>();
    -20.0 * (-0.2 * (sum_sq / d).sqrt()).exp() - (sum_cos / d).exp() + 20.0 + E
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| (w[0] - 1.0).powi(2) + 100.0 * (w[1] - w[0] * w[0]).powi(2))
        .sum()
}

/// `(Σ|x_i|) exp(-Σ sin(x_i²))`. Some references use `sin(|x_i|)`; this is
/// the squared-argument form.
pub fn yang_forest(x: &[f64]) -> f64 {
    let abs_sum = x.iter().map(|v| v.abs()).sum::<f64>();
    let sin_sum = x.iter().map(|v| (v * v).sin()).sum::<f64>();
    abs_sum * (-sin_sum).exp()
}

pub fn zakharov(x: &[f64]) -> f64 {
    let sum_sq = x.iter().map(|v| v * v).sum::<f64>();
    let weighted = x
        .iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v / 2.0)
        .sum::<f64>();
    sum_sq + weighted.powi(2) + weighted.powi(4)
}

type CustomFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Objective {
    Builtin(Benchmark),
    Custom(CustomFn),
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Builtin(b) => write!(f, "Builtin({b})"),
            Objective::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A box-bounded minimization problem with its known optimum.
///
/// `optimum_value` is φ, the infimum of the objective; it may be `-inf`, in
/// which case `large_c` defines the optimal region as `f < -large_c`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    name: String,
    objective: Objective,
    lower: Vec<f64>,
    upper: Vec<f64>,
    optimum_value: f64,
    optimizer: Vec<f64>,
    large_c: f64,
}

impl ProblemSpec {
    pub fn builtin(benchmark: Benchmark, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension", "must be at least 1"));
        }
        if benchmark == Benchmark::Rosenbrock && dimension < 2 {
            return Err(invalid(
                "dimension",
                "rosenbrock needs at least 2 coordinates",
            ));
        }
        let w = benchmark.half_width();
        Ok(Self {
            name: benchmark.name().to_string(),
            objective: Objective::Builtin(benchmark),
            lower: vec![-w; dimension],
            upper: vec![w; dimension],
            optimum_value: 0.0,
            optimizer: benchmark.optimizer(dimension),
            large_c: 1e9,
        })
    }

    pub fn by_name(name: &str, dimension: usize) -> Result<Self> {
        Self::builtin(Benchmark::from_name(name)?, dimension)
    }

    /// A user-defined problem. `optimizer` may be empty when φ is `-inf`.
    pub fn custom<F>(
        name: impl Into<String>,
        f: F,
        lower: Vec<f64>,
        upper: Vec<f64>,
        optimum_value: f64,
        optimizer: Vec<f64>,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if lower.is_empty() {
            return Err(invalid("dimension", "must be at least 1"));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(invalid(
                "bounds",
                format!("lower[{i}] must be below upper[{i}]"),
            ));
        }
        if !optimizer.is_empty() {
            if optimizer.len() != lower.len() {
                return Err(Error::DimensionMismatch {
                    expected: lower.len(),
                    got: optimizer.len(),
                });
            }
            if optimizer
                .iter()
                .zip(lower.iter().zip(&upper))
                .any(|(x, (lo, hi))| x < lo || x > hi)
            {
                return Err(invalid("optimizer", "known optimizer lies outside the box"));
            }
        }
        if optimum_value.is_nan() || optimum_value == f64::INFINITY {
            return Err(invalid("optimum_value", "must be finite or -inf"));
        }
        Ok(Self {
            name: name.into(),
            objective: Objective::Custom(Arc::new(f)),
            lower,
            upper,
            optimum_value,
            optimizer,
            large_c: 1e9,
        })
    }

    pub fn with_large_c(mut self, large_c: f64) -> Result<Self> {
        if !(large_c > 0.0) {
            return Err(invalid("large_c", "must be positive"));
        }
        self.large_c = large_c;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn optimum_value(&self) -> f64 {
        self.optimum_value
    }

    pub fn optimizer(&self) -> &[f64] {
        &self.optimizer
    }

    pub fn large_c(&self) -> f64 {
        self.large_c
    }

    /// Length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_dimension(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        match &self.objective {
            Objective::Builtin(b) => b.evaluate(x),
            Objective::Custom(f) => f(x),
        }
    }

    /// Membership of an objective value in the ε-optimal region.
    pub fn in_optimal_region(&self, f_value: f64, epsilon: f64) -> bool {
        if self.optimum_value == f64::NEG_INFINITY {
            f_value < -self.large_c
        } else {
            f_value < self.optimum_value + epsilon
        }
    }

    /// Projects `x` onto the box. NaN coordinates are rejected.
    pub fn clamp_to_bounds(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dimension(x)?;
        let mut out = x.to_vec();
        self.clamp_in_place(&mut out)?;
        Ok(out)
    }

    pub(crate) fn clamp_in_place(&self, x: &mut [f64]) -> Result<()> {
        for (i, v) in x.iter_mut().enumerate() {
            if v.is_nan() {
                return Err(Error::NonFinite { index: i });
            }
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    fn check_dimension(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(())
    }
}
