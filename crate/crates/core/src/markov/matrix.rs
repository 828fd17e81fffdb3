//! Sparse row-stochastic matrices over enumerated states.

use crate::error::{invalid, Error, Result};

/// Tolerance on row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// A transition matrix in compressed-row form together with the index set
/// of optimal states. Only strictly positive entries are stored, and column
/// indices within a row are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    optimal: Vec<bool>,
}

impl TransitionMatrix {
    /// Builds from per-row `(column, probability)` lists. Zero entries are
    /// dropped and duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, optimal: Vec<bool>) -> Result<Self> {
        let n = rows.len();
        if optimal.len() != n {
            return Err(invalid(
                "optimal",
                format!("expected {n} flags, got {}", optimal.len()),
            ));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (c, v) in row {
                if c >= n {
                    return Err(invalid(
                        "column",
                        format!("{c} out of range for {n} states"),
                    ));
                }
                if !(0.0..=1.0 + ROW_SUM_TOLERANCE).contains(&v) {
                    return Err(invalid("entry", format!("probability {v} outside [0, 1]")));
                }
                if v == 0.0 {
                    continue;
                }
                if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        let m = Self {
            row_ptr,
            cols,
            vals,
            optimal,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_dense(dense: &[Vec<f64>], optimal: Vec<bool>) -> Result<Self> {
        let n = dense.len();
        let rows = dense
            .iter()
            .map(|r| {
                if r.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: r.len(),
                    });
                }
                Ok(r.iter().copied().enumerate().collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows, optimal)
    }

    /// Checks entries in `[0, 1]` and row sums within [`ROW_SUM_TOLERANCE`].
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.len() {
            let (_, vals) = self.row(i);
            if vals.iter().any(|v| !(*v >= 0.0 && *v <= 1.0)) {
                return Err(invalid(
                    "entry",
                    format!("row {i} has an entry outside [0, 1]"),
                ));
            }
            let sum: f64 = vals.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::NotStochastic { row: i, sum });
            }
        }
        Ok(())
    }

    /// Largest `|row sum - 1|`.
    pub fn max_row_error(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.row(i).1.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.optimal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.optimal.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    /// Membership flags of the optimal set.
    pub fn optimal(&self) -> &[bool] {
        &self.optimal
    }

    pub fn optimal_count(&self) -> usize {
        self.optimal.iter().filter(|o| **o).count()
    }

    /// One step of the distribution: `dist × P`.
    pub fn propagate(&self, dist: &[f64]) -> Vec<f64> {
        let mut next = vec![0.0; self.len()];
        for (i, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                next[*c] += mass * v;
            }
        }
        next
    }

    pub fn mass_on_optimal(&self, dist: &[f64]) -> f64 {
        dist.iter()
            .zip(&self.optimal)
            .filter(|(_, o)| **o)
            .map(|(m, _)| m)
            .sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| {
                let mut r = vec![0.0; self.len()];
                let (cols, vals) = self.row(i);
                for (c, v) in cols.iter().zip(vals) {
                    r[*c] = *v;
                }
                r
            })
            .collect()
    }
}
