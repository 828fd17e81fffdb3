//! Small sample statistics used by the Lévy checks and the hit-probability report.

use serde::Serialize;

/// Survival-probability window used for the tail fit.
pub const TAIL_WINDOW: (f64, f64) = (1e-4, 1e-2);

/// Result of a log-log regression of the empirical survival function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits `ln S(x) = a + b ln x` over the order statistics whose empirical
/// survival `k / N` lies in [`TAIL_WINDOW`]; `b` is the slope.
///
/// Returns `None` when fewer than two points fall in the window.
pub fn survival_tail_slope(magnitudes: &[f64]) -> Option<TailFit> {
    let mut sorted: Vec<f64> = magnitudes.iter().map(|m| m.abs()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len() as f64;
    let (lo, hi) = TAIL_WINDOW;
    let points: Vec<(f64, f64)> = sorted
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| {
            let survival = (i + 1) as f64 / n;
            (survival >= lo && survival <= hi && m > 0.0).then(|| (m.ln(), survival.ln()))
        })
        .collect();
    let (slope, intercept) = least_squares(&points)?;
    Some(TailFit {
        slope,
        intercept,
        points: points.len(),
    })
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
}

/// Excess kurtosis (0 for a normal distribution).
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Log-spaced histogram of magnitudes: `(lower, upper, count)` per bin.
pub fn log_histogram(magnitudes: &[f64], bins_per_decade: usize) -> Vec<(f64, f64, usize)> {
    let positive: Vec<f64> = magnitudes
        .iter()
        .map(|m| m.abs())
        .filter(|m| *m > 0.0)
        .collect();
    if positive.is_empty() {
        return Vec::new();
    }
    let min = positive.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = positive.iter().cloned().fold(0.0, f64::max);
    let start = min.log10().floor() as i32;
    let end = max.log10().floor() as i32 + 1;
    let per = bins_per_decade as i32;
    let nbins = ((end - start) * per) as usize;
    let edge = |k: usize| 10f64.powf(start as f64 + k as f64 / per as f64);
    let mut counts = vec![0usize; nbins];
    for m in positive {
        let k = ((m.log10() - start as f64) * per as f64).floor() as usize;
        counts[k.min(nbins - 1)] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (edge(k), edge(k + 1), c))
        .collect()
}
