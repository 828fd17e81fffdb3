//! Iteration bound for a binary genetic algorithm with mutation rate `mu`,
//! string length `l`, population `n`, to reach the optimum with probability `p`:
//!
//! `⌈ ln(1 − p) / ln(1 − min((1 − mu)^(nl), mu^(nl))) ⌉`

use crate::error::{invalid, Error, Result};

pub fn ga_iteration_bound(mu: f64, l: u32, n: u32, p: f64) -> Result<u64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(invalid("mu", format!("{mu} is outside (0, 1)")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid("p", format!("{p} is outside (0, 1)")));
    }
    if l == 0 || n == 0 {
        return Err(invalid(
            "l",
            "string length and population must be positive",
        ));
    }
    let exponent = f64::from(n) * f64::from(l);
    let q = (exponent * (-mu).ln_1p())
        .exp()
        .min((exponent * mu.ln()).exp());
    let denominator = (-q).ln_1p();
    if denominator == 0.0 {
        return Err(Error::Domain(format!(
            "per-iteration success probability {q:e} underflows; the bound is unrepresentable"
        )));
    }
    let ratio = (-p).ln_1p() / denominator;
    if !ratio.is_finite() || ratio > u64::MAX as f64 {
        return Err(Error::Domain(format!("bound {ratio:e} overflows")));
    }
    Ok(ratio.ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_case() {
        // ln(0.1) / ln(0.75) = 8.0039...
        assert_eq!(ga_iteration_bound(0.5, 2, 1, 0.9).unwrap(), 9);
    }

    #[test]
    fn monotone_in_p() {
        let mut last = 0;
        for p in [0.01, 0.1, 0.5, 0.9, 0.99, 0.999999] {
            let b = ga_iteration_bound(0.3, 3, 2, p).unwrap();
            assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn small_p_limit() {
        assert_eq!(ga_iteration_bound(0.5, 1, 1, 1e-300).unwrap(), 1);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(ga_iteration_bound(0.0, 2, 1, 0.9).is_err());
        assert!(ga_iteration_bound(1.0, 2, 1, 0.9).is_err());
        assert!(ga_iteration_bound(0.5, 2, 1, 1.0).is_err());
        assert!(ga_iteration_bound(0.5, 0, 1, 0.9).is_err());
        assert!(matches!(
            ga_iteration_bound(0.5, 2000, 1000, 0.9),
            Err(Error::Domain(_))
        ));
    }
}
