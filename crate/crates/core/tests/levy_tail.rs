use fpa::rng::{DrawSource, LevyParams, RngState};
use fpa::stats::{excess_kurtosis, survival_tail_slope, variance};

fn samples(lambda: f64, n: usize, seed: u64) -> Vec<f64> {
    let params = LevyParams::new(lambda, 0.01, 1.0).unwrap();
    let mut rng = RngState::new(seed);
    (0..n).map(|_| rng.levy_step(&params)).collect()
}

#[test]
fn tail_slope_tracks_lambda() {
    for (lambda, seed) in [(1.3, 11), (1.5, 12), (1.9, 13)] {
        let fit = survival_tail_slope(&samples(lambda, 1_000_000, seed)).unwrap();
        assert!(
            (fit.slope + lambda).abs() <= 0.15,
            "lambda {lambda}: slope {:.4}",
            fit.slope
        );
    }
}

#[test]
fn gaussian_limit_has_light_tails() {
    let gauss = samples(2.0, 200_000, 5);
    assert!(excess_kurtosis(&gauss).abs() < 0.2);
    assert!((variance(&gauss) - 2.0).abs() < 0.05);
    let heavy = samples(1.5, 200_000, 5);
    assert!(excess_kurtosis(&heavy) > 10.0);
}

#[test]
fn steps_respect_cutoff_and_scale() {
    let params = LevyParams::new(1.5, 0.5, 3.0).unwrap();
    let mut rng = RngState::new(9);
    for _ in 0..100_000 {
        let s = rng.levy_step(&params);
        assert!(s.is_finite() && s.abs() >= 0.5);
    }
}
