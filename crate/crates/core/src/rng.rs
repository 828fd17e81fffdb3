//! Seedable random source and Lévy-stable step sampler.
//!
//! [`RngState`] wraps a ChaCha8 stream, which is reproducible bit-for-bit on
//! every platform for a given 64-bit seed. Every public draw consumes a fixed
//! number of 64-bit words from the main stream:
//!
//! | operation                     | words |
//! |-------------------------------|-------|
//! | [`DrawSource::uniform`]       | 1     |
//! | [`DrawSource::index`]         | 1     |
//! | [`DrawSource::levy_step`]     | 1     |
//! | [`DrawSource::levy_vector`]   | `d`   |
//!
//! A Lévy step takes a single word as the key of a private SplitMix64
//! sub-stream and performs its rejection loop there, so the resampling of
//! small steps never shifts the position of the main stream.
//!
//! Steps follow Mantegna's algorithm: `u / |v|^(1/λ)` with
//! `u ~ N(0, σ_u²)`, `v ~ N(0, 1)` and
//!
//! ```text
//! σ_u = [ Γ(1+λ) sin(πλ/2) / ( Γ((1+λ)/2) λ 2^((λ-1)/2) ) ]^(1/λ)
//! ```
//!
//! The magnitude is multiplied by `scale`, then by an independent fair sign.
//! At λ = 2 the formula degenerates (σ_u = 0); the stable law there is
//! Gaussian and the sampler draws `√2 · N(0, 1)` instead.
//! Magnitudes below `s0` (or non-finite ones) are redrawn up to
//! [`MAX_RESAMPLES`] times, then clamped to `s0`.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};

/// Redraws allowed for a step whose magnitude falls below `s0`.
pub const MAX_RESAMPLES: usize = 8;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn unit_from_word(word: u64) -> f64 {
    (word >> 11) as f64 * TWO_POW_NEG_53
}

/// Parameters of the Lévy step distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLevyParams", into = "RawLevyParams")]
pub struct LevyParams {
    lambda: f64,
    s0: f64,
    scale: f64,
    sigma_u: f64,
}

#[derive(Serialize, Deserialize)]
struct RawLevyParams {
    lambda: f64,
    s0: f64,
    scale: f64,
}

impl TryFrom<RawLevyParams> for LevyParams {
    type Error = Error;

    fn try_from(raw: RawLevyParams) -> Result<Self> {
        LevyParams::new(raw.lambda, raw.s0, raw.scale)
    }
}

impl From<LevyParams> for RawLevyParams {
    fn from(p: LevyParams) -> Self {
        RawLevyParams {
            lambda: p.lambda,
            s0: p.s0,
            scale: p.scale,
        }
    }
}

impl LevyParams {
    /// Validates `1 < lambda <= 2`, `s0 > 0` and `scale > 0`.
    pub fn new(lambda: f64, s0: f64, scale: f64) -> Result<Self> {
        if !(lambda > 1.0 && lambda <= 2.0) {
            return Err(invalid("lambda", format!("{lambda} is outside (1, 2]")));
        }
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(invalid(
                "s0",
                format!("{s0} must be a positive finite number"),
            ));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(
                "scale",
                format!("{scale} must be a positive finite number"),
            ));
        }
        Ok(Self {
            lambda,
            s0,
            scale,
            sigma_u: mantegna_sigma(lambda),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Standard deviation of the numerator normal in Mantegna's ratio.
    pub fn sigma_u(&self) -> f64 {
        self.sigma_u
    }

    pub fn is_gaussian_limit(&self) -> bool {
        self.lambda == 2.0
    }
}

impl Default for LevyParams {
    fn default() -> Self {
        Self::new(1.5, 0.01, 1.0).expect("default Lévy parameters are valid")
    }
}

/// Mantegna's numerator scale for tail exponent `lambda`.
pub fn mantegna_sigma(lambda: f64) -> f64 {
    let num = gamma(1.0 + lambda) * (PI * lambda / 2.0).sin();
    let den = gamma((1.0 + lambda) / 2.0) * lambda * 2f64.powf((lambda - 1.0) / 2.0);
    (num / den).max(0.0).powf(1.0 / lambda)
}

/// Source of every random number the optimizer consumes.
///
/// The engine is generic over this trait so tests can inject scripted draws.
pub trait DrawSource {
    /// Uniform real in `[0, 1)`.
    fn uniform(&mut self) -> f64;

    /// Signed Lévy step.
    fn levy_step(&mut self, params: &LevyParams) -> f64;

    /// Uniform index in `0..n`. `n` must be positive.
    fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// `d` independent signed Lévy steps.
    fn levy_vector(&mut self, params: &LevyParams, d: usize) -> Result<Vec<f64>> {
        if d == 0 {
            return Err(invalid("d", "Lévy vector dimension must be at least 1"));
        }
        Ok((0..d).map(|_| self.levy_step(params)).collect())
    }
}

/// Deterministic seedable generator owned by a single run.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_word(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

impl DrawSource for RngState {
    fn uniform(&mut self) -> f64 {
        unit_from_word(self.next_word())
    }

    fn levy_step(&mut self, params: &LevyParams) -> f64 {
        let key = self.next_word();
        sample_levy(&mut SplitMix64(key), params)
    }
}

/// Seed of the `stream`-th independent sub-stream of `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut s = SplitMix64(base ^ stream.wrapping_mul(0xD134_2543_DE82_EF95));
    s.next_u64()
}

/// Sub-stream generator for the rejection loop of a single Lévy step.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        unit_from_word(self.next_u64())
    }

    /// Box-Muller, one normal per two uniforms.
    fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }
}

fn levy_magnitude(sub: &mut SplitMix64, params: &LevyParams) -> f64 {
    if params.is_gaussian_limit() {
        return params.scale * (2f64.sqrt() * sub.standard_normal()).abs();
    }
    let u = params.sigma_u * sub.standard_normal();
    let v = sub.standard_normal();
    params.scale * u.abs() / v.abs().powf(1.0 / params.lambda)
}

fn sample_levy(sub: &mut SplitMix64, params: &LevyParams) -> f64 {
    let mut magnitude = params.s0;
    for _ in 0..=MAX_RESAMPLES {
        let m = levy_magnitude(sub, params);
        if m.is_finite() && m >= params.s0 {
            magnitude = m;
            break;
        }
    }
    if sub.next_u64() >> 63 == 1 {
        -magnitude
    } else {
        magnitude
    }
}
