use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::LevyParams;

/// Which update rule drives an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Global Lévy move or local difference move, chosen per pollen.
    Full,
    /// Global move with probability `p`, otherwise stay.
    Simplified,
}

/// How the uniform draw `r` is compared with the switch probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    /// Global move when `r < p`, so `p` is the probability of a global move.
    GlobalBelow,
    /// Global move when `r > p`. Kept for ablation.
    GlobalAbove,
}

impl BranchRule {
    pub fn takes_global(self, r: f64, p: f64) -> bool {
        match self {
            BranchRule::GlobalBelow => r < p,
            BranchRule::GlobalAbove => r > p,
        }
    }
}

/// Whether a global move draws one Lévy step per coordinate or one shared scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevyMode {
    PerCoordinate,
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpaParams {
    pub population_size: usize,
    pub switch_probability: f64,
    /// Step scale γ of the global move.
    pub gamma: f64,
    pub levy: LevyParams,
    pub levy_mode: LevyMode,
    pub max_iterations: usize,
    pub seed: u64,
    pub variant: Variant,
    /// Replace a position by a candidate of equal fitness.
    pub accept_on_equal: bool,
    pub branch_rule: BranchRule,
}

impl Default for FpaParams {
    fn default() -> Self {
        Self {
            population_size: 20,
            switch_probability: 0.8,
            gamma: 0.1,
            levy: LevyParams::default(),
            levy_mode: LevyMode::PerCoordinate,
            max_iterations: 1000,
            seed: 1,
            variant: Variant::Full,
            accept_on_equal: true,
            branch_rule: BranchRule::GlobalBelow,
        }
    }
}

impl FpaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(invalid("population_size", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.switch_probability) {
            return Err(invalid(
                "switch_probability",
                format!("{} is outside [0, 1]", self.switch_probability),
            ));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid("gamma", "must be a non-negative finite number"));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        FpaParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let base = FpaParams::default();
        for bad in [
            FpaParams {
                population_size: 0,
                ..base
            },
            FpaParams {
                switch_probability: 1.5,
                ..base
            },
            FpaParams {
                switch_probability: f64::NAN,
                ..base
            },
            FpaParams {
                gamma: -0.1,
                ..base
            },
            FpaParams {
                max_iterations: 0,
                ..base
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn branch_rules() {
        assert!(BranchRule::GlobalBelow.takes_global(0.999, 1.0));
        assert!(!BranchRule::GlobalBelow.takes_global(0.0, 0.0));
        assert!(BranchRule::GlobalAbove.takes_global(0.9, 0.8));
        assert!(!BranchRule::GlobalAbove.takes_global(0.5, 0.8));
    }
}
