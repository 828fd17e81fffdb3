//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; unknown keys are errors. Command-line overrides are applied
//! with [`ExperimentConfig::set`] after the file is read, so they win.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use fpa::fpa::{BranchRule, LevyMode};
use fpa::markov::{MoveDirection, DEFAULT_STATE_CAP};
use fpa::objectives::Benchmark;
use fpa::{FpaParams, LevyParams, Variant};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub dimension: usize,
    pub population_size: usize,
    pub switch_probability: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub s0: f64,
    pub levy_scale: f64,
    pub levy_mode: LevyMode,
    pub max_iterations: usize,
    pub seed: u64,
    pub variant: Variant,
    pub accept_on_equal: bool,
    pub branch_rule: BranchRule,
    pub epsilon: f64,
    pub num_runs: usize,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub include_timing: bool,
    pub levy_samples: usize,
    pub lattice: String,
    pub pollen_count: usize,
    pub direction: MoveDirection,
    pub verify_steps: usize,
    pub homogeneity_samples: usize,
    pub trajectories: usize,
    pub state_cap: usize,
    pub matrix: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = FpaParams::default();
        Self {
            problems: Benchmark::ALL
                .iter()
                .map(|b| b.name().to_string())
                .collect(),
            dimension: 4,
            population_size: p.population_size,
            switch_probability: p.switch_probability,
            gamma: p.gamma,
            lambda: p.levy.lambda(),
            s0: p.levy.s0(),
            levy_scale: p.levy.scale(),
            levy_mode: p.levy_mode,
            max_iterations: p.max_iterations,
            seed: p.seed,
            variant: p.variant,
            accept_on_equal: p.accept_on_equal,
            branch_rule: p.branch_rule,
            epsilon: 1e-4,
            num_runs: 100,
            out: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
            include_timing: false,
            levy_samples: 1_000_000,
            lattice: "line-5".to_string(),
            pollen_count: 1,
            direction: MoveDirection::TowardG,
            verify_steps: 1000,
            homogeneity_samples: 10_000,
            trajectories: 100_000,
            state_cap: DEFAULT_STATE_CAP,
            matrix: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("invalid value `{value}` for `{key}`: expected true or false"),
    }
}

/// Parses a kebab-case enum through its serde representation.
fn parse_enum<T: serde::de::DeserializeOwned>(key: &str, value: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(value.to_string()))
        .map_err(|_| anyhow!("invalid value `{value}` for `{key}`"))
}

fn enum_name<T: Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("unit enums serialize to strings"),
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "problems" | "problem" => {
                self.problems = split_list(value);
                if self.problems.is_empty() {
                    bail!("`{key}` needs at least one problem name");
                }
            }
            "dimension" => self.dimension = parse(key, value)?,
            "population_size" => self.population_size = parse(key, value)?,
            "switch_probability" => self.switch_probability = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "s0" => self.s0 = parse(key, value)?,
            "levy_scale" => self.levy_scale = parse(key, value)?,
            "levy_mode" => self.levy_mode = parse_enum(key, value)?,
            "max_iterations" => self.max_iterations = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "variant" => self.variant = parse_enum(key, value)?,
            "accept_on_equal" => self.accept_on_equal = parse_bool(key, value)?,
            "branch_rule" => self.branch_rule = parse_enum(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "num_runs" => self.num_runs = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "formats" | "format" => {
                self.formats = split_list(value)
                    .iter()
                    .map(|f| match f.as_str() {
                        "csv" => Ok(Format::Csv),
                        "json" => Ok(Format::Json),
                        other => Err(anyhow!(
                            "unknown output format `{other}` (expected csv or json)"
                        )),
                    })
                    .collect::<Result<_>>()?;
                self.formats.dedup();
            }
            "include_timing" => self.include_timing = parse_bool(key, value)?,
            "levy_samples" => self.levy_samples = parse(key, value)?,
            "lattice" => self.lattice = value.to_string(),
            "pollen_count" => self.pollen_count = parse(key, value)?,
            "direction" => self.direction = parse_enum(key, value)?,
            "verify_steps" => self.verify_steps = parse(key, value)?,
            "homogeneity_samples" => self.homogeneity_samples = parse(key, value)?,
            "trajectories" => self.trajectories = parse(key, value)?,
            "state_cap" => self.state_cap = parse(key, value)?,
            "matrix" => self.matrix = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => bail!("unknown configuration key `{key}`"),
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{assignment}` is not of the form key=value"))?;
        self.set(key.trim(), value)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            config
                .set(key.trim(), value)
                .with_context(|| format!("line {}", n + 1))?;
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse_text(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Serializes every key; [`parse_text`](Self::parse_text) reads it back unchanged.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("problems", self.problems.join(","));
        put("dimension", self.dimension.to_string());
        put("population_size", self.population_size.to_string());
        put("switch_probability", self.switch_probability.to_string());
        put("gamma", self.gamma.to_string());
        put("lambda", self.lambda.to_string());
        put("s0", self.s0.to_string());
        put("levy_scale", self.levy_scale.to_string());
        put("levy_mode", enum_name(&self.levy_mode));
        put("max_iterations", self.max_iterations.to_string());
        put("seed", self.seed.to_string());
        put("variant", enum_name(&self.variant));
        put("accept_on_equal", self.accept_on_equal.to_string());
        put("branch_rule", enum_name(&self.branch_rule));
        put("epsilon", self.epsilon.to_string());
        put("num_runs", self.num_runs.to_string());
        put("out", self.out.display().to_string());
        put(
            "formats",
            self.formats
                .iter()
                .map(enum_name)
                .collect::<Vec<_>>()
                .join(","),
        );
        put("include_timing", self.include_timing.to_string());
        put("levy_samples", self.levy_samples.to_string());
        put("lattice", self.lattice.clone());
        put("pollen_count", self.pollen_count.to_string());
        put("direction", enum_name(&self.direction));
        put("verify_steps", self.verify_steps.to_string());
        put("homogeneity_samples", self.homogeneity_samples.to_string());
        put("trajectories", self.trajectories.to_string());
        put("state_cap", self.state_cap.to_string());
        if let Some(m) = &self.matrix {
            put("matrix", m.display().to_string());
        }
        s
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }

    /// Optimizer parameters for this configuration.
    pub fn fpa_params(&self) -> Result<FpaParams> {
        let params = FpaParams {
            population_size: self.population_size,
            switch_probability: self.switch_probability,
            gamma: self.gamma,
            levy: LevyParams::new(self.lambda, self.s0, self.levy_scale)?,
            levy_mode: self.levy_mode,
            max_iterations: self.max_iterations,
            seed: self.seed,
            variant: self.variant,
            accept_on_equal: self.accept_on_equal,
            branch_rule: self.branch_rule,
        };
        params.validate()?;
        Ok(params)
    }
}
