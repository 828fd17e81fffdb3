use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use fpa::fpa::{hit_estimate, run, write_trace_csv, RunSummary, SPEC_VERSION};
use fpa::markov::{
    builtin_lattice, builtin_lattices, verify, write_mass_curve_csv, ChainSource, MatrixFixture,
    VerifyOptions,
};
use fpa::rng::{DrawSource, LevyParams, RngState};
use fpa::stats::{excess_kurtosis, log_histogram, survival_tail_slope, variance, TailFit};
use fpa::ProblemSpec;
use serde::Serialize;
use serde_json::json;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::{ExperimentConfig, Format};
use crate::output::{json_bytes, OutputSet};

/// Smallest sample count accepted by the Lévy check.
pub const MIN_LEVY_SAMPLES: usize = 100_000;
/// Allowed distance between the fitted tail slope and `-lambda`.
pub const TAIL_TOLERANCE: f64 = 0.15;

#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub written: Vec<PathBuf>,
}

/// Resolves every configured problem before anything runs.
fn resolve_problems(config: &ExperimentConfig) -> Result<Vec<ProblemSpec>> {
    config
        .problems
        .iter()
        .map(|name| ProblemSpec::by_name(name, config.dimension).map_err(Into::into))
        .collect()
}

pub fn cmd_run(config: &ExperimentConfig) -> Result<Outcome> {
    let specs = resolve_problems(config)?;
    let params = config.fpa_params()?;
    let mut out = OutputSet::default();
    let mut summaries = Vec::new();
    for spec in &specs {
        let result = run(spec, &params)?;
        println!(
            "{:<12} initial {:.6e}  final {:.6e}  ({} iterations)",
            spec.name(),
            result.initial_best_fitness(),
            result.best_fitness(),
            result.final_state.iteration
        );
        if config.wants(Format::Csv) {
            let mut csv = Vec::new();
            write_trace_csv(&result.trace, &mut csv)?;
            out.add(format!("trace_{}.csv", spec.name()), csv);
        }
        summaries.push(RunSummary::from_result(&result, config.include_timing));
    }
    if config.wants(Format::Json) {
        let doc = json!({
            "spec_version": SPEC_VERSION,
            "command": "run",
            "seed": config.seed,
            "config": config,
            "runs": summaries,
        });
        out.add("run_summary.json", json_bytes(&doc)?);
    }
    Ok(Outcome {
        passed: true,
        written: out.commit(&config.out)?,
    })
}

#[derive(Debug, Serialize)]
struct HitRow {
    problem: String,
    dimension: usize,
    successes: usize,
    runs: usize,
    fraction: f64,
    ci_low: f64,
    ci_high: f64,
}

pub fn cmd_hitprob(config: &ExperimentConfig) -> Result<Outcome> {
    if !(config.epsilon > 0.0) {
        bail!("epsilon must be positive, got {}", config.epsilon);
    }
    if config.num_runs == 0 {
        bail!("num_runs must be at least 1");
    }
    let specs = resolve_problems(config)?;
    let params = config.fpa_params()?;
    let z = Normal::standard().inverse_cdf(0.975);
    let mut rows = Vec::new();
    for spec in &specs {
        let est = hit_estimate(spec, &params, config.epsilon, config.num_runs, config.seed)?;
        let (ci_low, ci_high) = fpa::stats::wilson_interval(est.successes, est.runs, z);
        println!(
            "{:<12} {}/{} runs within {:e}: {:.4} (95% CI {:.4}..{:.4})",
            spec.name(),
            est.successes,
            est.runs,
            config.epsilon,
            est.fraction(),
            ci_low,
            ci_high
        );
        rows.push(HitRow {
            problem: spec.name().to_string(),
            dimension: spec.dimension(),
            successes: est.successes,
            runs: est.runs,
            fraction: est.fraction(),
            ci_low,
            ci_high,
        });
    }
    let mut out = OutputSet::default();
    if config.wants(Format::Csv) {
        let mut csv = String::from("problem,dimension,successes,runs,fraction,ci_low,ci_high\n");
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{:e},{:e},{:e}\n",
                r.problem, r.dimension, r.successes, r.runs, r.fraction, r.ci_low, r.ci_high
            ));
        }
        out.add("hitprob.csv", csv.into_bytes());
    }
    if config.wants(Format::Json) {
        let doc = json!({
            "spec_version": SPEC_VERSION,
            "command": "hitprob",
            "seed": config.seed,
            "epsilon": config.epsilon,
            "num_runs": config.num_runs,
            "confidence": 0.95,
            "interval": "wilson",
            "params": params,
            "results": rows,
        });
        out.add("hitprob.json", json_bytes(&doc)?);
    }
    Ok(Outcome {
        passed: true,
        written: out.commit(&config.out)?,
    })
}

fn chain_source(config: &ExperimentConfig) -> Result<ChainSource> {
    if let Some(path) = &config.matrix {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let fixture: MatrixFixture = serde_json::from_str(&text)
            .with_context(|| format!("parsing matrix fixture {}", path.display()))?;
        return Ok(ChainSource::Fixture(fixture));
    }
    let lattice = builtin_lattice(&config.lattice).ok_or_else(|| {
        let names: Vec<String> = builtin_lattices()
            .iter()
            .map(|l| l.name().to_string())
            .collect();
        anyhow!(
            "unknown lattice `{}` (expected one of: {})",
            config.lattice,
            names.join(", ")
        )
    })?;
    Ok(ChainSource::Lattice {
        lattice,
        n: config.pollen_count,
        p: config.switch_probability,
        direction: config.direction,
    })
}

pub fn cmd_verify(config: &ExperimentConfig) -> Result<Outcome> {
    let source = chain_source(config)?;
    let options = VerifyOptions {
        steps: config.verify_steps,
        homogeneity_samples: config.homogeneity_samples,
        trajectories: config.trajectories,
        seed: config.seed,
        state_cap: config.state_cap,
        ..VerifyOptions::default()
    };
    let outcome = verify(&source, &options)?;
    for c in &outcome.report.checks {
        println!("{:<28} {}", c.name, if c.passed { "pass" } else { "FAIL" });
    }
    if !outcome.report.passed {
        eprintln!("failed checks: {}", outcome.report.failed_checks.join(", "));
    }
    let mut out = OutputSet::default();
    if config.wants(Format::Csv) {
        let mut csv = Vec::new();
        write_mass_curve_csv(&outcome.mass_curve, &mut csv)?;
        out.add("mass_on_optimal.csv", csv);
    }
    if config.wants(Format::Json) {
        out.add("verify.json", json_bytes(&outcome.report)?);
    }
    Ok(Outcome {
        passed: outcome.report.passed,
        written: out.commit(&config.out)?,
    })
}

/// Variance of the two halves of the sample, and excess kurtosis.
#[derive(Debug, Serialize)]
struct FiniteVariance {
    first_half_variance: f64,
    second_half_variance: f64,
    relative_difference: f64,
    excess_kurtosis: f64,
}

const VARIANCE_AGREEMENT: f64 = 0.05;
const MAX_KURTOSIS: f64 = 1.0;

pub fn cmd_levy_check(config: &ExperimentConfig) -> Result<Outcome> {
    if config.levy_samples < MIN_LEVY_SAMPLES {
        bail!(
            "levy_samples must be at least {MIN_LEVY_SAMPLES}, got {}",
            config.levy_samples
        );
    }
    let params = LevyParams::new(config.lambda, config.s0, config.levy_scale)?;
    let mut rng = RngState::new(config.seed);
    let samples: Vec<f64> = (0..config.levy_samples)
        .map(|_| rng.levy_step(&params))
        .collect();

    let (passed, detail) = if params.is_gaussian_limit() {
        let (a, b) = samples.split_at(samples.len() / 2);
        let (va, vb) = (variance(a), variance(b));
        let fv = FiniteVariance {
            first_half_variance: va,
            second_half_variance: vb,
            relative_difference: (va - vb).abs() / va.max(vb),
            excess_kurtosis: excess_kurtosis(&samples),
        };
        let passed = fv.relative_difference <= VARIANCE_AGREEMENT
            && fv.excess_kurtosis.abs() <= MAX_KURTOSIS;
        println!(
            "lambda 2: variance {va:.4} / {vb:.4}, excess kurtosis {:.4}: {}",
            fv.excess_kurtosis,
            if passed { "pass" } else { "FAIL" }
        );
        (
            passed,
            json!({ "mode": "finite-variance", "finite_variance": fv }),
        )
    } else {
        let fit: TailFit = survival_tail_slope(&samples)
            .ok_or_else(|| anyhow!("too few samples in the tail window"))?;
        let passed = (fit.slope + params.lambda()).abs() <= TAIL_TOLERANCE;
        println!(
            "lambda {}: tail slope {:.4} (expected {:.4} ± {TAIL_TOLERANCE}): {}",
            params.lambda(),
            fit.slope,
            -params.lambda(),
            if passed { "pass" } else { "FAIL" }
        );
        (
            passed,
            json!({
                "mode": "tail",
                "slope": fit.slope,
                "intercept": fit.intercept,
                "fit_points": fit.points,
                "expected_slope": -params.lambda(),
                "tolerance": TAIL_TOLERANCE,
                "survival_window": fpa::stats::TAIL_WINDOW,
            }),
        )
    };

    let mut out = OutputSet::default();
    if config.wants(Format::Csv) {
        let mut csv = String::from("lower,upper,count\n");
        for (lo, hi, count) in log_histogram(&samples, 10) {
            csv.push_str(&format!("{lo:e},{hi:e},{count}\n"));
        }
        out.add("levy_histogram.csv", csv.into_bytes());
    }
    if config.wants(Format::Json) {
        let doc = json!({
            "spec_version": SPEC_VERSION,
            "command": "levy-check",
            "seed": config.seed,
            "lambda": params.lambda(),
            "s0": params.s0(),
            "scale": params.scale(),
            "samples": config.levy_samples,
            "passed": passed,
            "check": detail,
        });
        out.add("levy_check.json", json_bytes(&doc)?);
    }
    Ok(Outcome {
        passed,
        written: out.commit(&config.out)?,
    })
}
