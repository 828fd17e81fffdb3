use std::path::Path;
use std::process::{Command, Output};

use fpa_cli::config::ExperimentConfig;
use proptest::prelude::*;

fn fpa(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpa"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn single_problem_writes_one_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpa(&["run", "--problem", "sphere"], dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("trace_sphere.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iteration,best_fitness,evaluations");
    assert_eq!(lines.len(), 1002);
    let best: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
    let summary = json(&dir.path().join("run_summary.json"));
    assert_eq!(summary["spec_version"], "1.0");
    assert_eq!(summary["seed"], 1);
    assert_eq!(summary["runs"].as_array().unwrap().len(), 1);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn unknown_problem_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    let out = fpa(&["run", "--problem", "sphere,foo"], &target);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("foo"));
    assert!(!target.exists());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        "# short run\nproblems = ackley\nmax_iterations = 10\nformats = csv\nseed = 3\n",
    )
    .unwrap();
    let out = fpa(
        &[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "4",
            "--set",
            "dimension=3",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(dir.path().join("trace_ackley.csv"))
            .unwrap()
            .lines()
            .count(),
        12
    );
    assert!(!dir.path().join("run_summary.json").exists());

    std::fs::write(&cfg, "problem_count = 3\n").unwrap();
    let out = fpa(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hitprob_single_run_and_bad_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpa(
        &[
            "hitprob",
            "--problem",
            "sphere",
            "--set",
            "num_runs=1",
            "--set",
            "dimension=2",
            "--set",
            "max_iterations=50",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report = json(&dir.path().join("hitprob.json"));
    let fraction = report["results"][0]["fraction"].as_f64().unwrap();
    assert!(fraction == 0.0 || fraction == 1.0);
    assert!(report["results"][0]["ci_low"].as_f64().unwrap() <= fraction);

    let out = fpa(&["hitprob", "--set", "epsilon=0"], &dir.path().join("bad"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_fixture_with_disjoint_block_fails() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("blocks.json");
    std::fs::write(
        &fixture,
        r#"{"name": "two-blocks", "matrix": [[1,0,0,0],[0,0.5,0.5,0],[0,0.5,0.5,0],[0.5,0,0.25,0.25]], "optimal": [true,false,false,false]}"#,
    )
    .unwrap();
    let out = fpa(
        &[
            "verify",
            "--set",
            &format!("matrix={}", fixture.display()),
            "--set",
            "trajectories=1000",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("optimal_set_reachable"));
    let report = json(&dir.path().join("verify.json"));
    assert_eq!(report["passed"], false);
    let reach = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "optimal_set_reachable")
        .unwrap();
    assert_eq!(
        reach["measured"]["offending_set"],
        serde_json::json!([1, 2])
    );
}

#[test]
fn verify_refuses_oversized_chain() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    let out = fpa(
        &[
            "verify",
            "--set",
            "lattice=grid-3x3",
            "--set",
            "pollen_count=4",
        ],
        &target,
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    assert!(!target.exists());
}

#[test]
fn levy_check_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpa(
        &[
            "levy-check",
            "--set",
            "lambda=2",
            "--set",
            "levy_samples=100000",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report = json(&dir.path().join("levy_check.json"));
    assert_eq!(report["check"]["mode"], "finite-variance");
    assert!(dir.path().join("levy_histogram.csv").exists());

    let out = fpa(
        &["levy-check", "--set", "levy_samples=1000"],
        &dir.path().join("small"),
    );
    assert_eq!(out.status.code(), Some(2));
}

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    (
        proptest::sample::subsequence(
            vec!["ackley", "sphere", "rosenbrock", "yang-forest", "zakharov"],
            1..=5,
        ),
        2usize..10,
        0.0f64..=1.0,
        1e-6f64..10.0,
        1.01f64..=2.0,
        any::<u64>(),
        any::<bool>(),
        proptest::option::of("[a-z]{1,8}\\.json"),
        1e-12f64..1.0,
    )
        .prop_map(|(problems, d, p, gamma, lambda, seed, flag, matrix, eps)| {
            ExperimentConfig {
                problems: problems.into_iter().map(String::from).collect(),
                dimension: d,
                switch_probability: p,
                gamma,
                lambda,
                seed,
                include_timing: flag,
                accept_on_equal: !flag,
                matrix: matrix.map(Into::into),
                epsilon: eps,
                ..ExperimentConfig::default()
            }
        })
}

proptest! {
    #[test]
    fn config_text_round_trips(config in config_strategy()) {
        let text = config.to_text();
        let parsed = ExperimentConfig::parse_text(&text).unwrap();
        prop_assert_eq!(&parsed, &config);
        prop_assert_eq!(parsed.to_text(), text);
    }
}
