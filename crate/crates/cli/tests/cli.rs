//! End-to-end CLI tests against the built binary.

use std::path::Path;
use std::process::{Command, Output};

fn ammlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ammlab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_cp_pool(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("pool.json");
    std::fs::write(
        &path,
        r#"{
            "kind": "constant_product",
            "fee_gamma": 1.0,
            "reserves": [
                {"asset": "alpha", "amount": 100.0},
                {"asset": "beta", "amount": 100.0}
            ]
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn quote_sell_matches_engine() {
    let dir = tempfile::tempdir().unwrap();
    write_cp_pool(dir.path());
    let out = ammlab(&["quote", "--pool", "pool.json", "--sell", "beta=10"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("output:      9.090909091 alpha"), "{stdout}");
}

#[test]
fn quote_json_round_trips_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    write_cp_pool(dir.path());
    let out = ammlab(
        &["quote", "--pool", "pool.json", "--sell", "beta=10", "--json"],
        dir.path(),
    );
    assert!(out.status.success());
    let quote: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let output = quote["output_amount"].as_f64().unwrap();
    assert!((output - 100.0 / 11.0).abs() < 1e-12);
}

#[test]
fn quote_buy_exact_output() {
    let dir = tempfile::tempdir().unwrap();
    write_cp_pool(dir.path());
    let out = ammlab(
        &["quote", "--pool", "pool.json", "--buy", "alpha=9.090909090909092", "--json"],
        dir.path(),
    );
    assert!(out.status.success());
    let quote: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((quote["input_amount"].as_f64().unwrap() - 10.0).abs() < 1e-9);
}

#[test]
fn quote_zero_amount_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write_cp_pool(dir.path());
    let out = ammlab(&["quote", "--pool", "pool.json", "--sell", "beta=0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quote_exhausted_constant_sum_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cs.json");
    std::fs::write(
        &path,
        r#"{
            "kind": "constant_sum",
            "fee_gamma": 1.0,
            "reserves": [
                {"asset": "alpha", "amount": 100.0},
                {"asset": "beta", "amount": 100.0}
            ]
        }"#,
    )
    .unwrap();
    let out = ammlab(&["quote", "--pool", "cs.json", "--buy", "alpha=150"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pool exhausted"));
}

#[test]
fn quote_requires_exactly_one_direction() {
    let dir = tempfile::tempdir().unwrap();
    write_cp_pool(dir.path());
    let out = ammlab(&["quote", "--pool", "pool.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = ammlab(
        &["quote", "--pool", "pool.json", "--sell", "beta=1", "--buy", "alpha=1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn derive_invariant_emits_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ammlab(
        &[
            "derive-invariant",
            "--rule",
            "ratio",
            "--start",
            "100,100",
            "--x-end",
            "400",
            "--steps",
            "1000",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("x,y,implied_price"));
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (x, y) = (fields[0], fields[1]);
        assert!((x * y - 10_000.0).abs() / 10_000.0 < 1e-6, "{line}");
    }
}

#[test]
fn il_curve_hits_known_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = ammlab(
        &["il-curve", "--xi-min", "0.25", "--xi-max", "4", "--points", "3"],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    // xi = 4 row: -20% loss.
    let last: Vec<f64> = rows[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 4.0).abs() < 1e-9);
    assert!((last[1] - -20.0).abs() < 1e-9);
}

#[test]
fn impact_curve_point_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = ammlab(
        &["impact-curve", "--f-max", "0.5", "--points", "1"],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let last = stdout.lines().last().unwrap();
    assert_eq!(last, "0.500000000,300.000000000");
}

#[test]
fn depth_curve_is_linear_in_f() {
    let dir = tempfile::tempdir().unwrap();
    let out = ammlab(
        &["depth-curve", "--f-max", "0.9", "--points", "9"],
        dir.path(),
    );
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    for line in stdout.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((fields[1] - fields[0] * 100.0).abs() < 1e-9);
    }
}

fn write_sim_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("sim.json");
    std::fs::write(&path, body).unwrap();
    path
}

const JUMP_CONFIG: &str = r#"{
    "pool": {
        "kind": "constant_product",
        "fee_gamma": 1.0,
        "reserves": [
            {"asset": "alpha", "amount": 100.0},
            {"asset": "beta", "amount": 100.0}
        ]
    },
    "price_process": {"kind": "csv_replay", "values": [1.0, 4.0]},
    "ticks": 1,
    "seed": 42
}"#;

#[test]
fn simulate_price_jump_realizes_closed_form_il() {
    let dir = tempfile::tempdir().unwrap();
    write_sim_config(dir.path(), JUMP_CONFIG);
    let out = ammlab(&["simulate", "--config", "sim.json", "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    let last = summary.lines().last().unwrap();
    let il: f64 = last.split(',').nth(4).unwrap().parse().unwrap();
    assert!((il - -20.0).abs() < 1e-9, "{last}");
    assert!(dir.path().join("run/events.jsonl").exists());
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    write_sim_config(dir.path(), JUMP_CONFIG);
    ammlab(&["simulate", "--config", "sim.json", "--out", "a"], dir.path());
    ammlab(&["simulate", "--config", "sim.json", "--out", "b"], dir.path());
    let a = std::fs::read(dir.path().join("a/events.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("b/events.jsonl")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn simulate_zero_sigma_has_zero_il_column() {
    let dir = tempfile::tempdir().unwrap();
    write_sim_config(
        dir.path(),
        r#"{
            "pool": {
                "kind": "constant_product",
                "fee_gamma": 1.0,
                "reserves": [
                    {"asset": "alpha", "amount": 100.0},
                    {"asset": "beta", "amount": 100.0}
                ]
            },
            "price_process": {"kind": "gbm", "s0": 1.0, "mu": 0.0, "sigma": 0.0},
            "ticks": 5,
            "seed": 1
        }"#,
    );
    let out = ammlab(&["simulate", "--config", "sim.json", "--out", "run"], dir.path());
    assert!(out.status.success());
    let summary = std::fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    for line in summary.lines().skip(1) {
        assert_eq!(line.split(',').nth(4).unwrap(), "0.000000000");
    }
}

#[test]
fn simulate_missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ammlab(&["simulate", "--config", "absent.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_respects_out_dir_env() {
    let dir = tempfile::tempdir().unwrap();
    write_sim_config(dir.path(), JUMP_CONFIG);
    let out = Command::new(env!("CARGO_BIN_EXE_ammlab"))
        .args(["simulate", "--config", "sim.json"])
        .env("AMMLAB_OUT_DIR", "from_env")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from_env/summary.csv").exists());
}

#[test]
fn replay_series_can_come_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("prices.csv"), "price\n1.0\n2.0\n4.0\n").unwrap();
    write_sim_config(
        dir.path(),
        r#"{
            "pool": {
                "kind": "constant_product",
                "fee_gamma": 1.0,
                "reserves": [
                    {"asset": "alpha", "amount": 100.0},
                    {"asset": "beta", "amount": 100.0}
                ]
            },
            "price_process": {"kind": "csv_replay", "path": "prices.csv"},
            "ticks": 2,
            "seed": 1
        }"#,
    );
    let out = ammlab(&["simulate", "--config", "sim.json", "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("run/summary.csv")).unwrap();
    let last = summary.lines().last().unwrap();
    let il: f64 = last.split(',').nth(4).unwrap().parse().unwrap();
    assert!((il - -20.0).abs() < 1e-9, "{last}");
}

#[test]
fn sweep_emits_monotone_table() {
    let dir = tempfile::tempdir().unwrap();
    write_sim_config(
        dir.path(),
        r#"{
            "pool": {
                "kind": "constant_product",
                "fee_gamma": 1.0,
                "reserves": [
                    {"asset": "alpha", "amount": 100.0},
                    {"asset": "beta", "amount": 100.0}
                ]
            },
            "price_process": {"kind": "gbm", "s0": 1.0, "mu": 0.0, "sigma": 0.0},
            "ticks": 50,
            "seed": 42
        }"#,
    );
    let out = ammlab(
        &["sweep", "--config", "sim.json", "--sigmas", "0.01,0.05,0.1", "--runs", "10"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let ils: Vec<f64> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ils.len(), 3);
    assert!(ils.windows(2).all(|w| w[1] >= w[0]), "{ils:?}");
}
