//! End-to-end tests of the `fbal` binary: flag handling, exit codes,
//! output formats, reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn fbal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbal"))
        .args(args)
        .env_remove("FBAL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scenario_path(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn allocate_known_instance() {
    let out = fbal(&[
        "allocate",
        "--gains",
        "4,1",
        "--budget",
        "6",
        "--antennas",
        "3",
        "--solver",
        "exact",
        "--round",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("5.0000"), "{text}");
    assert!(text.contains("1.0000"), "{text}");
    assert!(text.contains("rounded allocation"), "{text}");
}

#[test]
fn allocate_zero_budget_single_user() {
    let out = fbal(&[
        "allocate",
        "--gains",
        "1",
        "--budget",
        "0",
        "--antennas",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    // one user, N=2: zero bits leave half the power leaking
    assert!(text.contains("5.000000e-1"), "{text}");
}

#[test]
fn allocate_lnorm_close_to_exact() {
    let exact = fbal(&[
        "allocate",
        "--gains",
        "100,10,1",
        "--budget",
        "18",
        "--antennas",
        "4",
        "--solver",
        "exact",
        "--csv",
    ]);
    let lnorm = fbal(&[
        "allocate",
        "--gains",
        "100,10,1",
        "--budget",
        "18",
        "--antennas",
        "4",
        "--solver",
        "lnorm",
        "--L",
        "100",
        "--csv",
    ]);
    assert!(exact.status.success() && lnorm.status.success());
    let parse_max = |text: &str| -> f64 {
        text.lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (e, l) = (parse_max(&stdout(&exact)), parse_max(&stdout(&lnorm)));
    assert!((e - l).abs() / e <= 0.02, "exact {e} vs lnorm {l}");
}

#[test]
fn allocate_rejects_bad_flags() {
    // unparseable gains
    let out = fbal(&[
        "allocate",
        "--gains",
        "abc",
        "--budget",
        "6",
        "--antennas",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // fractional budget with --round
    let out = fbal(&[
        "allocate",
        "--gains",
        "4,1",
        "--budget",
        "6.5",
        "--antennas",
        "3",
        "--round",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--budget"), "{}", stderr(&out));

    // invalid antenna count
    let out = fbal(&[
        "allocate",
        "--gains",
        "4,1",
        "--budget",
        "6",
        "--antennas",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // unknown solver
    let out = fbal(&[
        "allocate",
        "--gains",
        "4,1",
        "--budget",
        "6",
        "--antennas",
        "3",
        "--solver",
        "magic",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gains_in_db_convert_on_input() {
    let linear = fbal(&[
        "minbits",
        "--gains",
        "100",
        "--threshold",
        "0.5",
        "--antennas",
        "4",
        "--csv",
    ]);
    let db = fbal(&[
        "minbits",
        "--gains",
        "20",
        "--db",
        "--threshold",
        "0.5",
        "--antennas",
        "4",
        "--csv",
    ]);
    assert_eq!(stdout(&linear), stdout(&db));
}

#[test]
fn minbits_known_instance() {
    let out = fbal(&[
        "minbits",
        "--gains",
        "100",
        "--threshold",
        "0.66666666666666666",
        "--antennas",
        "3",
        "--csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = line.split(',').collect();
    assert_eq!(cells[1], "14");
    let unrounded: f64 = cells[2].parse().unwrap();
    assert!((unrounded - 13.2877).abs() < 1e-3, "{unrounded}");
}

#[test]
fn simulate_is_seed_reproducible() {
    let args = [
        "simulate",
        "--gains",
        "10",
        "--bits",
        "4",
        "--antennas",
        "4",
        "--trials",
        "300",
        "--seed",
        "99",
    ];
    let a = fbal(&args);
    let b = fbal(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));

    let c = fbal(&[
        "simulate",
        "--gains",
        "10",
        "--bits",
        "4",
        "--antennas",
        "4",
        "--trials",
        "300",
        "--seed",
        "100",
    ]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn simulate_seed_env_default() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fbal"));
        cmd.args([
            "simulate",
            "--gains",
            "10",
            "--bits",
            "4",
            "--antennas",
            "4",
            "--trials",
            "200",
        ]);
        match env {
            Some(v) => cmd.env("FBAL_SEED", v),
            None => cmd.env_remove("FBAL_SEED"),
        };
        cmd.output().unwrap()
    };
    let seeded = run(Some("77"));
    let explicit = fbal(&[
        "simulate",
        "--gains",
        "10",
        "--bits",
        "4",
        "--antennas",
        "4",
        "--trials",
        "200",
        "--seed",
        "77",
    ]);
    assert_eq!(stdout(&seeded), stdout(&explicit));
    let default = run(None);
    assert_ne!(stdout(&seeded), stdout(&default));
}

#[test]
fn simulate_reports_deviation_without_failing() {
    // the model underestimates at N=2; the tool reports, it does not gate
    let out = fbal(&[
        "simulate",
        "--gains",
        "1",
        "--bits",
        "4",
        "--antennas",
        "2",
        "--trials",
        "500",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().nth(1).unwrap();
    let cells: Vec<&str> = line.split(',').collect();
    let predicted: f64 = cells[2].parse().unwrap();
    let measured: f64 = cells[3].parse().unwrap();
    assert!(measured > 2.0 * predicted, "{line}");
}

#[test]
fn figure_writes_csv_and_validates() {
    let dir = std::env::temp_dir().join("fbal_cli_fig");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig1.csv");
    let out = fbal(&["figure", "--id", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("# fbal sweep schema v1\n"));

    // exact-solver objective column is non-increasing per antenna count
    for n in ["4", "8"] {
        let series: Vec<f64> = csv
            .lines()
            .skip(2)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|c| c[0] == n && c[3] == "exact")
            .map(|c| c[8].parse().unwrap())
            .collect();
        assert!(!series.is_empty());
        assert!(series.windows(2).all(|w| w[1] <= w[0]), "{series:?}");
    }
    std::fs::remove_file(&path).ok();
}

#[test]
fn figure_rejects_unknown_id() {
    let out = fbal(&["figure", "--id", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("figure id"), "{}", stderr(&out));
}

#[test]
fn scenario_round_trips_and_is_reproducible() {
    let path = scenario_path("figure1.toml");
    assert!(Path::new(&path).exists());
    let a = fbal(&["scenario", "--file", &path]);
    assert!(a.status.success(), "{}", stderr(&a));
    let b = fbal(&["scenario", "--file", &path]);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stderr(&a).contains("PASS"), "{}", stderr(&a));
}

#[test]
fn scenario_parse_and_validation_errors_exit_2() {
    let dir = std::env::temp_dir().join("fbal_cli_scn");
    std::fs::create_dir_all(&dir).unwrap();

    let bad_toml = dir.join("bad.toml");
    std::fs::write(&bad_toml, "solvers = [\n").unwrap();
    let out = fbal(&["scenario", "--file", bad_toml.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("parse"), "{}", stderr(&out));

    let empty_sweep = dir.join("empty.toml");
    std::fs::write(
        &empty_sweep,
        "solvers = [\"exact\"]\n[params]\nantennas = 4\npower = 1.0\ngains = [1.0]\n[sweep]\nbudgets = []\n",
    )
    .unwrap();
    let out = fbal(&["scenario", "--file", empty_sweep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("budgets must not be empty"),
        "{}",
        stderr(&out)
    );

    let missing = dir.join("nope.toml");
    let out = fbal(&["scenario", "--file", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_2() {
    let out = fbal(&["allocate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fbal(&["not-a-command"]);
    assert_eq!(out.status.code(), Some(2));
}
