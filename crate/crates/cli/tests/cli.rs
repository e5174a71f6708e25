use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn icnoma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icnoma")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn run_five_user_reports_noma3_plus_ic() {
    let out = icnoma(&["run", scenario("five_user_explicit_groups.json").to_str().unwrap()]);
    let r = stdout_json(&out);
    assert_eq!(r["lengths"], serde_json::json!({"far": 1, "mid": 2, "near": 1}));
    assert_eq!(r["l_icnoma"], 2);
    assert_eq!(r["counts"]["noma3"], 1);
    assert_eq!(r["counts"]["ic"], 1);
    assert_eq!(r["delivery_verified"], true);
}

#[test]
fn solve_chain_gives_length_three() {
    let r = stdout_json(&icnoma(&["solve", scenario("four_user_chain.json").to_str().unwrap()]));
    assert_eq!(r["length"], 3);
    assert_eq!(r["valid"], true);
}

#[test]
fn baseline_single_slot() {
    let r = stdout_json(&icnoma(&["baseline", scenario("four_user_single_slot.json").to_str().unwrap()]));
    assert_eq!(r["l_ic"], 3);
    assert_eq!(r["l_icnoma"], 1);
}

#[test]
fn sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = icnoma(&[
        "sweep",
        scenario("seven_user_equal.json").to_str().unwrap(),
        "--grid",
        "1:5:1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("P,case_id,l_f,l_m,l_n,l_ic,l_icnoma,R_avg"));
}

#[test]
fn profile_and_power_flags_override_scenario() {
    let path = scenario("four_user_single_slot.json");
    let r = stdout_json(&icnoma(&[
        "run",
        path.to_str().unwrap(),
        "--profile",
        "0.05,0.25,0.7,0.1",
        "--power",
        "20",
        "--solver",
        "greedy",
    ]));
    assert_eq!(r["profile"]["p"], 20.0);
    assert_eq!(r["profile"]["alpha"], 0.05);
    assert_eq!(r["solver"], "greedy");
}

#[test]
fn generate_is_reproducible_and_runnable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = icnoma(&["generate", "--seed", "9", "--n", "7", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let r = stdout_json(&icnoma(&["run", a.to_str().unwrap()]));
    assert_eq!(r["delivery_verified"], true);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "users": [{"demands": [1], "cache": [2], "gain": -1.0}]}"#).unwrap();
    let out = icnoma(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("users[0].gain"));
    let out = icnoma(&["run", scenario("four_user_single_slot.json").to_str().unwrap(), "--profile", "0.5,0.3,0.2,0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oversized_exact_problem_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    let out = icnoma(&["generate", "--n", "12", "--out", big.to_str().unwrap()]);
    assert!(out.status.success());
    let out = icnoma(&["run", big.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let out = icnoma(&["run", big.to_str().unwrap(), "--solver", "greedy"]);
    assert!(out.status.success());
}

#[test]
fn property_check_passes_small_batch() {
    let out = icnoma(&["property-check", "--trials", "30", "--seed", "5"]);
    let r = stdout_json(&out);
    assert!(r.as_array().unwrap().iter().all(|o| o["violations"] == 0));
}
