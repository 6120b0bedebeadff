use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sbl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbl"))
        .args(args)
        .current_dir(dir)
        .env_remove("SBL_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn build_reference(dir: &Path) {
    let out = sbl(
        dir,
        &["hrt", "build", "--n", "800", "--r", "35", "--t", "1", "--k", "40", "--seed", "7", "--out", "h.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn hrt_build_writes_the_guest() {
    let dir = tempfile::tempdir().unwrap();
    build_reference(dir.path());
    let h = json_file(&dir.path().join("h.json"));
    assert_eq!(h["n"], 800);
    assert_eq!(h["params"]["k"], 40);
    assert_eq!(h["params"]["broom_degree"], 9);
    assert!(!dir.path().join("h.json.tmp").exists());
}

#[test]
fn bw_bound_reports_forty() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    build_reference(d);
    let out = sbl(d, &["bw", "bound", "--in", "h.json", "--probes", "50", "--seed", "1", "--report", "bw.json"]);
    assert_eq!(code(&out), 0);
    let rep = json_file(&d.join("bw.json"));
    assert_eq!(rep["report"]["lower_bound"], 40);
    assert_eq!(rep["config"]["command"], "bw bound");
    assert_eq!(rep["config"]["args"]["probes"], 50);
    assert_eq!(rep["config"]["args"]["seed"], 1);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = sbl(dir.path(), &["hrt", "build", "--n", "800", "--frobnicate"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(code(&sbl(dir.path(), &["nosuch"])), 2);
}

#[test]
fn infeasible_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = sbl(dir.path(), &["hrt", "build", "--n", "801", "--r", "35", "--t", "1", "--k", "40", "--out", "x.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nearest feasible n: 800"));
    assert!(!dir.path().join("x.json").exists());
    let out = sbl(dir.path(), &["host", "probe-robust", "--in", "missing.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn broken_structure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    build_reference(d);
    let mut h = json_file(&d.join("h.json"));
    let edges = h["edges"].as_array_mut().unwrap();
    let i = edges
        .iter()
        .position(|e| e[0].as_u64().unwrap() < 80 && e[1].as_u64().unwrap() < 80)
        .unwrap();
    edges.remove(i);
    std::fs::write(d.join("bad.json"), h.to_string()).unwrap();
    let out = sbl(d, &["hrt", "verify", "--in", "bad.json", "--report", "v.json"]);
    assert_eq!(code(&out), 3);
    let rep = json_file(&d.join("v.json"));
    assert_eq!(rep["report"]["structure"]["passed"], false);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_sbl"))
            .args(["expander", "gen", "--k", "50", "--r", "4", "--out", "u.json"])
            .current_dir(d)
            .env("SBL_SEED", seed)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let a = run("9");
    assert_eq!(a["config"]["args"]["seed"], 9);
    assert_eq!(a, run("9"));
    assert_ne!(a["report"]["lambda"], run("10")["report"]["lambda"]);
}

#[test]
fn layered_certificate_flips_at_14() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&sbl(d, &["host", "layered", "--n", "500", "--out", "l.json"])), 0);
    for (t, want) in [("13", true), ("14", false)] {
        let out = sbl(d, &["host", "certify-nonembed", "--t", t, "--in", "l.json"]);
        assert_eq!(code(&out), 0);
        let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(rep["report"]["conclusion"], want);
        assert_eq!(rep["report"]["host_distance"], 31);
    }
}

#[test]
fn planted_host_feeds_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["hrt", "build", "--n", "800", "--r", "5", "--t", "1", "--k", "40", "--seed", "2", "--out", "g.json"];
    assert_eq!(code(&sbl(d, &args)), 0);
    let planted = ["embed", "planted", "--n", "1580", "--seed", "2", "--out", "host.json", "--partition-out", "p.json"];
    assert_eq!(code(&sbl(d, &planted)), 0);
    let out = sbl(d, &["embed", "pipeline", "--guest", "g.json", "--host", "host.json", "--seed", "2", "--report", "run.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json_file(&d.join("run.json"));
    assert_eq!(rep["report"]["outcome"]["success"], true);
    assert_eq!(rep["report"]["stages"].as_array().unwrap().len(), 9);
    let with_partition = sbl(
        d,
        &["embed", "pipeline", "--guest", "g.json", "--host", "host.json", "--partition", "p.json", "--seed", "2"],
    );
    assert_eq!(code(&with_partition), 0);
}

#[test]
fn pipeline_failure_keeps_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["hrt", "build", "--n", "800", "--r", "5", "--t", "1", "--k", "40", "--seed", "2", "--out", "g.json"];
    assert_eq!(code(&sbl(d, &args)), 0);
    let planted = ["embed", "planted", "--n", "1580", "--seed", "2", "--out", "host.json"];
    assert_eq!(code(&sbl(d, &planted)), 0);
    // a restriction share cap this small cannot be met
    let out = sbl(
        d,
        &["embed", "pipeline", "--guest", "g.json", "--host", "host.json", "--alpha", "0.01", "--report", "run.json"],
    );
    assert_eq!(code(&out), 2);
    let rep = json_file(&d.join("run.json"));
    assert_eq!(rep["report"]["outcome"]["success"], false);
    assert_eq!(rep["report"]["outcome"]["failed_stage"], "blowup");
}

#[test]
fn exact_and_dense_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c4.txt"), "4 4\n0 1\n0 3\n1 2\n2 3\n").unwrap();
    std::fs::write(d.join("k4.txt"), "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let out = sbl(d, &["embed", "exact", "--guest", "c4.txt", "--host", "k4.txt"]);
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["report"]["outcome"], "embeds");
    let out = sbl(d, &["embed", "exact", "--guest", "k4.txt", "--host", "c4.txt"]);
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["report"]["outcome"], "does_not_embed");
    let out = sbl(d, &["embed", "dense", "--guest", "c4.txt", "--host", "k4.txt", "--rho", "0.5"]);
    assert_eq!(code(&out), 0);
    let out = sbl(d, &["embed", "dense", "--guest", "k4.txt", "--host", "k4.txt"]);
    assert_eq!(code(&out), 2, "non-bipartite guest is a parameter error");
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = sbl(d, &["sweep", "--n", "800", "--r", "5", "--t", "1,5,13", "--out", "s.csv"]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(d.join("s.csv")).unwrap();
    let lower: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(7).unwrap()).collect();
    assert_eq!(lower, ["40", "18", "8"]);
    let empty = sbl(d, &["sweep", "--r", "5", "--t", "1"]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);
}

#[test]
fn bw_exact_on_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("p.txt"), "5 4\n0 1\n1 2\n2 3\n3 4\n").unwrap();
    let out = sbl(d, &["bw", "exact", "--in", "p.txt"]);
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["report"]["bandwidth"]["exact"], 1);
    std::fs::write(d.join("bad.txt"), "5 4\n0 1\n").unwrap();
    assert_eq!(code(&sbl(d, &["bw", "exact", "--in", "bad.txt"])), 2);
}
