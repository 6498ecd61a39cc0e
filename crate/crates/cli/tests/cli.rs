//! End-to-end tests of the binary: output contracts, exit codes,
//! round-trips and determinism across worker counts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn jlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jlab"))
}

fn run(args: &[&str]) -> Output {
    jlab().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn alpha_petersen() {
    let out = run(&["alpha", "--n", "5", "--r", "2", "--s", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("alpha=4 witness="), "got: {text}");
    assert!(text.contains("optimal=true"));
}

#[test]
fn bounds_p0_value() {
    let out = run(&["bounds", "p0", "--n", "20", "--r", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "p0=0.082267");
}

#[test]
fn exit_codes() {
    // Unknown subcommand: usage text, exit 1.
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    // Vertex budget exceeded: exit 2, message names the vertex count.
    let out = run(&["alpha", "--n", "30", "--r", "10", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("30045015"));
    // Domain error: exit 1.
    let out = run(&["bounds", "p0", "--n", "6", "--r", "3"]);
    assert_eq!(out.status.code(), Some(1));
    // Help: exit 0.
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn graph_export_reimport_hash_roundtrip() {
    let dir = std::env::temp_dir();
    let path: PathBuf = dir.join("jlab_cli_test_graph.txt");
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "graph", "export", "--n", "6", "--r", "3", "--s", "1", "--p", "0.5", "--seed", "42",
        "--out", path_str,
    ]);
    assert!(out.status.success());
    let exported_hash = String::from_utf8_lossy(&out.stderr)
        .trim()
        .to_string();
    assert!(exported_hash.starts_with("hash=0x"));
    let out = run(&["graph", "hash", "--file", path_str]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), exported_hash);
    // The exported file carries the n r s p seed header.
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.trim() == "6 3 1 0.5 42"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn graph_build_deterministic_across_thread_counts() {
    let build = |threads: &str| {
        let out = jlab()
            .env("JLAB_THREADS", threads)
            .args(["graph", "build", "--n", "8", "--r", "3", "--s", "1"])
            .output()
            .unwrap();
        assert!(out.status.success());
        stdout(&out)
    };
    assert_eq!(build("1"), build("4"));
}

#[test]
fn family_commands() {
    let dir = std::env::temp_dir();
    let path = dir.join("jlab_cli_test_family.txt");
    let mut text = String::from("n=10 r=4\n");
    // The full star on {9,10} plus one outside member.
    for a in 1..=8u32 {
        for b in a + 1..=8 {
            text.push_str(&format!("{a} {b} 9 10\n"));
        }
    }
    text.push_str("3 4 5 6\n");
    std::fs::write(&path, text).unwrap();
    let path_str = path.to_str().unwrap();

    let out = run(&["family", "analyze", "--file", path_str]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["size"], 29);
    assert_eq!(v["d"], 28);
    assert_eq!(v["x"], 1);
    assert_eq!(v["iX"], 4);
    assert_eq!(v["center"][0], 9);

    let out = run(&["family", "ess", "--file", path_str]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("n=10 r=4"));

    let out = run(&["family", "bj", "--file", path_str]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["anchors"], serde_json::json!([3, 4, 5, 6]));
    std::fs::remove_file(&path).ok();
}

#[test]
fn mc_sweep_reproducible_and_headed() {
    let args = [
        "mc", "sweep", "--n", "5", "--r", "2", "--s", "0", "--trials", "80", "--p-grid",
        "0.2,0.6", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("# jlab mc sweep format=1 stream=mix64-v1"));
    assert!(text.contains("master_seed=7"));
    assert!(text.contains("n,r,s,p,trials,successes,unknowns,rate,ci_lo,ci_hi,master_seed"));
}

#[test]
fn bounds_union_bound_scan_reports_crossing() {
    let out = run(&["bounds", "union-bound", "--r", "4", "--max-n", "2000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("crossing_below_one=None"), "got: {text}");
}

#[test]
fn verify_all_passes() {
    let out = run(&["verify", "all"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 9, "got: {text}");
    assert!(text.contains("all 9 checks passed"));
}
