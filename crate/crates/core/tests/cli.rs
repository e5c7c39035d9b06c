use std::process::{Command, Output};

use polar_sched::codec::CodeSpec;

const BIN: &str = env!("CARGO_BIN_EXE_polar-sched");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn schedule_formats_match_fixtures() {
    for (format, fixture) in [
        ("text", include_str!("fixtures/schedule_n3.txt")),
        ("csv", include_str!("fixtures/schedule_n3.csv")),
        ("json", include_str!("fixtures/schedule_n3.json")),
    ] {
        for method in ["online", "tree", "recursive"] {
            let out = run(&[
                "schedule", "--n", "3", "--method", method, "--format", format,
            ]);
            assert!(out.status.success());
            assert_eq!(stdout(&out), fixture, "{method} {format}");
        }
    }
}

#[test]
fn schedule_range_guard() {
    assert_eq!(run(&["schedule", "--n", "33"]).status.code(), Some(2));
    assert_eq!(
        run(&["schedule", "--n", "3", "--method", "dfs"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn schedule_n1_recursive() {
    let out = run(&[
        "schedule",
        "--n",
        "1",
        "--method",
        "recursive",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&out), "cc,entry,emit\n1,f1,\n2,f2,u1\n3,g2,u2\n");
}

#[test]
fn large_online_schedule_streams() {
    let out = run(&["schedule", "--n", "16"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), (2 << 16) - 1);
    assert_eq!(text.lines().last(), Some("g65536 -> u65536"));
}

#[test]
fn schedule_compare() {
    let out = run(&["schedule-compare", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["schedule-compare", "--n", "3"]);
    assert!(stdout(&out).contains("15 entries"));
    let out = run(&["schedule-compare", "--n", "5", "--inject-fault", "40"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("clock cycle 40"));
}

#[test]
fn zfactor_sweep() {
    let out = run(&[
        "zfactor",
        "--check-upto",
        "1048576",
        "--index",
        "5",
        "--index",
        "1",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("z(5) = 2"));
    assert!(text.contains("z(1) = 3"));
    assert!(text.contains("i=1"));
}

#[test]
fn memory_table() {
    let out = run(&["memory", "--n", "3", "--n", "10", "--n", "20"]);
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows[0], ["3", "8", "45", "160"]);
    assert_eq!(rows[1], ["10", "1024", "10235", "160"]);
    assert_eq!(rows[2][2], (2_097_151u64 * 6).to_string());
}

#[test]
fn verify_deps() {
    let out = run(&["verify-deps", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["closed_form"]["elements_checked"].as_u64().unwrap() > 1000);
    assert!(v["stage_sharing"]["frames"].as_u64().unwrap() > 0);
    assert_eq!(run(&["verify-deps", "--n-max", "7"]).status.code(), Some(2));
}

#[test]
fn construct_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.json");
    let p = path.to_str().unwrap();
    let out = run(&[
        "construct",
        "--n",
        "6",
        "--k",
        "32",
        "--frozen-ones",
        "-o",
        p,
    ]);
    assert!(out.status.success());
    let spec = CodeSpec::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(spec.k(), 32);
    assert!(spec.frozen_values().values().all(|&b| b == 1));

    let args = [
        "simulate",
        "--spec",
        p,
        "--channel",
        "bsc:1e-12",
        "--frames",
        "500",
        "--seed",
        "3",
    ];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("param,frames,bit_err,frame_err,ber,fer,seconds,seed")
    );
    assert_eq!(lines.next(), Some("bsc:0.000000000001,500,0,0,0e0,0e0,,3"));
    assert_eq!(run(&args).stdout, a.stdout);

    let json = run(&[
        "simulate",
        "--spec",
        p,
        "--channel",
        "awgn:2",
        "--frames",
        "50",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v[0]["frames"], 50);
    assert_eq!(v[0]["seconds"], serde_json::Value::Null);
}

#[test]
fn simulate_bad_inputs() {
    assert_eq!(
        run(&[
            "simulate",
            "--spec",
            "/no/such/file.json",
            "--channel",
            "awgn:1"
        ])
        .status
        .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.json");
    std::fs::write(&path, "{\"n\": 2}").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&["simulate", "--spec", p, "--channel", "awgn:1"])
            .status
            .code(),
        Some(2)
    );
    let out = Command::new(BIN)
        .env("POLAR_SCHED_THREADS", "zero")
        .args(["simulate", "--spec", p, "--channel", "awgn:1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn roundtrip_examples() {
    let out = run(&["roundtrip", "--n", "10", "--trials", "1000", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(
        run(&["roundtrip", "--n", "1", "--trials", "10", "--seed", "0"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&[
            "roundtrip",
            "--n",
            "8",
            "--trials",
            "50",
            "--frozen",
            "ones"
        ])
        .status
        .code(),
        Some(0)
    );
}
