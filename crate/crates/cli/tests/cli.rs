use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn qcfa(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qcfa"))
        .args(args)
        .env_remove("QCFA_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(name)
}

fn verdict(report: &Value, record: usize, language: &str) -> String {
    report["records"][record]["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["language"] == language)
        .map(|v| v["verdict"].as_str().unwrap().to_string())
        .unwrap()
}

#[test]
fn fixture_verdicts() {
    let out = qcfa(
        &["classify", fixture("fixtures/three.fa").to_str().unwrap()],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict(&report, 0, "hairpin"), "member");
    assert_eq!(
        report["records"][0]["verdicts"][0]["evidence"]["reject_exact"],
        "0"
    );
    assert_eq!(verdict(&report, 1, "pseudoknot"), "member");
    assert_eq!(verdict(&report, 2, "pseudoknot"), "nonmember");
    assert_eq!(report["metadata"]["catalog_version"], "1");
}

#[test]
fn plain_input_from_stdin_is_detected() {
    let out = qcfa(&["classify", "--lang", "dumbbell"], "AUGC\nAGXA\n");
    assert_eq!(
        out.status.code(),
        Some(0),
        "an unmappable record is annotated, not fatal"
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["records"][0]["id"], "1");
    assert_eq!(verdict(&report, 0, "dumbbell"), "member");
    assert_eq!(
        report["records"][1]["error"],
        "invalid symbol 'X' at position 3"
    );
}

#[test]
fn empty_input_succeeds() {
    let out = qcfa(&["classify"], "");
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["records"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        qcfa(&["classify", "--lang", "stemloop"], "agga\n")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qcfa(&["classify", "--epsilon", "0.6"], "agga\n")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qcfa(&["classify", "/no/such/file"], "").status.code(),
        Some(2)
    );
    assert_eq!(
        qcfa(&["verify", "--lang", "hairpin", "--max-len", "9"], "")
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qcfa(&["frobnicate"], "").status.code(), Some(2));
}

#[test]
fn undecided_exits_one() {
    // Two coins are too few to push the error on "ag" below 0.1.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.toml");
    std::fs::write(&path, std::fs::read(golden()).unwrap()).unwrap();
    let out = qcfa(
        &["classify", "--machine-file", path.to_str().unwrap()],
        "agga\nag\n",
    );
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        report["records"][1]["verdicts"][0]["evidence"]["reject_exact"],
        "33507/128371"
    );
}

#[test]
fn export_matches_golden_file() {
    let out = qcfa(&["export", "--machine", "hairpin", "--k", "2"], "");
    assert!(out.status.success());
    let golden = std::fs::read_to_string(golden()).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn monte_carlo_is_seeded() {
    let run = |seed: &str| {
        let out = qcfa(
            &[
                "classify",
                "--lang",
                "hairpin",
                "--engine",
                "montecarlo",
                "--runs",
                "300",
                "--seed",
                seed,
            ],
            "ag\n",
        );
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["records"][0]["verdicts"][0]
            ["evidence"]
            .clone()
    };
    assert_eq!(run("5"), run("5"));
    assert_eq!(run("5")["seed"], 5);
}

#[test]
fn seed_from_environment_and_flag_precedence() {
    let seed_of = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcfa"));
        cmd.args(["classify", "--lang", "hairpin"])
            .args(args)
            .arg(fixture("fixtures/three.fa"));
        match env {
            Some(v) => cmd.env("QCFA_SEED", v),
            None => cmd.env_remove("QCFA_SEED"),
        };
        let out = cmd.output().unwrap();
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["metadata"]["config"]["seed"].clone()
    };
    assert_eq!(seed_of(&[], Some("11")), 11);
    assert_eq!(seed_of(&["--seed", "12"], Some("11")), 12);
}

#[test]
fn csv_projection() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = qcfa(
        &[
            "classify",
            "--lang",
            "hairpin,pseudoknot",
            "--csv",
            csv.to_str().unwrap(),
        ],
        ">x\nAGGA\n",
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("id,length,language,verdict"));
    assert!(lines[1].starts_with("x,4,hairpin,member,closure"));
}

#[test]
fn verify_and_bench_tables() {
    let out = qcfa(&["verify", "--lang", "hairpin", "--max-len", "3"], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("hairpin: 0 mismatches over 85 words"));

    let out = qcfa(
        &[
            "bench",
            "--machine",
            "hairpin",
            "--lengths",
            "3",
            "--k",
            "5",
        ],
        "",
    );
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(
        table
            .lines()
            .any(|l| l.contains("member ") && l.contains("1.2800e2")),
        "{table}"
    );
}

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/hairpin_k2.toml")
}
