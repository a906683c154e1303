//! End-to-end tests for the `backbone` binary.

use std::path::Path;
use std::process::{Command, Output};

fn backbone(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_backbone"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to launch the backbone binary")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed with {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
}

fn write_input(dir: &Path) {
    std::fs::write(
        dir.join("b.csv"),
        ",w,x,y,z\na,1,1,0,0\nb,1,0,1,0\nc,0,1,1,1\nd,1,1,1,0\n",
    )
    .unwrap();
}

#[test]
fn project_writes_weighted_matrix() {
    let dir = tempfile::tempdir().unwrap();
    write_input(dir.path());
    let out = backbone(&["project", "--input", "b.csv", "--output", "g.csv"], dir.path());
    assert_ok(&out);
    let g = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
    assert_eq!(g, ",a,b,c,d\na,2,1,1,2\nb,1,2,1,2\nc,1,1,3,2\nd,2,2,2,3\n");
}

#[test]
fn hyperg_persist_then_extract_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    write_input(dir.path());
    let out = backbone(&["hyperg", "--input", "b.csv", "--output", "hm"], dir.path());
    assert_ok(&out);
    for suffix in ["hm.positive.csv", "hm.negative.csv", "hm.summary.json"] {
        assert!(dir.path().join(suffix).exists(), "{suffix} missing");
    }
    let out = backbone(
        &[
            "extract", "--input", "hm", "--alpha", "0.5", "--signed", "--fwer", "holm",
            "--output", "bb.csv",
        ],
        dir.path(),
    );
    assert_ok(&out);
    let bb = std::fs::read_to_string(dir.path().join("bb.csv")).unwrap();
    assert!(bb.starts_with(",a,b,c,d\n"), "unexpected backbone header: {bb}");

    // the one-shot path must agree with the persist-then-extract path
    let out = backbone(
        &[
            "hyperg", "--input", "b.csv", "--alpha", "0.5", "--signed", "--fwer", "holm",
            "--output", "direct.csv",
        ],
        dir.path(),
    );
    assert_ok(&out);
    assert_eq!(
        std::fs::read(dir.path().join("bb.csv")).unwrap(),
        std::fs::read(dir.path().join("direct.csv")).unwrap()
    );
}

#[test]
fn edgelist_input_and_universal_threshold() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("b.edges"),
        "a,w\na,x\nb,w\nb,y\nc,x\nc,y\nc,z\nd,w\nd,x\nd,y\n",
    )
    .unwrap();
    let out = backbone(
        &[
            "universal", "--input", "b.edges", "--format", "edgelist", "--upper", "mean+1sd",
            "--output", "t.csv",
        ],
        dir.path(),
    );
    assert_ok(&out);
    let t = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(t.starts_with(",a,b,c,d\n"));
    assert!(t.lines().skip(1).all(|l| {
        l.split(',').skip(1).all(|v| v == "0" || v == "1")
    }));
}

#[test]
fn fdsm_same_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write_input(dir.path());
    for run in ["one", "two"] {
        let out = backbone(
            &[
                "fdsm", "--input", "b.csv", "--trials", "300", "--seed", "42",
                "--dyad", "a", "c", "--output", run,
            ],
            dir.path(),
        );
        assert_ok(&out);
    }
    // summary JSON embeds the runtime, so it is exempt from this comparison
    for suffix in [".positive.csv", ".negative.csv", ".dyad.csv"] {
        assert_eq!(
            std::fs::read(dir.path().join(format!("one{suffix}"))).unwrap(),
            std::fs::read(dir.path().join(format!("two{suffix}"))).unwrap(),
            "{suffix} differs between identical runs"
        );
    }
    let dyad = std::fs::read_to_string(dir.path().join("one.dyad.csv")).unwrap();
    assert!(dyad.starts_with("dyad_value\n"));
    assert_eq!(dyad.lines().count(), 301);
}

#[test]
fn sdsm_signed_edgelist_output() {
    let dir = tempfile::tempdir().unwrap();
    write_input(dir.path());
    let out = backbone(
        &[
            "sdsm", "--input", "b.csv", "--alpha", "0.9", "--signed",
            "--output", "s.csv", "--output-format", "signed-edgelist",
        ],
        dir.path(),
    );
    assert_ok(&out);
    let s = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    for line in s.lines() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 3, "bad edgelist line: {line}");
        assert!(fields[2] == "1" || fields[2] == "-1");
    }
    assert!(dir.path().join("s.csv.summary.json").exists());
}

#[test]
fn compare_emits_parseable_json() {
    let dir = tempfile::tempdir().unwrap();
    write_input(dir.path());
    std::fs::write(dir.path().join("parts.csv"), "a,g1\nb,g1\nc,g2\nd,g2\n").unwrap();
    assert_ok(&backbone(
        &["hyperg", "--input", "b.csv", "--alpha", "0.5", "--output", "hm.csv"],
        dir.path(),
    ));
    assert_ok(&backbone(
        &["universal", "--input", "b.csv", "--upper", "1", "--output", "t.csv"],
        dir.path(),
    ));
    let out = backbone(
        &[
            "compare", "--backbone", "hm.csv", "--backbone", "t.csv",
            "--partition", "parts.csv", "--output-format", "json",
        ],
        dir.path(),
    );
    assert_ok(&out);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let backbones = report["backbones"].as_array().unwrap();
    assert_eq!(backbones.len(), 2);
    assert_eq!(backbones[0]["name"], "hm");
    assert!(backbones[0]["modularity"].is_number());
    let corr = report["correlation"].as_array().unwrap();
    assert_eq!(corr.len(), 2);
    assert_eq!(corr[0][0], 1.0);
}

#[test]
fn bad_alpha_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    write_input(dir.path());
    for alpha in ["1.5", "0", "nope"] {
        let out = backbone(
            &["hyperg", "--input", "b.csv", "--alpha", alpha, "--output", "x"],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(2), "alpha {alpha} should be a usage error");
    }
}

#[test]
fn missing_input_reports_error_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = backbone(&["project", "--input", "nothere.csv", "--output", "g.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error:"), "stderr was: {stderr}");
    assert!(stderr.contains("nothere.csv"), "stderr was: {stderr}");
}
