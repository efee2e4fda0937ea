use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use projcode::cli::{run_case, BUNDLED_CORPUS};

fn projcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const PAIR_P5: &str = "p = 5\nm = 3\nblocks = [[[1, 2], [2, 3]]]\n[analyses]\nlocality = { delta = 4 }\n";

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.toml", PAIR_P5);
    let out = projcode(&["analyze", "--config", &ok]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[20, 3, 15]"));

    let neg = write(
        dir.path(),
        "neg.toml",
        "p = 5\nm = 3\nblocks = [[[1, 2], [2, 3]]]\n[analyses]\nlocality = { delta = 5 }\n",
    );
    assert_eq!(projcode(&["analyze", "--config", &neg]).status.code(), Some(1));

    let bad = write(dir.path(), "bad.toml", "p = 6\nm = 3\n");
    let out = projcode(&["analyze", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p:"));

    assert_eq!(projcode(&["build", "--config", &ok, "--max-pm", "100"]).status.code(), Some(3));
    assert_eq!(projcode(&["build", "--config", &ok, "--seedless"]).status.code(), Some(2));
    assert_eq!(projcode(&["build"]).status.code(), Some(2));
}

#[test]
fn machine_report_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "job.toml", PAIR_P5);
    let a = dir.path().join("a.json");
    let out = projcode(&["analyze", "--config", &cfg, "--format", "machine", "--out", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["parameters"]["d"], 15);
    assert_eq!(v["locality"]["certified"], true);
    v.as_object_mut().unwrap().remove("timings_ms");
    let again = projcode(&["analyze", "--config", &cfg, "--format", "machine"]);
    let mut w: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    w.as_object_mut().unwrap().remove("timings_ms");
    assert_eq!(v, w);
}

#[test]
fn export_import_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "job.toml", PAIR_P5);
    let g = dir.path().join("g.txt");
    let g = g.to_str().unwrap();
    assert_eq!(projcode(&["export", "--config", &cfg, "--out", g]).status.code(), Some(0));
    let first = fs::read_to_string(g).unwrap();
    assert!(first.starts_with("5 3 20\n"));

    let out = projcode(&["import", g, "--delta", "4", "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((rep["n"].as_u64(), rep["k"].as_u64(), rep["d"].as_u64()), (Some(20), Some(3), Some(15)));

    let code = projcode::matrix::import_matrix(&first).unwrap();
    assert_eq!(projcode::matrix::export_matrix(&code), first);

    let broken = write(dir.path(), "broken.txt", "5 3 2\n1 1\n0 7\n1 1\n");
    assert_eq!(projcode(&["import", &broken]).status.code(), Some(2));
}

#[test]
fn corpus_verb() {
    let out = projcode(&["corpus"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = projcode(&["corpus", "--filter", "intersecting-pairs"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("1/1 cases passed"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let (_, good) = BUNDLED_CORPUS.iter().find(|(n, _)| *n == "two-block-griesmer-p3").unwrap();
    let perturbed = good.replace("2z^17", "3z^17");
    write(dir.path(), "perturbed.toml", &perturbed);
    let out = projcode(&["corpus", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL perturbed"), "{text}");
    assert!(text.contains("enumerator: expected"), "{text}");
}

#[test]
fn perturbed_expectations_fail_with_diffs() {
    for (name, text) in BUNDLED_CORPUS {
        assert!(run_case(name, text).passed, "{name}");
    }
    let (_, pair) = BUNDLED_CORPUS.iter().find(|(n, _)| *n == "pair-of-lines-p5").unwrap();
    let outcome = run_case("x", &pair.replace("d = 15", "d = 16"));
    assert_eq!(outcome.diffs, vec!["d: expected 16, got 15".to_string()]);
    let outcome = run_case("x", &pair.replace("0 0 0 0\n1 2 3 4", "0 0 0 1\n1 2 3 4"));
    assert!(outcome.diffs[0].starts_with("matrix:"), "{:?}", outcome.diffs);
}
