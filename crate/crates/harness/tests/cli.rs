//! The `wmls` binary end to end: exit codes, label files, determinism of
//! generation and benchmarks, and the committed corpus.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wmls_harness::corpus;
use wmls_harness::verify::{label_instance, verify_instance, LabelFile};
use wmls_harness::{BudgetConfig, Witnessed};

fn wmls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmls")).args(args).output().expect("run wmls")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wmls-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_label_verify_round_trip() {
    let dir = scratch("round-trip");
    let inst = dir.join("inst.json");
    let labels = dir.join("labels.json");
    for scheme in ["product", "apex", "union", "skinny", "short", "compose"] {
        let out = wmls(&["gen", "--scheme", scheme, "--n", "120", "--seed", "5", "--out", path(&inst)]);
        assert!(out.status.success(), "gen {scheme}: {}", String::from_utf8_lossy(&out.stderr));
        let out = wmls(&["label", path(&inst), "--out", path(&labels)]);
        assert!(out.status.success(), "label {scheme}: {}", String::from_utf8_lossy(&out.stderr));
        let out = wmls(&["verify", path(&inst), "--labels", path(&labels)]);
        assert_eq!(out.status.code(), Some(0), "verify {scheme}: {}", String::from_utf8_lossy(&out.stderr));
        let out = wmls(&["verify", path(&inst)]);
        assert_eq!(out.status.code(), Some(0), "fresh verify {scheme}");
    }
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn gen_is_deterministic() {
    let a = wmls(&["gen", "--scheme", "compose", "--n", "300", "--seed", "11"]);
    let b = wmls(&["gen", "--scheme", "compose", "--n", "300", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn corrupted_label_file_exits_with_one() {
    let dir = scratch("corrupt");
    let inst = dir.join("inst.json");
    let labels = dir.join("labels.json");
    let out = wmls(&["gen", "--scheme", "product", "--n", "64", "--seed", "2", "--out", path(&inst)]);
    assert!(out.status.success());
    let w = Witnessed::from_json(&fs::read_to_string(&inst).unwrap()).unwrap();
    let cfg = BudgetConfig::default();
    let clean = label_instance(&w, &cfg).unwrap();

    // Pick a flip the library itself detects, then expect the binary to agree.
    let mut found = None;
    for i in 0..clean.labels.vertex[0].len() {
        let mut f = clean.clone();
        f.labels.vertex[0].flip(i);
        match verify_instance(&w, &cfg, Some(&f.labels)) {
            Ok(r) if r.pass => continue,
            _ => {
                found = Some(f);
                break;
            }
        }
    }
    let bad: LabelFile = found.expect("some flip of vertex 0 is detected");
    fs::write(&labels, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = wmls(&["verify", path(&inst), "--labels", path(&labels)]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn malformed_inputs_exit_with_two() {
    let dir = scratch("malformed");
    let bad = dir.join("bad.json");
    fs::write(&bad, "{\"not\": \"an instance\"").unwrap();
    assert_eq!(wmls(&["verify", path(&bad)]).status.code(), Some(2));
    assert_eq!(wmls(&["label", path(&bad)]).status.code(), Some(2));
    assert_eq!(wmls(&["verify", path(&dir.join("missing.json"))]).status.code(), Some(2));

    let inst = dir.join("inst.json");
    assert!(wmls(&["gen", "--scheme", "skinny", "--n", "10", "--out", path(&inst)]).status.success());
    assert_eq!(wmls(&["verify", path(&inst), "--labels", path(&bad)]).status.code(), Some(2));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn empty_graph_passes() {
    let dir = scratch("empty");
    let inst = dir.join("inst.json");
    for scheme in ["product", "skinny", "compose"] {
        let out = wmls(&["gen", "--scheme", scheme, "--n", "0", "--out", path(&inst)]);
        assert!(out.status.success(), "gen {scheme} n=0: {}", String::from_utf8_lossy(&out.stderr));
        let out = wmls(&["verify", path(&inst)]);
        assert_eq!(out.status.code(), Some(0), "{scheme}: {}", String::from_utf8_lossy(&out.stderr));
    }
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn untimed_bench_is_byte_identical() {
    let args = ["bench", "--scheme", "compose", "--n", "64,128", "--reps", "2", "--seed", "3", "--no-timing"];
    let a = wmls(&args);
    let b = wmls(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let csv = String::from_utf8(a.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
}

#[test]
fn committed_corpus_regenerates_byte_for_byte() {
    let fresh = corpus::generate_corpus().unwrap();
    let committed = corpus::load_corpus(&corpus::default_dir()).unwrap();
    assert_eq!(committed.len(), corpus::CORPUS.len());
    for ((w, text), regenerated) in committed.iter().zip(&fresh) {
        assert_eq!(&regenerated.to_json(), text, "{}", w.name);
    }
}
