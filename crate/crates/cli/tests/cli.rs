use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const TRIANGLE: &str = "v a 1\nv b 0.8\nv c 0.6\ne a b 0.8\ne b c 0.5\ne a c 0.5\n";

fn fuzzpool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzpool")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_graph(dir: &Path, text: &str) -> String {
    let path = dir.join("g.fg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn analyze_prints_classes_and_bridges() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), TRIANGLE);
    let o = fuzzpool(&["analyze", "--graph", &g]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("a b 0.8 alpha"));
    assert!(text.contains("b c 0.5 beta"));
    assert!(text.contains("fuzzy bridges: a-b"));
}

#[test]
fn pool_pair_to_stdout_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), TRIANGLE);
    let o = fuzzpool(&["pool", "--graph", &g, "--pair", "b,c"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# b -> b+c"));
    assert!(text.contains("e a b+c 0.5"));

    let out = dir.path().join("pooled.fg");
    let o = fuzzpool(&["pool", "--graph", &g, "--cfg", "a,b", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let written = fs::read_to_string(&out).unwrap();
    assert!(written.contains("v a+b 0.8"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), TRIANGLE);
    assert_eq!(fuzzpool(&[]).status.code(), Some(1));
    assert_eq!(fuzzpool(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fuzzpool(&["pool", "--graph", &g]).status.code(), Some(1));
    assert_eq!(fuzzpool(&["pool", "--graph", &g, "--pair", "a"]).status.code(), Some(1));
    assert_eq!(fuzzpool(&["audit", "--suite", "nope"]).status.code(), Some(1));
    assert_eq!(fuzzpool(&["train", "--dataset", "3", "--out", "x"]).status.code(), Some(1));
    let out = dir.path().join("t");
    let o = fuzzpool(&["train", "--dataset", "1", "--tau", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(fuzzpool(&["--help"]).status.code(), Some(0));
    assert_eq!(fuzzpool(&["--version"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.fg");
    assert_eq!(fuzzpool(&["analyze", "--graph", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write_graph(dir.path(), "v a 1\ne a b 0.3\n");
    let o = fuzzpool(&["analyze", "--graph", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let g = write_graph(dir.path(), TRIANGLE);
    assert_eq!(fuzzpool(&["pool", "--graph", &g, "--pair", "a,zz"]).status.code(), Some(2));
    assert_eq!(fuzzpool(&["pool", "--graph", &g, "--cycle", "a,b"]).status.code(), Some(2));
    assert_eq!(fuzzpool(&["report", "--in", dir.path().join("none").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn audit_exit_codes_follow_findings() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean");
    let o = fuzzpool(&["audit", "--suite", "commutativity", "--seed", "3", "--cases", "30", "--out", clean.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(clean.join("commutativity.txt").exists());

    let dirty = dir.path().join("dirty");
    let o = fuzzpool(&["audit", "--suite", "ftree", "--seed", "7", "--cases", "200", "--out", dirty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let files: Vec<_> = fs::read_dir(dirty.join("counterexamples")).unwrap().collect();
    assert!(!files.is_empty());
}

#[test]
fn train_then_report_rerenders_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let out_s = out.to_str().unwrap();
    let o = fuzzpool(&[
        "train", "--dataset", "1", "--epochs", "200", "--pool-interval", "100", "--tau", "0.5", "--grid", "10",
        "--out", out_s,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("wall clock:"));
    let svg = out.join("loss_curves.svg");
    let before = fs::read(&svg).unwrap();
    fs::remove_file(&svg).unwrap();
    let o = fuzzpool(&["report", "--in", out_s]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&svg).unwrap(), before);
}
