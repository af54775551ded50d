use std::path::Path;
use std::process::{Command, Output};

fn widthspan(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_widthspan"))
        .args(args)
        .current_dir(dir)
        .env_remove("WIDTHSPAN_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen(dir: &Path, family: &str, n: &str, extra: &[&str]) {
    let mut args = vec!["gen", "--family", family, "--n", n, "--graph-out", "g.gr", "--td-out", "g.td"];
    args.extend_from_slice(extra);
    let o = widthspan(&args, dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cycle_tree_has_average_three_halves() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "cycle", "4", &[]);
    let o = widthspan(&["build-tree", "--graph", "g.gr", "--arrangement", "g.arr"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["avg_stretch"], "3/2");
    assert_eq!(v["report"]["fcb_weight"], 4);
    assert_eq!(v["report"]["total_stretch"], 6);
}

#[test]
fn dp_agrees_with_oracle_on_k4() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "complete", "4", &[]);
    let o = widthspan(&["dp-min-stretch", "--graph", "g.gr", "--td", "g.td", "--check-oracle"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "9 = 9\n");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "random_bandwidth", "40", &["--b", "3", "--seed", "11"]);
    let commands: [&[&str]; 4] = [
        &["build-tree", "--graph", "g.gr", "--arrangement", "g.arr"],
        &["distribution", "--graph", "g.gr", "--arrangement", "g.arr", "--explicit"],
        &["distribution", "--graph", "g.gr", "--arrangement", "g.arr", "--sample", "7", "--seed", "5"],
        &["cutwidth-tree", "--graph", "g.gr", "--arrangement", "g.arr", "--seed", "9"],
    ];
    for args in commands {
        let runs: Vec<Vec<u8>> = (0..3).map(|_| widthspan(args, dir.path()).stdout).collect();
        assert!(!runs[0].is_empty());
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{args:?}");
    }
    // thread count does not change results
    let one = widthspan(&["--jobs", "1", "distribution", "--graph", "g.gr", "--arrangement", "g.arr", "--explicit"], dir.path());
    let many = widthspan(&["--jobs", "4", "distribution", "--graph", "g.gr", "--arrangement", "g.arr", "--explicit"], dir.path());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        gen(d.path(), "random_cutwidth", "30", &["--c", "3", "--seed", "4"]);
    }
    for f in ["g.gr", "g.arr", "g.td"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn manifest_records_digests() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "path", "5", &[]);
    let o = widthspan(
        &["--manifest", "run.json", "stats", "--graph", "g.gr", "--arrangement", "g.arr"],
        dir.path(),
    );
    assert!(o.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage error
    let o = widthspan(&["stats", "--graph", "g.gr"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    // malformed input
    std::fs::write(dir.path().join("bad.gr"), "p 3 1\ne 1 7\n").unwrap();
    std::fs::write(dir.path().join("bad.arr"), "1\n2\n3\n").unwrap();
    let o = widthspan(&["stats", "--graph", "bad.gr", "--arrangement", "bad.arr"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    // arrangement that is not a permutation
    gen(dir.path(), "cycle", "4", &[]);
    std::fs::write(dir.path().join("dup.arr"), "1\n1\n2\n3\n").unwrap();
    let o = widthspan(&["build-tree", "--graph", "g.gr", "--arrangement", "dup.arr"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    // width limit refused unless raised
    gen(dir.path(), "complete", "6", &[]);
    let o = widthspan(&["dp-min-stretch", "--graph", "g.gr", "--td", "g.td"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = widthspan(&["dp-min-stretch", "--graph", "g.gr", "--td", "g.td", "--max-width", "5"], dir.path());
    assert!(o.status.success());
}

#[test]
fn verify_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = widthspan(&["verify", "--suite", "bandwidth"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
    assert!(text.ends_with("0 failed\n"));
    let o = widthspan(&["verify", "--suite", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
