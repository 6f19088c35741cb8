use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn erasim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erasim"))
        .args(args)
        .env_remove("ERASIM_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = erasim(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

/// `metric → value` from a summary CSV.
fn metric(csv: &str, name: &str) -> f64 {
    csv.lines()
        .find_map(|l| {
            let cols: Vec<&str> = l.rsplitn(6, ',').collect();
            (cols.len() == 6 && cols[5].ends_with(&format!(",{name}"))).then(|| cols[4].parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no {name} in\n{csv}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bv_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["run", "bv", "--n", "7", "--encoded", "--trials", "300", "--seed", "1", "--out", path(out)]);
    }
    for f in ["records.jsonl", "summary.csv", "plot.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    // run.json differs only in where it was written
    let cfg = |d: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("run.json")).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("out");
        v
    };
    assert_eq!(cfg(&a), cfg(&b));
    let recs = fs::read_to_string(a.join("records.jsonl")).unwrap();
    assert_eq!(recs.lines().count(), 300);
    let first: serde_json::Value = serde_json::from_str(recs.lines().next().unwrap()).unwrap();
    assert_eq!(first["schema"], 1);
    assert!(first["readout"].as_str().unwrap().chars().all(|c| matches!(c, '0' | '1' | 'L')));
}

#[test]
fn seed_env_and_jobs_do_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["run", "cat", "--n", "6", "--trials", "100", "--seed", "5", "--out", path(&a)]);
    let o = Command::new(env!("CARGO_BIN_EXE_erasim"))
        .args(["--jobs", "2", "run", "cat", "--n", "6", "--trials", "100", "--out", path(&b)])
        .env("ERASIM_SEED", "5")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read(a.join("records.jsonl")).unwrap(), fs::read(b.join("records.jsonl")).unwrap());
}

#[test]
fn noiseless_encoded_cat_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(&["run", "cat-encoded-24", "--noise", "zero", "--trials", "20", "--out", path(dir.path())]);
    assert_eq!(metric(&csv, "total_error"), 0.0);
    assert_eq!(metric(&csv, "acceptance"), 1.0);
}

#[test]
fn tesseract_writes_histogram() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["run", "tesseract", "--ft", "--trials", "30", "--out", path(dir.path())]);
    let h = fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    let mut lines = h.lines();
    assert_eq!(lines.next(), Some("correct_blocks,shots"));
    let rows: Vec<(usize, u64)> = lines
        .map(|l| {
            let (c, n) = l.split_once(',').unwrap();
            (c.parse().unwrap(), n.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 13);
    assert!(rows.iter().enumerate().all(|(i, r)| r.0 == i));
    assert!(rows.iter().map(|r| r.1).sum::<u64>() > 0);
}

#[test]
fn analyze_reproduces_the_run_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(&["run", "repeated-cz", "--j", "2", "--trials", "200", "--seed", "3", "--out", path(dir.path())]);
    let rec = dir.path().join("records.jsonl");
    assert_eq!(ok(&["analyze", path(&rec)]), csv);
    assert_eq!(fs::read_to_string(dir.path().join("summary.csv")).unwrap(), csv);
}

#[test]
fn loss_sweep_on_encoded_cat() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["run", "cat-encoded:k=8", "--trials", "300", "--out", path(dir.path())]);
    let t = ok(&["analyze", path(&dir.path().join("records.jsonl")), "--max-losses", "0..5"]);
    let rows: Vec<&str> = t.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("max-losses=0,total_error,"));
    // more tolerated losses never lowers acceptance
    let acc: Vec<f64> = rows.iter().map(|r| r.split(',').nth(5).unwrap().parse().unwrap()).collect();
    assert!(acc.windows(2).all(|w| w[0] <= w[1]), "{acc:?}");
}

#[test]
fn loss_free_cat_fidelity_is_at_least_unselected() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["run", "cat", "--n", "8", "--trials", "2000", "--set", "p_2q_loss=0.03", "--out", path(dir.path())]);
    let t = ok(&["analyze", path(&dir.path().join("records.jsonl")), "--no-selection", "--no-loss"]);
    let rows: Vec<Vec<&str>> = t.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[1][0]), ("no-selection", "no-loss"));
    let f: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(f[1] >= f[0], "{f:?}");
}

#[test]
fn empty_and_bad_record_files() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let t = ok(&["analyze", path(&empty)]);
    assert!(t.contains(",trials,0,"), "{t}");

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"schema\":99}\n").unwrap();
    assert_eq!(erasim(&["analyze", path(&bad)]).status.code(), Some(1));
    let missing = dir.path().join("missing.jsonl");
    assert_eq!(erasim(&["analyze", path(&missing)]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(erasim(&["run", "warp-drive"]).status.code(), Some(1));
    assert_eq!(erasim(&["run", "cat", "--n", "4", "--set", "p_nope=1"]).status.code(), Some(1));
    assert_eq!(erasim(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn records_are_never_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["run", "cat", "--n", "4", "--trials", "5", "--out", path(dir.path())];
    ok(&args);
    let before = fs::read(dir.path().join("records.jsonl")).unwrap();
    assert_eq!(erasim(&args).status.code(), Some(1));
    assert_eq!(fs::read(dir.path().join("records.jsonl")).unwrap(), before);
}

#[test]
fn saved_config_replays_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["run", "bv", "--n", "7", "--trials", "50", "--noise", "static", "--out", path(&a)]);
    ok(&["run", "--config", path(&a.join("run.json")), "--out", path(&b)]);
    assert_eq!(fs::read(a.join("records.jsonl")).unwrap(), fs::read(b.join("records.jsonl")).unwrap());
}

#[test]
fn verify_and_list() {
    let out = ok(&["verify", "--oracle-circuits", "30"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{out}");

    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("codes.txt");
    let text = include_str!("../../core/data/codes.txt").replacen("stabilizer ZZZZ", "stabilizer ZZII", 1);
    fs::write(&reg, text).unwrap();
    let o = erasim(&["verify", "--codes", path(&reg), "--oracle-circuits", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL code distances"));

    let l = ok(&["list"]);
    for name in ["tesseract", "repeated-cz", "p_2q_loss", "16-6-4"] {
        assert!(l.contains(name), "{name}");
    }
}
