use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use varskip::checkpoint::Checkpoint;
use varskip::cli::estimate_query;
use varskip::tablefile;
use varskip_core::inference::parse_query;

fn varskip(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varskip"))
        .args(args)
        .current_dir(dir)
        .env_remove("VARSKIP_SEED")
        .env_remove("VARSKIP_EPOCHS")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = varskip(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const SMALL: &[&str] = &["--epochs", "2", "--hidden", "32", "--d-emb", "4", "--batch-size", "64"];

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        ok(
            dir.path(),
            &["synth", "--out", "t.vskt", "--cols", "5", "--rows", "600", "--max-domain", "10", "--data-seed", "3"],
        );
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> String {
        ok(self.dir.path(), args)
    }

    fn train(&self, out: &str, extra: &[&str]) {
        let mut args = vec!["train", "--table", "t.vskt", "--out", out];
        args.extend_from_slice(SMALL);
        args.extend_from_slice(extra);
        self.run(&args);
    }
}

#[test]
fn synth_is_deterministic() {
    let f = Fixture::new();
    f.run(&["synth", "--out", "u.vskt", "--cols", "5", "--rows", "600", "--max-domain", "10", "--data-seed", "3"]);
    assert_eq!(fs::read(f.path("t.vskt")).unwrap(), fs::read(f.path("u.vskt")).unwrap());
    let t = tablefile::read_table(&f.path("t.vskt")).unwrap();
    assert_eq!((t.n_rows(), t.n_cols()), (600, 5));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = varskip(dir.path(), &["synth", "--out", "missing/dir/t.vskt", "--rows", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(varskip(dir.path(), &["synth", "--bogus"]).status.code(), Some(1));
}

#[test]
fn ingest_then_query_by_value() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), "age,city,junk\n30,Paris,x\n40,Rome,y\n30,Rome,z\n50,Oslo,x\n").unwrap();
    let msg = ok(dir.path(), &["ingest", "--csv", "p.csv", "--out", "p.vskt", "--columns", "city,age"]);
    assert!(msg.contains("4 rows"), "{msg}");
    let t = tablefile::read_table(&dir.path().join("p.vskt")).unwrap();
    assert_eq!(t.columns().iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["city", "age"]);
    ok(
        dir.path(),
        &["train", "--table", "p.vskt", "--out", "p.vskc", "--epochs", "1", "--hidden", "16", "--d-emb", "4"],
    );
    let out = ok(
        dir.path(),
        &["estimate", "--checkpoint", "p.vskc", "--query", r#"city == "Rome" AND age <= 40"#, "--budget", "50"],
    );
    let v: Value = serde_json::from_str(&out).unwrap();
    let s = v["selectivity"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&s));
}

#[test]
fn missing_csv_column_fails() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), "a,b\n1,2\n").unwrap();
    let out = varskip(dir.path(), &["ingest", "--csv", "p.csv", "--out", "p.vskt", "--columns", "c"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn training_is_reproducible_and_checkpoints_round_trip() {
    let f = Fixture::new();
    f.train("a.vskc", &["--log", "a.csv"]);
    f.train("b.vskc", &[]);
    assert!(fs::read(f.path("a.vskc")).unwrap() == fs::read(f.path("b.vskc")).unwrap());
    let log = fs::read_to_string(f.path("a.csv")).unwrap();
    assert_eq!(log.lines().count(), 3);
    let ck = Checkpoint::load(&f.path("a.vskc")).unwrap();
    assert_eq!(ck.meta.log.len(), 2);
    ck.save(&f.path("c.vskc")).unwrap();
    assert!(fs::read(f.path("a.vskc")).unwrap() == fs::read(f.path("c.vskc")).unwrap());
}

#[test]
fn truncated_checkpoint_is_rejected() {
    let f = Fixture::new();
    f.train("a.vskc", &[]);
    let bytes = fs::read(f.path("a.vskc")).unwrap();
    fs::write(f.path("cut.vskc"), &bytes[..bytes.len() - 7]).unwrap();
    assert!(Checkpoint::load(&f.path("cut.vskc")).is_err());
    let out = varskip(f.dir.path(), &["estimate", "--checkpoint", "cut.vskc", "--query", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unconstrained_skipping_costs_nothing() {
    let f = Fixture::new();
    f.train("m.vskc", &[]);
    let v: Value =
        serde_json::from_str(&f.run(&["estimate", "--checkpoint", "m.vskc", "--query", "", "--skip"])).unwrap();
    assert_eq!(v["selectivity"].as_f64(), Some(1.0));
    assert_eq!(v["forward_passes"].as_u64(), Some(0));
    assert_eq!(v["std_error"].as_f64(), Some(0.0));
}

#[test]
fn malformed_operator_is_a_usage_error() {
    let f = Fixture::new();
    f.train("m.vskc", &[]);
    let out = varskip(f.dir.path(), &["estimate", "--checkpoint", "m.vskc", "--query", "col0 =< 3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("=<"));
}

#[test]
fn skipping_needs_a_masked_checkpoint() {
    let f = Fixture::new();
    f.train("b.vskc", &["--mask-mode", "none"]);
    let out = varskip(f.dir.path(), &["estimate", "--checkpoint", "b.vskc", "--query", "col1 == 2", "--skip"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_estimate_matches_library() {
    let f = Fixture::new();
    f.train("m.vskc", &["--orders", "2"]);
    let q = "col0 >= 2 AND col3 <= 4";
    for skip in [false, true] {
        let mut args = vec!["estimate", "--checkpoint", "m.vskc", "--query", q, "--budget", "300", "--seed", "9"];
        if skip {
            args.push("--skip");
        }
        let v: Value = serde_json::from_str(&f.run(&args)).unwrap();
        let ck = Checkpoint::load(&f.path("m.vskc")).unwrap();
        let query = parse_query(q, &ck.meta.schema).unwrap();
        let est = estimate_query(&ck.model, &query, 300, skip, false, 9).unwrap();
        assert_eq!(v["selectivity"].as_f64().unwrap().to_bits(), est.selectivity.to_bits());
        assert_eq!(v["forward_passes"].as_u64().unwrap(), est.forward_passes);
        assert_eq!(v["estimator"], if skip { "multiorder+skipping" } else { "multiorder" });
    }
}

fn bench(f: &Fixture, workers: &str, tag: &str) -> Value {
    let json = format!("{tag}.json");
    f.run(&[
        "--workers",
        workers,
        "bench",
        "--table",
        "t.vskt",
        "--baseline",
        "b.vskc",
        "--masked",
        "m.vskc",
        "--seed",
        "5",
        "--workload-seed",
        "6",
        "--queries",
        "12",
        "--min-constraints",
        "2",
        "--max-constraints",
        "4",
        "--budgets",
        "20,80",
        "--out-json",
        &json,
        "--out-csv",
        &format!("{tag}.csv"),
        "--save-workload",
        &format!("{tag}.txt"),
    ]);
    serde_json::from_str(&fs::read_to_string(f.path(&json)).unwrap()).unwrap()
}

#[test]
fn bench_is_deterministic_across_worker_counts() {
    let f = Fixture::new();
    f.train("b.vskc", &["--mask-mode", "none"]);
    f.train("m.vskc", &[]);
    let one = bench(&f, "1", "one");
    let three = bench(&f, "3", "three");
    assert_eq!(one["data"]["report"], three["data"]["report"]);
    assert_eq!(one["data"]["workload"], three["data"]["workload"]);
    assert_eq!(fs::read(f.path("one.csv")).unwrap(), fs::read(f.path("three.csv")).unwrap());
    let rows = one["data"]["report"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3 * 2);
    assert_eq!(one["data"]["config"]["seed"], "5");
    assert!(one["meta"]["created_unix"].is_u64());

    f.run(&[
        "bench",
        "--table",
        "t.vskt",
        "--baseline",
        "b.vskc",
        "--masked",
        "m.vskc",
        "--seed",
        "5",
        "--workload",
        "one.txt",
        "--budgets",
        "20,80",
        "--out-json",
        "again.json",
    ]);
    let again: Value = serde_json::from_str(&fs::read_to_string(f.path("again.json")).unwrap()).unwrap();
    assert_eq!(again["data"]["report"], one["data"]["report"]);
}

#[test]
fn bench_rejects_zero_workers_and_missing_seed() {
    let f = Fixture::new();
    f.train("b.vskc", &["--mask-mode", "none"]);
    let base = ["bench", "--table", "t.vskt", "--baseline", "b.vskc", "--workload-seed", "1", "--queries", "3"];
    assert_eq!(varskip(f.dir.path(), &base).status.code(), Some(1));
    let mut zero = vec!["--workers", "0"];
    zero.extend_from_slice(&base);
    zero.extend_from_slice(&["--seed", "1"]);
    assert_eq!(varskip(f.dir.path(), &zero).status.code(), Some(1));
}

#[test]
fn flag_beats_environment_beats_config_file() {
    let f = Fixture::new();
    fs::write(f.path("cfg.toml"), "epochs = 3\nhidden = 32\nd_emb = 4\n").unwrap();
    let epochs = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_varskip"));
        cmd.current_dir(f.dir.path()).args(["--config", "cfg.toml", "train", "--table", "t.vskt", "--out", "x.vskc"]);
        cmd.env_remove("VARSKIP_EPOCHS");
        if let Some(e) = env {
            cmd.env("VARSKIP_EPOCHS", e);
        }
        if let Some(v) = flag {
            cmd.args(["--epochs", v]);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        Checkpoint::load(&f.path("x.vskc")).unwrap().meta.log.len()
    };
    assert_eq!(epochs(None, None), 3);
    assert_eq!(epochs(Some("2"), None), 2);
    assert_eq!(epochs(Some("2"), Some("1")), 1);
}

#[test]
fn bad_environment_value_is_reported() {
    let f = Fixture::new();
    let out = Command::new(env!("CARGO_BIN_EXE_varskip"))
        .current_dir(f.dir.path())
        .env("VARSKIP_EPOCHS", "many")
        .args(["train", "--table", "t.vskt", "--out", "x.vskc"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epochs"));
}

#[test]
fn text_pipeline_single_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let lines: Vec<&str> = ["abcab", "bbbca", "cacab", "abab", "ccc"].into_iter().cycle().take(200).collect();
    fs::write(dir.path().join("c.txt"), lines.join("\n")).unwrap();
    ok(
        dir.path(),
        &[
            "text-train",
            "--corpus",
            "c.txt",
            "--out",
            "c.vskc",
            "--width",
            "6",
            "--epochs",
            "2",
            "--hidden",
            "32",
            "--d-emb",
            "4",
        ],
    );
    let v: Value = serde_json::from_str(&ok(
        dir.path(),
        &["text-bench", "--checkpoint", "c.vskc", "--corpus", "c.txt", "--pattern", "ab", "--seed", "1"],
    ))
    .unwrap();
    assert_eq!(v["per_position_first_terms"].as_array().unwrap().len(), 5);
    assert!((v["truth"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    let p = v["probability"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));

    let out = varskip(
        dir.path(),
        &["text-bench", "--checkpoint", "c.vskc", "--corpus", "c.txt", "--pattern", "az", "--seed", "1"],
    );
    assert_eq!(out.status.code(), Some(2));

    fs::write(dir.path().join("p.txt"), "ab\nca\nbbb\n").unwrap();
    let summary = ok(
        dir.path(),
        &[
            "text-bench",
            "--checkpoint",
            "c.vskc",
            "--corpus",
            "c.txt",
            "--patterns",
            "p.txt",
            "--seed",
            "1",
            "--budgets",
            "50",
        ],
    );
    assert!(summary.contains("skipping") && summary.contains("naive"), "{summary}");
}
