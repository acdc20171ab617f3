//! End-to-end tests of the `jxbw` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CORPUS: &str = concat!(
    r#"{"person":{"name":"Alice","age":30},"hobbies":["reading","cycling"]}"#,
    "\n",
    r#"{"person":{"name":"Bob","age":30},"hobbies":["reading"]}"#,
    "\n",
);

const QUERY: &str = r#"{"name":"Bob","age":30}"#;

fn jxbw() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jxbw"))
}

fn run(args: &[&str]) -> Output {
    jxbw().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Workspace {
    _dir: tempfile::TempDir,
    corpus: PathBuf,
    index: PathBuf,
}

fn build_workspace(corpus_text: &str) -> Workspace {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let index = dir.path().join("corpus.jx");
    std::fs::write(&corpus, corpus_text).unwrap();
    let out = run(&["build", path(&corpus), "-o", path(&index)]);
    assert!(out.status.success(), "build failed: {}", stderr(&out));
    Workspace { _dir: dir, corpus, index }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_reports_counts_and_timings() {
    let ws = build_workspace(CORPUS);
    let out = run(&["build", path(&ws.corpus), "-o", path(&ws.index)]);
    let text = stdout(&out);
    assert!(text.contains("lines               2"), "{text}");
    assert!(text.contains("total tree nodes    21"), "{text}");
    assert!(text.contains("merged tree nodes   12"), "{text}");
    assert!(text.contains("distinct labels     11"), "{text}");
    assert!(text.contains("tree merging"), "{text}");
    assert!(text.contains("total"), "{text}");
}

#[test]
fn build_rejects_empty_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "\n\n").unwrap();
    let out = run(&["build", path(&empty), "-o", path(&dir.path().join("x.jx"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty corpus"));

    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"a\":1}\nnot json\n").unwrap();
    let out = run(&["build", path(&bad), "-o", path(&dir.path().join("y.jx"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn query_formats_and_algorithms_agree() {
    let ws = build_workspace(CORPUS);

    for algorithm in ["xbw", "mt", "naive"] {
        let out = run(&[
            "query",
            path(&ws.index),
            "-q",
            QUERY,
            "--jsonl",
            path(&ws.corpus),
            "--algorithm",
            algorithm,
        ]);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), "2", "algorithm {algorithm}");
    }

    let count = run(&["query", path(&ws.index), "-q", QUERY, "--format", "count"]);
    assert_eq!(stdout(&count).trim(), "1");

    let lines = run(&[
        "query", path(&ws.index), "-q", QUERY,
        "--jsonl", path(&ws.corpus), "--format", "lines",
    ]);
    assert_eq!(
        stdout(&lines).trim(),
        r#"{"person":{"name":"Bob","age":30},"hobbies":["reading"]}"#
    );

    let json = run(&["query", path(&ws.index), "-q", QUERY, "--format", "json"]);
    let report: serde_json::Value = serde_json::from_str(stdout(&json).trim()).unwrap();
    assert_eq!(report["ids"], serde_json::json!([2]));
    assert_eq!(report["count"], 1);
    assert_eq!(report["algorithm"], "xbw");
    assert!(report["elapsed_micros"].is_u64());
}

#[test]
fn query_missing_corpus_for_baseline_is_usage_error() {
    let ws = build_workspace(CORPUS);
    let out = run(&["query", path(&ws.index), "-q", QUERY, "--algorithm", "naive"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--jsonl"));

    let out = run(&["query", path(&ws.index), "-q", QUERY, "--format", "lines"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn query_with_absent_label_returns_empty_and_succeeds() {
    let ws = build_workspace(CORPUS);
    let out = run(&["query", path(&ws.index), "-q", r#"{"name":"Zoe"}"#, "--format", "count"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn bad_query_is_a_data_error() {
    let ws = build_workspace(CORPUS);
    let out = run(&["query", path(&ws.index), "-q", "{nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad query"));
}

#[test]
fn verify_passes_on_example_and_random_queries() {
    let ws = build_workspace(CORPUS);
    let queries = ws.corpus.with_file_name("queries.jsonl");
    std::fs::write(&queries, format!("{QUERY}\n\n30\n")).unwrap();
    let out = run(&[
        "verify", path(&ws.index), "--jsonl", path(&ws.corpus), "--queries", path(&queries),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));

    let out = run(&[
        "verify", path(&ws.index), "--jsonl", path(&ws.corpus),
        "--random", "50", "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("agreement: xbw=mt 50/50"));
}

#[test]
fn verify_with_no_queries_warns_and_passes() {
    let ws = build_workspace(CORPUS);
    let queries = ws.corpus.with_file_name("none.jsonl");
    std::fs::write(&queries, "\n").unwrap();
    let out = run(&[
        "verify", path(&ws.index), "--jsonl", path(&ws.corpus), "--queries", path(&queries),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("vacuous"));
}

#[test]
fn verify_without_query_source_is_usage_error() {
    let ws = build_workspace(CORPUS);
    let out = run(&["verify", path(&ws.index), "--jsonl", path(&ws.corpus)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_reports_all_algorithms() {
    let ws = build_workspace(CORPUS);
    let queries = ws.corpus.with_file_name("queries.jsonl");
    std::fs::write(&queries, format!("{QUERY}\n[\"reading\"]\n")).unwrap();
    let out = run(&[
        "bench", path(&ws.index), "--jsonl", path(&ws.corpus),
        "--queries", path(&queries), "--repeat", "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("xbw"), "{text}");
    assert!(text.contains("mt"), "{text}");
    assert!(text.contains("naive"), "{text}");
    assert!(text.contains("speedup_vs_xbw"), "{text}");
    assert!(text.contains("xbw query shape"), "{text}");

    let out = run(&[
        "bench", path(&ws.index), "--jsonl", path(&ws.corpus),
        "--queries", path(&queries), "--repeat", "1", "--json",
        "--algorithms", "xbw,naive",
    ]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .filter(|l| l.starts_with('{'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["algorithm"], "xbw");
    assert_eq!(rows[0]["queries"], 2);
}

#[test]
fn stats_reports_sections_that_sum_to_file_size() {
    let ws = build_workspace(CORPUS);
    let out = run(&["stats", path(&ws.index)]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("nodes               12"), "{text}");
    assert!(text.contains("distinct labels     11"), "{text}");
    assert!(text.contains("leaves              5"), "{text}");

    let grab = |key: &str| -> u64 {
        text.lines()
            .find(|l| l.trim_start().starts_with(key))
            .and_then(|l| l.split_whitespace().rev().nth(1).map(|v| v.parse().unwrap()))
            .unwrap_or_else(|| panic!("missing {key} in {text}"))
    };
    let total = grab("file size");
    let sum = grab("header")
        + grab("symbol table ")
        + grab("bit arrays")
        + grab("wavelet matrices")
        + grab("f table")
        + grab("id store")
        + grab("checksum");
    assert_eq!(total, sum);
    let file_size = std::fs::metadata(&ws.index).unwrap().len();
    assert_eq!(total, file_size);
}

#[test]
fn corrupted_index_is_a_data_error() {
    let ws = build_workspace(CORPUS);
    let mut bytes = std::fs::read(&ws.index).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    std::fs::write(&ws.index, &bytes).unwrap();
    let out = run(&["query", path(&ws.index), "-q", QUERY]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("checksum"), "{}", stderr(&out));
}

#[test]
fn outputs_are_deterministic_across_runs() {
    let ws = build_workspace(CORPUS);
    let args = [
        "verify", path(&ws.index), "--jsonl", path(&ws.corpus),
        "--random", "30", "--seed", "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));

    let qargs = ["query", path(&ws.index), "-q", QUERY, "--format", "ids"];
    let a = run(&qargs);
    let b = run(&qargs);
    assert_eq!(stdout(&a), stdout(&b));

    // Rebuilding produces a byte-identical index file.
    let second = ws.corpus.with_file_name("again.jx");
    let out = run(&["build", path(&ws.corpus), "-o", path(&second)]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&ws.index).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["query"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreadable_paths_exit_two() {
    let out = run(&["stats", "/nonexistent/index.jx"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["build", "/nonexistent/in.jsonl", "-o", "/tmp/out.jx"]);
    assert_eq!(out.status.code(), Some(2));
}
