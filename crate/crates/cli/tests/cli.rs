use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mosaic_core::experiment::{Manifest, StreamStats};
use mosaic_core::io;

const SMALL: &str = r#"{
  "scenario": {"kind": "random", "nodes": 30, "t_start": 0, "t_end": 30, "k": 6, "gamma": 0.2},
  "sweep": {"phi": [0.0, 0.5], "seeds": 2}
}"#;

fn mosaic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mosaic")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = mosaic(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, SMALL).unwrap();
    path
}

fn generate(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let cfg = small_config(dir);
    let out = dir.join(name);
    let mut args = vec!["generate", "--config", s(&cfg), "--seed", "5", "--out", s(&out)];
    args.extend_from_slice(extra);
    ok(&args);
    out
}

fn files(dir: &Path) -> Vec<Vec<u8>> {
    ["edges.csv", "truth.json", "manifest.json"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn generate_is_deterministic_across_runs_and_threads() {
    let tmp = tempfile::tempdir().unwrap();
    let a = generate(tmp.path(), "a", &["--threads", "1"]);
    let b = generate(tmp.path(), "b", &["--threads", "4"]);
    let c = generate(tmp.path(), "c", &[]);
    assert_eq!(files(&a), files(&b));
    assert_eq!(files(&a), files(&c));
    let other = tmp.path().join("d");
    ok(&["generate", "--config", s(&small_config(tmp.path())), "--seed", "6", "--out", s(&other)]);
    assert_ne!(files(&a)[0], files(&other)[0]);
}

#[test]
fn output_files_are_canonical() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = generate(tmp.path(), "g", &[]);
    let edges = fs::read_to_string(dir.join("edges.csv")).unwrap();
    assert!(edges.starts_with("u,v,t\n"));
    assert!(!edges.contains('\r') && !edges.contains(" \n") && edges.ends_with('\n'));
    let parsed = io::parse_edges(&edges).unwrap();
    assert!(parsed.iter().all(|e| e.u < e.v));
    assert_eq!(io::edges_to_string(&parsed), edges);

    let v = ok(&["validate", "--truth", s(&dir.join("truth.json")), "--edges", s(&dir.join("edges.csv"))]);
    let text = String::from_utf8(v.stdout).unwrap();
    assert!(!text.contains("canonical"), "{text}");
}

#[test]
fn manifest_matches_recomputed_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = generate(tmp.path(), "g", &[]);
    let m = Manifest::from_json(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m.seed, 5);
    assert_eq!(m.version, env!("CARGO_PKG_VERSION"));
    let out = ok(&["stats", "--edges", s(&dir.join("edges.csv")), "--truth", s(&dir.join("truth.json"))]);
    let stats: StreamStats = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats.communities, m.stats.communities);
    assert_eq!(stats.mean_size, m.stats.mean_size);
    assert_eq!(stats.mean_duration, m.stats.mean_duration);
    assert_eq!(stats.edges, m.stats.edges);
    assert_eq!(stats.empty_edges, 0);
}

#[test]
fn full_emptying_gives_an_empty_stream() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("empty.json");
    fs::write(&cfg, r#"{"scenario": {"kind": "snapshots", "nodes": 10, "t_start": 0, "t_end": 10, "k": 3, "gamma": 1}}"#).unwrap();
    let out = tmp.path().join("o");
    ok(&["generate", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(fs::read_to_string(out.join("edges.csv")).unwrap(), "u,v,t\n");
    let m = Manifest::from_json(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!((m.stats.communities, m.stats.edges), (0, 0));

    // detectors still produce a well-formed report
    let report = ok(&["evaluate", "--edges", s(&out.join("edges.csv")), "--truth", s(&out.join("truth.json")), "--out", s(&out)]);
    let text = String::from_utf8(report.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn evaluate_reports_every_detector() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = generate(tmp.path(), "g", &[]);
    let (edges, truth) = (dir.join("edges.csv"), dir.join("truth.json"));
    ok(&["evaluate", "--edges", s(&edges), "--truth", s(&truth), "--window", "2", "--out", s(&dir)]);
    let report = fs::read_to_string(dir.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "method,mean_nmi,mosaic_nmi,sm_p,sm_n,sm_l");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("truth,1,"));
    for (line, m) in lines[2..].iter().zip(["no_smoothing", "implicit_global", "label_smoothing", "smoothed_graph"]) {
        assert!(line.starts_with(m), "{line}");
    }

    ok(&["evaluate", "--edges", s(&edges), "--truth", s(&truth), "--method", "smoothed_graph", "--out", s(&dir)]);
    assert_eq!(fs::read_to_string(dir.join("report.csv")).unwrap().lines().count(), 3);
}

#[test]
fn aggregate_and_detect_write_their_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = generate(tmp.path(), "g", &[]);
    let (edges, truth) = (dir.join("edges.csv"), dir.join("truth.json"));
    ok(&["aggregate", "--edges", s(&edges), "--truth", s(&truth), "--window", "3", "--out", s(&dir)]);
    let windows = fs::read_to_string(dir.join("windows.csv")).unwrap();
    assert_eq!(windows.lines().count(), 1 + 10);
    let snaps = fs::read_to_string(dir.join("snapshots.csv")).unwrap();
    let total: u64 = snaps.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total as usize, io::parse_edges(&fs::read_to_string(&edges).unwrap()).unwrap().len());

    ok(&["detect", "--edges", s(&edges), "--truth", s(&truth), "--out", s(&dir)]);
    for m in ["no_smoothing", "implicit_global", "label_smoothing", "smoothed_graph"] {
        let text = fs::read_to_string(dir.join(format!("labels_{m}.csv"))).unwrap();
        let d = io::parse_labels(&text, 30).unwrap();
        assert_eq!(d.num_windows(), 15);
    }
}

#[test]
fn sweep_rows_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("sw");
    ok(&["sweep", "--config", s(&cfg), "--out", s(&out), "--threads", "2"]);
    let rows = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines[0], "phi,seed,method,mean_nmi,sm_p,sm_n,sm_l");
    assert_eq!(lines.len(), 1 + 2 * 2 * 4);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[16].starts_with("0.5,"));
    let summary = fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 4);

    let again = tmp.path().join("sw2");
    ok(&["sweep", "--config", s(&cfg), "--out", s(&again), "--threads", "1"]);
    assert_eq!(fs::read(out.join("sweep.csv")).unwrap(), fs::read(again.join("sweep.csv")).unwrap());

    let narrow = tmp.path().join("sw3");
    ok(&["sweep", "--config", s(&cfg), "--out", s(&narrow), "--phi", "0.1", "--method", "no_smoothing,implicit_global"]);
    assert_eq!(fs::read_to_string(narrow.join("sweep.csv")).unwrap().lines().count(), 1 + 2 * 2);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = generate(tmp.path(), "g", &[]);
    let truth = dir.join("truth.json");

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "u,v,t\n0,1,0.5\n2,2,1\n").unwrap();
    let out = mosaic(&["evaluate", "--edges", s(&bad), "--truth", s(&truth), "--out", s(&dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = mosaic(&["stats", "--edges", s(&tmp.path().join("missing.csv")), "--truth", s(&truth)]);
    assert_eq!(out.status.code(), Some(3));

    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, "{\"window\": 0}").unwrap();
    assert_eq!(mosaic(&["generate", "--config", s(&cfg)]).status.code(), Some(2));
    fs::write(&cfg, "{\n\"scenario\": [}").unwrap();
    let out = mosaic(&["generate", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(mosaic(&["detect", "--edges", "x", "--truth", "y", "--method", "louvain"]).status.code(), Some(2));
    assert_eq!(mosaic(&["sweep", "--phi", "0.7"]).status.code(), Some(2));
    assert_eq!(mosaic(&["frobnicate"]).status.code(), Some(2));

    let overlapping = tmp.path().join("overlap.json");
    fs::write(
        &overlapping,
        r#"{"nodes": 3, "t_start": 0, "t_end": 4, "mosaics": [
            {"id": 0, "nodes": [0, 1], "t_start": 0, "t_end": 3},
            {"id": 1, "nodes": [1, 2], "t_start": 2, "t_end": 4}]}"#,
    )
    .unwrap();
    let out = mosaic(&["validate", "--truth", s(&overlapping)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("node 1"));

    // the output directory cannot be created under a regular file
    let blocked = bad.join("sub");
    let out = mosaic(&["generate", "--config", s(&small_config(tmp.path())), "--out", s(&blocked)]);
    assert_eq!(out.status.code(), Some(3));
}
