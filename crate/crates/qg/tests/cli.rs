use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const FIG2A: &str = "\
objective mcr
vertex v1 max
vertex v2 min
vertex v3 max target
edge v1 v2 -1
edge v1 v3 -50
edge v2 v1 0
edge v2 v3 0
edge v3 v3 0
";

const FIG1A: &str = "\
objective tp
vertex v1 max
vertex v2 min
vertex v3 min
vertex v4 max
vertex v5 min
edge v1 v2 2
edge v2 v1 -1
edge v2 v3 -1
edge v3 v4 2
edge v4 v3 -2
edge v4 v5 -1
edge v5 v4 1
";

fn qg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qg")).args(args).output().unwrap()
}

fn qg_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig2a.game", FIG2A);
    let a = qg(&["solve", &f, "--json"]);
    let b = qg(&["solve", &f, "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["values"]["v1"], -50);
    assert_eq!(doc["values"]["v3"], 0);
    assert_eq!(doc["stats"]["sweeps"], 102);
    assert!(doc["stats"].get("wall_ms").is_none());
    let timed = qg(&["solve", &f, "--json", "--stats"]);
    let doc: Value = serde_json::from_slice(&timed.stdout).unwrap();
    assert!(doc["stats"]["wall_ms"].is_u64());
}

#[test]
fn solve_reports_only_file_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let text = "objective mcr\nvertex a min target\nvertex b max target\nvertex c min\nedge c a 1\nedge c b 2\nedge a a 0\nedge b b 0\n";
    let f = write(dir.path(), "multi.game", text);
    let o = qg(&["solve", &f, "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<_> = doc["values"].as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, ["a", "b", "c"]);
    assert_eq!(doc["values"]["c"], 1);
}

#[test]
fn accelerated_solve_matches_plain() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig1a.game", FIG1A);
    let plain: Value = serde_json::from_slice(&qg(&["solve", &f, "--json"]).stdout).unwrap();
    for accel in ["scc", "scc+paths"] {
        let o = qg(&["solve", &f, "--json", "--accel", accel]);
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc["values"], plain["values"]);
    }
    assert_eq!(plain["values"]["v4"], -1);
}

#[test]
fn trace_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig2a.game", FIG2A);
    let t = dir.path().join("trace.tsv");
    let o = qg(&["solve", &f, "--trace", t.to_str().unwrap()]);
    assert!(o.status.success());
    let trace = fs::read_to_string(&t).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "step\tv1\tv2\tv3");
    assert_eq!(lines[1], "0\t+inf\t+inf\t0");
    assert_eq!(lines[3], "2\t-1\t0\t0");
    assert!(qg(&["solve", &f, "--trace", t.to_str().unwrap(), "--accel", "scc"]).status.code() == Some(2));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.game", "objective tp\nvertex a max\nedge a b 1\n");
    let o = qg(&["solve", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(qg(&["solve", "/nonexistent/file"]).status.code(), Some(2));
    assert_eq!(qg(&["frobnicate"]).status.code(), Some(2));
    let dead = write(dir.path(), "dead.game", "objective tp\nvertex a max\n");
    assert_eq!(qg(&["solve", &dead]).status.code(), Some(2));
}

#[test]
fn vertex_limit_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig1a.game", FIG1A);
    let o = Command::new(env!("CARGO_BIN_EXE_qg")).args(["solve", &f]).env("QG_MAX_VERTICES", "3").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn strategy_output() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig2a.game", FIG2A);
    let o = qg(&["strategy", &f, "--json"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["max"]["choice"]["v1"], "v3");
    assert_eq!(doc["min"]["kind"], "switching");
    assert_eq!(doc["min"]["sigma1"]["v2"], "v1");
    assert_eq!(doc["min"]["sigma2"]["v2"], "v3");
    assert_eq!(doc["min_counter"]["kind"], "moore");
    let only_max: Value = serde_json::from_slice(&qg(&["strategy", &f, "--json", "--player", "max"]).stdout).unwrap();
    assert!(only_max.get("min").is_none());

    let g = write(dir.path(), "fig1a.game", FIG1A);
    let text = stdout(&qg(&["strategy", &g]));
    assert!(text.contains("min v2 -> v3"));
    assert!(text.contains("min v5 -> v4"));
}

#[test]
fn check_file_and_random() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig1a.game", FIG1A);
    assert_eq!(qg(&["check", &f]).status.code(), Some(0));
    let o = qg(&["check", "--random", "seed=1", "count=30", "vmax=4", "wmax=2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("mcr: 30 random arenas"));
    assert!(text.contains("tp: 30 random arenas"));
    assert_eq!(qg(&["check", "--random", "bogus=1"]).status.code(), Some(2));
}

#[test]
fn gen_and_convert() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("layered.game");
    let o = qg(&["gen", "layered", "--W", "5", "--n", "2", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("objective tp\n"));
    assert_eq!(stdout(&qg(&["convert", out.to_str().unwrap()])), text);
    let dot = stdout(&qg(&["convert", out.to_str().unwrap(), "--dot", "--values"]));
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("label=\"c0\\n5\""));
    let mcr = stdout(&qg(&["gen", "layered", "--objective", "mcr"]));
    assert_eq!(qg(&["gen", "fig1a", "--objective", "mcr"]).status.code(), Some(2));
    assert!(mcr.starts_with("objective mcr"));
}

#[test]
fn bench_csv() {
    let o = qg(&["bench", "--family", "layered", "--W-list", "5,10", "--n-list", "2", "--accel", "none,scc+paths"]);
    assert!(o.status.success());
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["family", "W", "n", "accel", "k_e", "k_i", "wall_ms", "values_hash"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][3], "none");
    assert_eq!(&rows[0][6], "");
    assert_eq!(rows[0][7], rows[1][7]);
    let timed = qg(&["bench", "--W-list", "5", "--n-list", "1", "--stats"]);
    let mut reader = csv::Reader::from_reader(timed.stdout.as_slice());
    let row = reader.records().next().unwrap().unwrap();
    assert!(row[6].parse::<u64>().is_ok());
}

#[test]
fn play_as_max() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig2a.game", FIG2A);
    let o = qg_stdin(&["play", &f, "--as", "max"], "v2\nv3\n");
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("machine moves to v1"));
    assert!(text.contains("target reached, payoff -51"));
}

#[test]
fn play_as_min_rejects_bad_moves() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fig2a.game", FIG2A);
    let o = qg_stdin(&["play", &f, "--as", "min", "--start", "v2"], "nowhere\n1\n");
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("not a successor of v2"));
    assert!(text.contains("target reached, payoff 0"));
}
