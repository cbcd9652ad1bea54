use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TWO_TRIANGLES: &str = "# two triangles joined by 2-3\n0 1\n0 2\n1 2\n2 3\n3 4\n3 5\n4 5\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphpum"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn malformed_edge_file_reports_line() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", "0 1\n1 2\n1 two\n");
    let out = dir.path().join("c.json");
    let o = run(&["partition", "--graph", s(&g), "--n-samples", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn disconnected_graph_is_input_error() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", "0 1\n2 3\n");
    let out = dir.path().join("c.json");
    let o = run(&["partition", "--graph", s(&g), "--n-samples", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn interpolate_without_signal_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let out = dir.path().join("r.json");
    let o = run(&["interpolate", "--graph", s(&g), "--n-samples", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn benchmark_rejects_bad_counts() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let out = dir.path().join("b.json");
    for counts in ["", "3,2", "2,9"] {
        let o = run(&[
            "benchmark", "--graph", s(&g), "--synthetic", "--counts", counts, "--out", s(&out),
        ]);
        assert_eq!(o.status.code(), Some(1), "counts {counts:?}: {}", stderr(&o));
    }
}

#[test]
fn numerical_failure_exit_code() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let out = dir.path().join("c.json");
    // max degree 3, so alpha = 0.5 diverges
    let o = run(&[
        "partition", "--graph", s(&g), "--n-samples", "2", "--alpha", "0.5", "--out", s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn partition_two_triangles() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let w = write(dir.path(), "w.txt", "0\n5\n");
    let out = dir.path().join("c.json");
    let o = run(&["partition", "--graph", s(&g), "--samples", s(&w), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cover = json(&out);
    assert_eq!(cover["communities"].as_array().unwrap().len(), 2);
    let plot = fs::read_to_string(dir.path().join("c.plot.csv")).unwrap();
    assert_eq!(plot.lines().count(), 7);
    assert!(plot.starts_with("vertex_id,community,overlap_communities,is_sample\n0,"));

    let w1 = write(dir.path(), "w1.txt", "4\n");
    let o = run(&["partition", "--graph", s(&g), "--samples", s(&w1), "--out", s(&out)]);
    assert!(o.status.success());
    assert_eq!(json(&out)["communities"].as_array().unwrap().len(), 1);
}

#[test]
fn interpolate_all_samples_is_exact() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let y = write(dir.path(), "y.csv", "vertex_id,value\n0,1\n1,2\n2,3\n3,-1\n4,0.5\n5,2\n");
    let w = write(dir.path(), "w.txt", "0\n1\n2\n3\n4\n5\n");
    let out = dir.path().join("r.json");
    let o = run(&[
        "interpolate", "--graph", s(&g), "--signal", s(&y), "--samples", s(&w), "--baseline", "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&out);
    assert!(r["rrmse"].as_f64().unwrap() <= 1e-6);
    assert!(r["wall_times"]["interpolate_s"].as_f64().is_some());
    for companion in ["r.cover.json", "r.vertices.csv", "r.baseline.json"] {
        assert!(dir.path().join(companion).exists(), "{companion}");
    }
    let b = json(&dir.path().join("r.baseline.json"));
    assert_eq!(b["n_communities"], 1);
}

#[test]
fn outputs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let mut runs = Vec::new();
    for tag in ["a", "b"] {
        let out = dir.path().join(format!("{tag}.json"));
        let o = run(&[
            "interpolate", "--graph", s(&g), "--synthetic", "--n-samples", "3", "--seed", "7", "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let mut result = json(&out);
        result.as_object_mut().unwrap().remove("wall_times");
        runs.push((
            result,
            fs::read(dir.path().join(format!("{tag}.cover.json"))).unwrap(),
            fs::read(dir.path().join(format!("{tag}.vertices.csv"))).unwrap(),
        ));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn benchmark_writes_table() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let out = dir.path().join("b.json");
    let o = run(&[
        "benchmark", "--graph", s(&g), "--synthetic", "--counts", "2,4,6", "--baseline", "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&out);
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    let table = fs::read_to_string(dir.path().join("b.table.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.starts_with("N,communities,rrmse,time_s,interpolate_time_s,baseline_time_s,baseline_rrmse\n"));
}

#[test]
fn signal_subcommand_round_trips() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.edges", TWO_TRIANGLES);
    let out = dir.path().join("y.csv");
    let o = run(&["signal", "--graph", s(&g), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let y = graphpum::io::read_signal_file(&out, 6).unwrap();
    assert_eq!(y.len(), 6);
}
