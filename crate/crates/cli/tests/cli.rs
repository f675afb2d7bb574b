use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn picolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_picolor")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const C5: &str = "p edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n";

#[test]
fn color_greedy_writes_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("q5.txt");
    let graph = data("color/queen5-5.col");
    let out = picolor(&["color", graph.to_str().unwrap(), "--solver", "greedy", "-o", out_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["cost"], 0);
    assert_eq!(report["chi_upper"], 5);
    assert_eq!(report["solver"], "GREEDY");
    let lines = std::fs::read_to_string(out_file).unwrap();
    assert_eq!(lines.lines().filter(|l| !l.starts_with('c')).count(), 25);
}

#[test]
fn color_with_preset() {
    let graph = data("color/myciel5.col");
    let out = picolor(&["color", graph.to_str().unwrap(), "--preset", "myciel5", "--seeds", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["q"], 6);
    assert_eq!(report["cost"], 0);
    assert_eq!(report["stop_reason"], "ZERO_COST");
}

#[test]
fn infeasible_exits_one() {
    let graph = data("color/queen5-5.col");
    let out = picolor(&["color", graph.to_str().unwrap(), "--solver", "tabucol", "-q", "4", "--iterations", "2000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["cost"].as_u64().unwrap() > 0);
}

#[test]
fn purify_turns_infeasible_into_feasible() {
    let graph = data("color/queen5-5.col");
    let out = picolor(&[
        "color",
        graph.to_str().unwrap(),
        "--solver",
        "tabucol",
        "-q",
        "4",
        "--iterations",
        "2000",
        "--purify",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["chi_upper"].as_u64().unwrap() >= 5);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = picolor(&["color", "/nonexistent.col", "--solver", "greedy"]);
    assert_eq!(out.status.code(), Some(2));
    let bad = write(dir.path(), "bad.col", "p edge 3 1\ne 1 4\n");
    let out = picolor(&["oracle", &bad, "-q", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let csv = write(dir.path(), "r.csv", "id,begin,end\nA,1,2\n");
    assert_eq!(picolor(&["schedule", &csv]).status.code(), Some(2));
}

#[test]
fn oracle_counts_and_chromatic_number() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write(dir.path(), "c5.col", C5);
    let out = picolor(&["oracle", &c5, "-q", "3"]);
    assert_eq!(json(&out)["proper_colorings"], 30);
    let out = picolor(&["oracle", &c5]);
    assert_eq!(json(&out)["chromatic_number"], 3);
    let big = data("color/queen13-13.col");
    let out = picolor(&["oracle", big.to_str().unwrap(), "-q", "13", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chromatic_search() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write(dir.path(), "c5.col", C5);
    let out = picolor(&["chromatic", &c5]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["q_upper"], 3);
    let out = picolor(&["chromatic", &c5, "--strategy", "binary", "--q-max", "4"]);
    assert_eq!(json(&out)["q_upper"], 3);
    let out = picolor(&["chromatic", &c5, "--q-max", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["q_upper"].is_null());
    let myciel = data("color/myciel3.col");
    let out = picolor(&["chromatic", myciel.to_str().unwrap(), "--exact"]);
    assert_eq!(json(&out)["chromatic_number"], 4);
}

#[test]
fn schedule_sample() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let sample = data("schedule/sample.csv");
    let out = picolor(&["schedule", sample.to_str().unwrap(), "--summary", summary.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("id,resource\n"));
    assert_eq!(csv.lines().count(), 7);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(s["resources_used"], 3);
    assert_eq!(s["lower_bound"], 3);
    assert_eq!(s["feasible"], true);
}

#[test]
fn closed_intervals_make_touching_bookings_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "touch.csv", "id,start,end\nA,09:00,10:00\nB,10:00,11:00\n");
    let summary = dir.path().join("s.json");
    let s = summary.to_str().unwrap();
    for (flag, expected) in [(None, 1), (Some("--closed-intervals"), 2)] {
        let mut args = vec!["schedule", csv.as_str(), "--solver", "greedy", "--summary", s];
        args.extend(flag);
        assert_eq!(picolor(&args).status.code(), Some(0));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
        assert_eq!(v["resources_used"], expected);
    }
}

#[test]
fn bench_writes_stable_results() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = format!(
        "[[run]]\ngraph = \"{}\"\nsolver = \"GREEDY\"\n\n[[run]]\ngraph = \"{}\"\nsolver = \"TABUCOL\"\nq = 7\nseeds = 2\n",
        data("color/queen5-5.col").display(),
        data("color/queen7-7.col").display()
    );
    let path = write(dir.path(), "m.toml", &manifest);
    let mut results = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = picolor(&["bench", &path, "-o", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join("timings.json").exists());
        assert!(out_dir.join("results.csv").exists());
        results.push(std::fs::read_to_string(out_dir.join("results.json")).unwrap());
    }
    assert_eq!(results[0], results[1]);
    let rows: Value = serde_json::from_str(&results[0]).unwrap();
    assert_eq!(rows[0]["report"]["chi_upper"], 5);
    assert_eq!(rows[1]["report"]["cost"], 0);

    let broken = write(dir.path(), "broken.toml", "[[run]]\ngraph = \"missing.col\"\nsolver = \"GREEDY\"\n");
    let out = picolor(&["bench", &broken, "-o", dir.path().join("c").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
