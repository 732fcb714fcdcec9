use std::path::PathBuf;
use std::process::{Command, Output};

fn alcsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alcsat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sample() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/animal_parts.alc").display().to_string()
}

#[test]
fn check_unsat_inline() {
    let o = alcsat(&["check", "A & !A"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "UNSAT");
}

#[test]
fn check_sample_file_with_model_and_oracle() {
    let o = alcsat(&["check", "--strategy", "plus", "--model", "--oracle", &sample()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("SAT"));
    let model: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(model["domain"], serde_json::json!([0, 1]));
    assert_eq!(model["names"]["Animal"], serde_json::json!([0]));
    assert_eq!(model["names"]["Leg"], serde_json::json!([1]));
    assert_eq!(model["names"]["Wing"], serde_json::json!([]));
    assert_eq!(model["roles"]["hasPart"], serde_json::json!([[0, 1]]));
}

#[test]
fn dot_trace_has_optimized_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.dot");
    let o = alcsat(&["check", &sample(), "--trace", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dot = std::fs::read_to_string(&path).unwrap();
    assert_eq!(dot.matches("[label=\"S").count(), 8);
    assert_eq!(dot.matches("->").count(), 7);
    assert!(dot.contains("n4 [label=\"S4\\nclash\""));
    assert!(dot.contains("n1 -> n5 [label=\"A1+ forall hasPart.{{!Wing}}\"]"));
}

#[test]
fn json_trace_round_trips_through_replay() {
    let dir = tempfile::tempdir().unwrap();
    for (strategy, expr, code) in [("basic", sample(), 0), ("plus", "(A | B) & !A & !B".to_string(), 1)] {
        let path = dir.path().join(format!("{strategy}.json"));
        let o = alcsat(&["check", "--strategy", strategy, &expr, "--trace", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(code));
        let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(trace["strategy"], strategy);
        let r = alcsat(&["trace-replay", path.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(code), "{}", String::from_utf8_lossy(&r.stderr));
    }
}

#[test]
fn replay_rejects_edited_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    alcsat(&["check", "--strategy", "basic", &sample(), "--trace", path.to_str().unwrap()]);
    let mut trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    trace["clash_nodes"] = serde_json::json!([3]);
    std::fs::write(&path, trace.to_string()).unwrap();
    assert_eq!(alcsat(&["trace-replay", path.to_str().unwrap()]).status.code(), Some(2));

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(alcsat(&["trace-replay", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn cnf_prints_json() {
    let o = alcsat(&["cnf", "(A & B) | C"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, serde_json::json!([[{"pos": "A"}, {"pos": "C"}], [{"pos": "B"}, {"pos": "C"}]]));
    let t = alcsat(&["cnf", "--text", "(A & B) | C"]);
    assert_eq!(stdout(&t).trim(), "{{A, C}, {B, C}}");
}

#[test]
fn input_errors_exit_2() {
    let o = alcsat(&["check", "A &"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 4"));
    assert_eq!(alcsat(&["check", "A", "--trace", "out.txt"]).status.code(), Some(2));
    assert_eq!(alcsat(&["check", "--strategy", "fast", "A"]).status.code(), Some(2));
}

#[test]
fn node_limit_exits_4() {
    let o = alcsat(&["check", "--max-nodes", "2", &sample()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn fuzz_runs() {
    let o = alcsat(&["fuzz", "--trials", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["trials"], 100);
    assert_eq!(report["seed"], 7);
    assert_eq!(report["disagreements"], serde_json::json!([]));

    let o = alcsat(&["fuzz", "--trials", "10", "--max-depth", "1", "--roles", "0", "--log"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["log"].as_array().unwrap().len(), 10);

    assert_eq!(alcsat(&["fuzz", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(alcsat(&["fuzz", "--names", "0"]).status.code(), Some(2));
}
