use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn seqspace(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_seqspace")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn verdicts(report: &str) -> Vec<(String, String)> {
    let v: Value = serde_json::from_str(report).unwrap();
    v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["invariant"].as_str().unwrap().to_string(), x["status"].as_str().unwrap().to_string()))
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn unorm_p1_four_passes() {
    let (code, out) = seqspace(&["unorm", "--n-from", "2", "--n-to", "5"]);
    assert_eq!(code, 0);
    assert_eq!(verdicts(&out).len(), 4);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "seqspace-report/1");
    assert_eq!(v["config"]["p"], "1/1");
}

#[test]
fn p_zero_rejected() {
    assert_eq!(seqspace(&["--p", "0", "unorm"]).0, 1);
}

#[test]
fn family_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("family.json");
    let out = out.to_str().unwrap();
    let (code, _) = seqspace(&["build-family", "--k", "6", "--out", out]);
    assert_eq!(code, 0);
    let first = std::fs::read_to_string(out).unwrap();
    let (code, replayed) = seqspace(&["replay", out]);
    assert_eq!(code, 0);
    assert_eq!(verdicts(&first), verdicts(&replayed));
}

#[test]
fn single_vector_family() {
    let (code, out) = seqspace(&["build-family", "--k", "1", "--window", "10"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificates"]["trace"]["outputs"][0]["corrections"].as_array().unwrap().len(), 0);
}

#[test]
fn output_is_deterministic() {
    let a = seqspace(&["build-family", "--k", "4", "--oracle", "geometric", "--window", "80"]).1;
    let b = seqspace(&["build-family", "--k", "4", "--oracle", "geometric", "--window", "80"]).1;
    assert_eq!(a, b);
    let c = seqspace(&["lineable-demo", "--seed", "9"]).1;
    assert_eq!(c, seqspace(&["lineable-demo", "--seed", "9"]).1);
}

#[test]
fn tampered_lambda_fails() {
    let (_, out) = seqspace(&["build-family", "--k", "3", "--window", "30"]);
    let mut v: Value = serde_json::from_str(&out).unwrap();
    let mut trace = v["certificates"]["trace"].take();
    trace["steps"][1]["construction"]["lambda"] = Value::String("1".into());
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.json", &trace.to_string());
    let (code, replayed) = seqspace(&["replay", &path]);
    assert_eq!(code, 1);
    let vs = verdicts(&replayed);
    assert!(vs.contains(&("lambda-inequality".into(), "fail".into())));
}

#[test]
fn missing_field_is_schema_error() {
    let (_, out) = seqspace(&["build-family", "--k", "2", "--window", "20"]);
    let mut v: Value = serde_json::from_str(&out).unwrap();
    let mut trace = v["certificates"]["trace"].take();
    trace.as_object_mut().unwrap().remove("window");
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.json", &trace.to_string());
    let (code, stdout) = seqspace(&["replay", &path]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
}

#[test]
fn malformed_basis_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "b.json", "[{\"kind\":\"finite\"}]");
    assert_eq!(seqspace(&["extend", "--basis", &path]).0, 1);
}

#[test]
fn extend_avoids_common_zeros() {
    let basis = r#"[
        {"kind":"finite","entries":[{"index":1,"value":"1"},{"index":2,"value":"2"},{"index":4,"value":"1"},{"index":5,"value":"-1"}]},
        {"kind":"finite","entries":[{"index":2,"value":"1"},{"index":4,"value":"3"},{"index":7,"value":"1/2"},{"index":8,"value":"1"}]}
    ]"#;
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "b.json", basis);
    let (code, out) = seqspace(&["extend", "--basis", &path, "--k", "3"]);
    assert_eq!(code, 0, "{out}");
    let vs = verdicts(&out);
    assert!(vs.contains(&("common-zero-avoidance".into(), "pass".into())));
    let v: Value = serde_json::from_str(&out).unwrap();
    let reserved: Vec<u64> = serde_json::from_value(v["certificates"]["trace"]["reserved"].clone()).unwrap();
    assert!(reserved.starts_with(&[3, 6]));
}

#[test]
fn collapse_records_sign_check() {
    let (code, out) = seqspace(&["collapse", "--oracle", "geometric", "--n-max", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let sc = &v["certificates"]["collapse"]["signCheck"];
    assert_eq!(sc["closedForm"], "1/(j^q-1)");
    assert_eq!(sc["rejectedForm"], "1/(1-j^q)");
}

#[test]
fn lineable_zero_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.json", r#"{"kind":"periodic","values":["0"]}"#);
    let (code, out) = seqspace(&["lineable-demo", "--t-file", &path, "--window", "12"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificates"]["input"]["values"][0], "0/1");
}
