use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn rmaps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmaps")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn critical_report() {
    let v = json_of(&rmaps(&["critical", "--function", "example"]));
    assert_eq!(v["m"], 6);
    assert_eq!(v["q"], 6);
    assert_eq!(v["riemann_hurwitz"]["ok"], true);
    assert_eq!(v["riemann_hurwitz"]["ramification_sum"], 8);
    let v = json_of(&rmaps(&["critical", "--function", "power:4"]));
    assert_eq!(v["q"], 2);
}

#[test]
fn degree_one_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", r#"{"num": [[0, 0], [1, 0]], "den": [1]}"#);
    let out = rmaps(&["critical", "--function", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn exit_codes_for_io_and_flags() {
    let out = rmaps(&["critical", "--function", "/nonexistent/f.json"]);
    assert_eq!(out.status.code(), Some(4));
    let out = rmaps(&["tessellate", "--function", "example", "--epsilon", "-1"]);
    assert!(!out.status.success());
}

#[test]
fn tessellations() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("t.svg");
    let v = json_of(&rmaps(&[
        "tessellate",
        "--function",
        "example",
        "--gamma",
        "real",
        "--svg",
        svg.to_str().unwrap(),
    ]));
    let s = &v["summary"];
    assert_eq!((s["vertices"].as_u64(), s["edges"].as_u64(), s["faces"].as_u64()), (Some(22), Some(30), Some(10)));
    assert_eq!(s["labelling_consistent"], true);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let v = json_of(&rmaps(&["tessellate", "--function", "power:3"]));
    assert_eq!(v["summary"]["vertices"], 2);
    assert_eq!(v["summary"]["gonality"], 2);

    // random coefficients give complex critical values, so the default polygon is used
    let v = json_of(&rmaps(&["tessellate", "--function", "random:4", "--seed", "5"]));
    assert_eq!(v["summary"]["genus"], 0);
    assert_eq!(v["summary"]["faces"], 8);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = rmaps(&["tessellate", "--function", "belyi", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn counts(v: &Value) -> Vec<(u64, u64)> {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["q"].as_u64().unwrap(), r["count"].as_u64().unwrap()))
        .collect()
}

#[test]
fn labelling_census() {
    let v = json_of(&rmaps(&["labellings", "--map", "fig1a", "--canonical"]));
    assert_eq!(v["admissible_range"], serde_json::json!([4, 6]));
    assert!(counts(&v).iter().all(|&(_, c)| c > 0));
    let v = json_of(&rmaps(&["labellings", "--map", "fig1a", "--q", "3..7", "--canonical"]));
    let c = counts(&v);
    assert_eq!(c.first().unwrap(), &(3, 0));
    assert_eq!(c.last().unwrap(), &(7, 0));

    let v = json_of(&rmaps(&["labellings", "--map", "bigon:3"]));
    assert_eq!(counts(&v), vec![(2, 2)]);
}

#[test]
fn empty_range_is_reported() {
    let dir = TempDir::new().unwrap();
    // one vertex, three edges, two triangles on the torus
    let hex = write(
        &dir,
        "hex.json",
        r#"{"half_edges": [
            {"id": 0, "twin": 3, "origin": 0}, {"id": 1, "twin": 4, "origin": 0},
            {"id": 2, "twin": 5, "origin": 0}, {"id": 3, "twin": 0, "origin": 0},
            {"id": 4, "twin": 1, "origin": 0}, {"id": 5, "twin": 2, "origin": 0}],
           "vertices": [{"id": 0, "rot": [0, 1, 2, 3, 4, 5]}]}"#,
    );
    let v = json_of(&rmaps(&["labellings", "--map", &hex]));
    assert!(v["admissible_range"].is_null());
    assert!(v["range_error"].as_str().unwrap().contains("empty"));
    assert!(v["results"].as_array().unwrap().is_empty());
}

#[test]
fn realizations() {
    let dir = TempDir::new().unwrap();
    let census = json_of(&rmaps(&["labellings", "--map", "fig1a", "--q", "6", "--canonical"]));
    let labels = &census["results"][0]["labellings"][0];
    let l = write(&dir, "l.json", &format!(r#"{{"q": 6, "labels": {labels}}}"#));
    let v = json_of(&rmaps(&["realize", "--map", "fig1a", "--labelling", &l]));
    assert_eq!(v["genus"], 0);
    assert_eq!(v["degree"], 5);

    let v = json_of(&rmaps(&["realize", "--map", "example-rmap"]));
    let mut types: Vec<Value> = v["cycle_types"].as_array().unwrap().clone();
    types.sort_by_key(|t| t.to_string());
    assert_eq!(types.last().unwrap(), &serde_json::json!([4, 1]));
    assert_eq!(types.iter().filter(|t| **t == serde_json::json!([2, 1, 1, 1])).count(), 5);

    let v = json_of(&rmaps(&["realize", "--map", "torus"]));
    assert_eq!(v["genus"], 1);

    let bad = write(&dir, "bad.json", r#"{"q": 6, "labels": [1, 1, 1, 1, 1, 1]}"#);
    let out = rmaps(&["realize", "--map", "fig1a", "--labelling", &bad]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation() {
    let v = json_of(&rmaps(&["validate", "--map", "l-chessboard"]));
    assert_eq!(v["ok"], true);
    assert_eq!(v["genus"], 2);

    let dir = TempDir::new().unwrap();
    let broken = write(
        &dir,
        "twin.json",
        r#"{"half_edges": [{"id": 0, "twin": 0, "origin": 0}], "vertices": [{"id": 0, "rot": [0]}]}"#,
    );
    let out = rmaps(&["validate", "--map", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("involution"));

    // a single edge has the same face on both sides
    let tree = write(
        &dir,
        "tree.json",
        r#"{"half_edges": [{"id": 0, "twin": 1, "origin": 0}, {"id": 1, "twin": 0, "origin": 1}],
           "vertices": [{"id": 0, "rot": [0]}, {"id": 1, "rot": [1]}]}"#,
    );
    let out = rmaps(&["validate", "--map", &tree]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bipartite"));

    let out = rmaps(&["validate", "--map", "fake-value"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["labelling"]["consistent"], false);
}

#[test]
fn map_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    let v = json_of(&rmaps(&["realize", "--map", "hyperelliptic"]));
    std::fs::write(&out, serde_json::to_string(&v["rmap"]).unwrap()).unwrap();
    let again = json_of(&rmaps(&["validate", "--map", out.to_str().unwrap()]));
    assert_eq!(again["ok"], true);
    assert_eq!(again["genus"], 2);
}

#[test]
fn rendering() {
    let dir = TempDir::new().unwrap();
    let svg = dir.path().join("p.svg");
    let out = rmaps(&["render", "--function", "power:3", "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<path class=\"tile\"").count(), 5);

    let out = rmaps(&["render", "--map", "fig1a"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph"));
    assert_eq!(dot.matches("[label=").count(), 6);
    assert!(Path::new(&svg).exists());
}
