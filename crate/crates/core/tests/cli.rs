use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const P1XP1: &str = r#"{
  "surface": { "b2": 2, "gram": [[0, 1], [1, 0]], "K": [-2, -2], "n2": 1 },
  "chern": { "c1": [1, 1], "c2": 2 },
  "polarizations": { "H_minus": [1, 2], "H_plus": [2, 1] },
  "C": [10, -10]
}"#;

fn config(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], cfg: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wallcross"));
    cmd.args(args);
    if let Some(p) = cfg {
        cmd.arg("--config").arg(p);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn walls_on_p1xp1() {
    let f = config(P1XP1);
    let v = json(&run(&["walls", "--json"], Some(f.path())));
    let walls = v["walls"].as_array().unwrap();
    assert_eq!(walls.len(), 1);
    assert_eq!(walls[0]["xi"], serde_json::json!([-1, 1]));
    assert_eq!(walls[0]["d"], 1);
    assert_eq!(walls[0]["e"], 3);
    assert_eq!(walls[0]["goodness"], "certified");
    let table = run(&["walls"], Some(f.path()));
    assert!(String::from_utf8(table.stdout)
        .unwrap()
        .contains("certified"));
}

#[test]
fn rank_one_surface_has_no_walls() {
    let f = config(
        r#"{"surface":{"b2":1,"gram":[[1]],"K":[-3]},"chern":{"c1":[1],"c2":3},
            "polarizations":{"H_minus":[1],"H_plus":[2]}}"#,
    );
    let out = run(&["walls", "--json"], Some(f.path()));
    assert_eq!(json(&out)["walls"], serde_json::json!([]));
}

#[test]
fn config_errors_exit_with_two() {
    let asym = config(
        r#"{"surface":{"b2":2,"gram":[[0,1],[2,0]],"K":[-2,-2]},"chern":{"c1":[1,1],"c2":2},
            "polarizations":{"H_minus":[1,2],"H_plus":[2,1]}}"#,
    );
    let out = run(&["walls"], Some(asym.path()));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gram not symmetric"));

    let unknown = config(&P1XP1.replacen("\"C\"", "\"extra\": 1, \"C\"", 1));
    assert_eq!(run(&["walls"], Some(unknown.path())).status.code(), Some(2));

    let short = config(&P1XP1.replace("\"c1\": [1, 1]", "\"c1\": [1]"));
    assert_eq!(run(&["walls"], Some(short.path())).status.code(), Some(2));

    assert_eq!(
        run(&["walls"], Some(Path::new("/nonexistent/problem.json")))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bad_polarization_exits_with_three() {
    let f = config(&P1XP1.replace("\"H_minus\": [1, 2]", "\"H_minus\": [1, -2]"));
    assert_eq!(run(&["walls"], Some(f.path())).status.code(), Some(3));
}

#[test]
fn miniwalls_on_p1xp1() {
    let f = config(P1XP1);
    for xi in ["-1,1", "0", "[-1,1]"] {
        let v = json(&run(&["miniwalls", "--json", "--xi", xi], Some(f.path())));
        let a: Vec<&str> = v[0]["miniwalls"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m["a"].as_str().unwrap())
            .collect();
        assert_eq!(a, ["19/40", "21/40"]);
    }
}

#[test]
fn miniwall_errors_exit_with_four() {
    let missing = config(&P1XP1.replace(",\n  \"C\": [10, -10]", ""));
    assert_eq!(
        run(&["miniwalls", "--xi", "0"], Some(missing.path()))
            .status
            .code(),
        Some(4)
    );
    let degenerate = config(&P1XP1.replace("[10, -10]", "[1, 1]"));
    assert_eq!(
        run(&["miniwalls", "--xi", "0"], Some(degenerate.path()))
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn d_zero_wall_has_at_most_one_miniwall() {
    // xi = (-1,1) with c2 = 1 gives d = 0
    let f = config(&P1XP1.replace("\"c2\": 2", "\"c2\": 1"));
    let v = json(&run(&["miniwalls", "--json"], Some(f.path())));
    for w in v.as_array().unwrap() {
        assert_eq!(w["d"], 0);
        assert!(w["miniwalls"].as_array().unwrap().len() <= 1);
    }
}

#[test]
fn delta_on_p1xp1() {
    let f = config(P1XP1);
    let v = json(&run(
        &["delta", "--json", "--l", "3", "--r", "0", "--alpha", "1,1"],
        Some(f.path()),
    ));
    let w = &v["walls"][0];
    assert_eq!(w["exact"], true);
    assert_eq!(
        w["terms"],
        serde_json::json!([{"coef": "-28", "powL": 3, "powQ": 0}, {"coef": "-6", "powL": 1, "powQ": 1}])
    );
    assert_eq!(v["alpha_eval"], "0");
    assert_eq!(v["n2"], 1);
    assert_eq!(v["sign"], 1);
    let v = json(&run(
        &["delta", "--json", "--l", "3", "--r", "0", "--alpha", "1,0"],
        Some(f.path()),
    ));
    assert_eq!(v["alpha_eval"], "-7/2");
    assert_eq!(v["alpha_eval_kind"], "exact");
}

#[test]
fn weight_mismatch_exits_with_five() {
    let f = config(P1XP1);
    assert_eq!(
        run(&["delta", "--l", "2", "--r", "1"], Some(f.path()))
            .status
            .code(),
        Some(5)
    );
}

#[test]
fn verify_quick_level_and_mutation() {
    let quick = json(&run(
        &["verify", "--json", "--level", "1", "--seed", "4"],
        None,
    ));
    let names: Vec<&str> = quick["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["oracle vs closed form"]);

    let out = run(&["verify", "--json", "--mutate", "--seed", "4"], None);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&str> = v["suites"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["passed"] == false)
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["P→Q substitution"]);
}

#[test]
fn verify_with_config_is_deterministic() {
    let f = config(P1XP1);
    let a = run(&["verify", "--json", "--seed", "11"], Some(f.path()));
    let b = run(&["verify", "--json", "--seed", "11"], Some(f.path()));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}
