use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn realpos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realpos"))
        .args(args)
        .env_remove("REALPOS_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, body: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn lemerdy() -> PathBuf {
    write("lemerdy.json", "[[1, [0, 1]], [[0, 1], 0]]")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_cones_and_exit_codes() {
    let x = lemerdy();
    let out = realpos(&["check", s(&x), "--require", "accretive"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["c_constant"], Value::Null);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((v["report"]["norm"].as_f64().unwrap() - golden).abs() < 1e-9);

    let out = realpos(&["check", s(&x), "--require", "half-f"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn strict_real_positivity_needs_an_algebra() {
    let x = write("diag.json", "[[2, 0], [0, 1]]");
    assert_eq!(realpos(&["check", s(&x), "--require", "strictly-real-positive"]).status.code(), Some(2));
    let out = realpos(&["check", s(&x), "--algebra", "diag:2", "--require", "strictly-real-positive"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["strictly_real_positive"], Value::Bool(true));
}

#[test]
fn invalid_input_exits_with_two() {
    let bad = write("ragged.json", "[[1, 2], [3]]");
    assert_eq!(realpos(&["check", s(&bad)]).status.code(), Some(2));
    assert_eq!(realpos(&["check", "/nonexistent/matrix.json"]).status.code(), Some(2));
    assert_eq!(realpos(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(realpos(&["power", s(&lemerdy()), "--alpha", "-1"]).status.code(), Some(2));
}

#[test]
fn dimension_cap_comes_from_the_environment() {
    let x = lemerdy();
    let out = Command::new(env!("CARGO_BIN_EXE_realpos"))
        .args(["check", s(&x)])
        .env("REALPOS_MAX_DIM", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(realpos(&["gen", "accretive", "--n", "17"]).status.code(), Some(2));
}

#[test]
fn transform_roundtrip_through_files() {
    let x = scratch("gen.json");
    assert!(realpos(&["gen", "accretive", "--n", "4", "--seed", "9", "--json-out", s(&x)]).status.success());
    let t = scratch("t.json");
    assert!(realpos(&["transform", s(&x), "--op", "f", "--json-out", s(&t)]).status.success());
    let out = realpos(&["check", s(&t), "--require", "half-f"]);
    assert_eq!(out.status.code(), Some(0));
    let back = realpos(&["transform", s(&t), "--op", "finv"]);
    let orig: Value = serde_json::from_str(&std::fs::read_to_string(&x).unwrap()).unwrap();
    let back = json(&back);
    let diff = orig["entries"]
        .as_array()
        .unwrap()
        .iter()
        .zip(back["entries"].as_array().unwrap())
        .map(|(a, b)| {
            let d = |k| a[k].as_f64().unwrap() - b[k].as_f64().unwrap();
            d(0).hypot(d(1))
        })
        .fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn power_methods_agree() {
    let x = write("spd.json", "[[2, [0, 0.5]], [[0, -0.5], 1]]");
    let get = |m: &str| {
        let v = json(&realpos(&["power", s(&x), "--alpha", "0.5", "--method", m]));
        v["value"]["entries"].as_array().unwrap().clone()
    };
    let spectral = get("spectral");
    for other in [get("balakrishnan"), get("auto")] {
        for (a, b) in spectral.iter().zip(&other) {
            assert!((a[0].as_f64().unwrap() - b[0].as_f64().unwrap()).abs() < 1e-6);
            assert!((a[1].as_f64().unwrap() - b[1].as_f64().unwrap()).abs() < 1e-6);
        }
    }
    let series = realpos(&["power", s(&x), "--alpha", "0.4", "--method", "series"]);
    assert_eq!(series.status.code(), Some(2));
}

#[test]
fn range_writes_csv() {
    let csv = scratch("range.csv");
    let out = realpos(&["range", s(&lemerdy()), "--grid", "8", "--csv-out", s(&csv)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,support,boundary_re,boundary_im"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn project_returns_a_projection() {
    let x = write("singular.json", "[[2, 0, 0], [0, [1, 1], 0], [0, 0, 0]]");
    let v = json(&realpos(&["project", s(&x), "--kind", "support"]));
    assert!(v["oracle_residual"].as_f64().unwrap() <= 1e-6);
    let p = &v["proj"]["entries"];
    assert!((p[0][0].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(p[8][0].as_f64().unwrap().abs() < 1e-6);
    let not_accretive = write("not-accretive.json", "[[1, 1], [0, 0]]");
    assert_eq!(realpos(&["project", s(&not_accretive), "--kind", "support"]).status.code(), Some(2));
}

#[test]
fn algebra_commands() {
    let v = json(&realpos(&["algebra", "a-h", "span:2:E11,E12"]));
    assert_eq!(v["dim"], 1);
    let v = json(&realpos(&["algebra", "amplify", "upper:2", "--k", "2"]));
    assert_eq!(v["dim"], 12);
    let g = write("gen-e12.json", "[[0, 1], [0, 0]]");
    let v = json(&realpos(&["algebra", "generate", s(&g), "--unital"]));
    assert_eq!(v["dim"], 2);
}

#[test]
fn interp_solves_a_dominate_problem() {
    let p = write("dominate.json", r#"{"algebra": "upper:2", "b": [[0.5, 0], [0, 0]]}"#);
    let out = realpos(&["interp", "--theorem", "dominate", "--problem", s(&p)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "feasible");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["holds"] == Value::Bool(true)));

    let unknown = write("unknown-field.json", r#"{"algebra": "upper:2", "b": [[0.5, 0], [0, 0]], "x": 1}"#);
    assert_eq!(realpos(&["interp", "--theorem", "dominate", "--problem", s(&unknown)]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_apart_from_wall_time() {
    let run = || {
        let out = realpos(&["verify", "support", "vav", "--cases", "8", "--seed", "5"]);
        assert_eq!(out.status.code(), Some(0));
        let mut v = json(&out);
        for r in v["suites"].as_array_mut().unwrap() {
            r["wall_time_s"] = Value::Null;
        }
        v.to_string()
    };
    assert_eq!(run(), run());
}

#[test]
fn verify_lists_suites_and_writes_margins() {
    let v = json(&realpos(&["verify", "--list"]));
    assert!(v.as_array().unwrap().iter().any(|s| s["name"] == "lemerdy"));
    let csv = scratch("margins.csv");
    let out = realpos(&["verify", "lemerdy", "i-not-in-c", "--cases", "3", "--csv-out", s(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("suite,case,seed,n,margin,passed\n"));
    assert_eq!(text.lines().count(), 1 + 3 + 3);
}
