use std::path::PathBuf;
use std::process::Command;

use genholo::report::Status;
use genholo::task::{run, TaskFile};

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tasks").join(name)
}

fn genholo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_genholo"))
}

fn write_temp(json: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), json).unwrap();
    f
}

#[test]
fn normal_form_file_passes() {
    let file = TaskFile::load(&bundled("normalform.json")).unwrap();
    let r = run(&file, 2);
    for t in &r.tasks {
        assert_eq!(t.status, Status::Pass, "{}: {:?}", t.id, t.message);
    }
    assert!(r.all_pass());
    let witness = |id: &str, name: &str| {
        let t = r.tasks.iter().find(|t| t.id == id).unwrap();
        t.witnesses.iter().find(|w| w.name == name).unwrap().value.clone()
    };
    assert_eq!(witness("tautological-section", "tau"), "z1");
    assert_eq!(witness("sections-module", "connection"), "[[e2,0],[0,0]]");
    assert_eq!(witness("purity", "pairing"), "-dz1^dz2^dzb1^dzb2");
}

#[test]
fn serre_file_passes_with_small_spread() {
    let file = TaskFile::load(&bundled("serre.json")).unwrap();
    let r = run(&file, 2);
    assert!(r.all_pass(), "{}", r.to_text());
    let flux = r.tasks.iter().find(|t| t.id == "flux-constant").unwrap();
    let spread = flux.metrics.iter().find(|m| m.name == "spread").unwrap().value;
    assert!(spread < 1e-8);
    let off = r.tasks.iter().find(|t| t.id == "data-off-curve").unwrap();
    assert_eq!(off.outcome.as_deref(), Some("fail"));
    assert!(off.message.as_deref().unwrap().contains("(1, 0)"));
}

#[test]
fn reports_are_identical_across_parallelism() {
    for name in ["normalform.json", "serre.json"] {
        let file = TaskFile::load(&bundled(name)).unwrap();
        let base = run(&file, 1).without_timings().to_json();
        for jobs in [2, 4, 8] {
            assert_eq!(run(&file, jobs).without_timings().to_json(), base, "{name} with {jobs} jobs");
        }
        let ids: Vec<_> = file.tasks.iter().map(|t| t.id.clone()).collect();
        let report: serde_json::Value = serde_json::from_str(&base).unwrap();
        let got: Vec<_> =
            report["tasks"].as_array().unwrap().iter().map(|t| t["id"].as_str().unwrap().to_string()).collect();
        assert_eq!(got, ids);
    }
}

#[test]
fn binary_output_is_byte_identical_without_timings() {
    let out = |jobs: &str| {
        let o =
            genholo().args(["run", "--no-timings", "--jobs", jobs]).arg(bundled("normalform.json")).output().unwrap();
        assert!(o.status.success());
        o.stdout
    };
    assert_eq!(out("1"), out("6"));
    let env = genholo()
        .env("GENHOLO_JOBS", "3")
        .args(["run", "--no-timings"])
        .arg(bundled("normalform.json"))
        .output()
        .unwrap();
    assert_eq!(env.stdout, out("1"));
}

const UNDEFINED: &str = r#"{
  "version": 1,
  "chart": { "complex_dim": 2 },
  "defs": [ { "name": "sigma", "kind": "bivector", "expr": "z1" } ],
  "tasks": [
    { "id": "ok", "op": "jacobi", "args": { "bivector": "sigma" } },
    { "id": "missing", "op": "jacobi", "args": { "bivector": "tau" } }
  ]
}"#;

#[test]
fn undefined_name_is_an_error_and_exits_nonzero() {
    let file = TaskFile::from_json(UNDEFINED).unwrap();
    let r = run(&file, 1);
    assert_eq!(r.tasks[0].status, Status::Pass);
    assert_eq!(r.tasks[1].status, Status::Error);
    assert!(r.tasks[1].message.as_deref().unwrap().contains("undefined name `tau`"));
    let f = write_temp(UNDEFINED);
    let o = genholo().arg("run").arg(f.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn failing_definitions_surface_in_the_tasks_that_use_them() {
    let json = r#"{
      "version": 1, "chart": { "complex_dim": 2 },
      "defs": [
        { "name": "bad", "kind": "form", "expr": "z1 +" },
        { "name": "later", "kind": "form", "expr": "bad + dz1" }
      ],
      "tasks": [ { "id": "t", "op": "check-pure", "args": { "spinor": "later" } } ]
    }"#;
    let r = run(&TaskFile::from_json(json).unwrap(), 1);
    assert_eq!(r.tasks[0].status, Status::Error);
    assert!(r.tasks[0].message.as_deref().unwrap().contains("undefined name `bad`"));
}

#[test]
fn expected_failures_and_genuine_failures() {
    let json = r#"{
      "version": 1, "chart": { "complex_dim": 2 },
      "defs": [
        { "name": "sigma", "kind": "bivector", "expr": "z1" },
        { "name": "bump", "kind": "matrix", "data": [["e2 + z2*e1"]] }
      ],
      "tasks": [
        { "id": "negative-control", "op": "module-check", "args": { "bivector": "sigma", "connection": "bump" },
          "options": { "expect": "fail" } },
        { "id": "plain", "op": "module-check", "args": { "bivector": "sigma", "connection": "bump" } }
      ]
    }"#;
    let r = run(&TaskFile::from_json(json).unwrap(), 1);
    assert_eq!(r.tasks[0].status, Status::Pass);
    assert_eq!(r.tasks[1].status, Status::Fail);
    assert_eq!(r.summary.fail, 1);
}

#[test]
fn schema_violations_are_rejected() {
    let dup = r#"{"version":1,"chart":{"complex_dim":2},"defs":[{"name":"a","kind":"scalar","expr":"1"},{"name":"a","kind":"scalar","expr":"2"}],"tasks":[]}"#;
    assert!(TaskFile::from_json(dup).unwrap_err().to_string().contains("repeated"));
    let version = r#"{"version":2,"chart":{"complex_dim":2},"tasks":[]}"#;
    assert!(TaskFile::from_json(version).is_err());
    let kind = r#"{"version":1,"chart":{"complex_dim":2},"defs":[{"name":"a","kind":"tensor","expr":"1"}],"tasks":[]}"#;
    assert!(TaskFile::from_json(kind).is_err());
    let f = write_temp(dup);
    let o = genholo().arg("run").arg(f.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_op_is_an_error() {
    let json = r#"{"version":1,"chart":{"complex_dim":2},"tasks":[{"id":"x","op":"frobnicate"}]}"#;
    let r = run(&TaskFile::from_json(json).unwrap(), 1);
    assert_eq!(r.tasks[0].status, Status::Error);
}

#[test]
fn eval_prints_canonical_text() {
    let o = genholo().args(["eval", "--chart", "2", "cb(z1*e2 + dz1, -z1*e1 + dz2)"]).output().unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "gvector: vec: z1*e2; form: dz1\n");
    let bad = genholo().args(["eval", "z1 +"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let usage = genholo().args(["eval", "--chart"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn serre_flux_command_emits_one_row_per_radius() {
    let o = genholo()
        .args(["serre", "flux", "--radii", "1/2,1,2", "--eta-order", "24", "--xi-order", "48", "--test-fn", "1"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        for key in ["radius", "value_re", "value_im", "extrapolated", "spread"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        let v = r["value_re"].as_f64().unwrap();
        assert!((v.abs() - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6 * v.abs());
    }
}

#[test]
fn pbundle_build_command() {
    let ok = genholo()
        .args(["pbundle", "build", "--connection", "sections", "--structure", "normal-form"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["spinor"], "-wvar*dz1+z1*dw+dz1^dz2^dw");
    let product =
        genholo().args(["pbundle", "build", "--connection", "zero", "--structure", "complex"]).output().unwrap();
    assert!(product.status.success());
    let bad = genholo().args(["pbundle", "build", "--connection", "non-flat"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let forced = genholo().args(["pbundle", "build", "--connection", "non-flat", "--unchecked"]).output().unwrap();
    assert_eq!(forced.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&forced.stdout).unwrap();
    assert!(v["message"].as_str().unwrap().contains("no integrability witness"));
    let unknown = genholo().args(["pbundle", "build", "--structure", "kahler"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}
