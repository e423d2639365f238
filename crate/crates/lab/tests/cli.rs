//! End-to-end runs of the `qcl` binary: exit codes, artifacts, schemas and
//! reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qcl(args: &[&str], out: &Path) -> Output {
    qcl_env(args, out, &[])
}

fn qcl_env(args: &[&str], out: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcl"));
    cmd.args(args).arg("--out").arg(out);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn qcl")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Load `<command>.json`, validate it against its schema and check the listed hashes.
fn report(out: &Path, command: &str) -> Value {
    let text = fs::read_to_string(out.join(format!("{command}.json"))).expect("report written");
    let value: Value = serde_json::from_str(&text).unwrap();
    let schema: Value =
        serde_json::from_str(&fs::read_to_string(schema_dir().join(format!("{command}.schema.json"))).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{command}.json violates its schema: {errors:#?}");
    for a in value["artifacts"].as_array().unwrap() {
        let bytes = fs::read(out.join(a["file"].as_str().unwrap())).unwrap();
        assert_eq!(qcl::io::sha256_hex(&bytes), a["sha256"].as_str().unwrap());
        assert_eq!(bytes.len() as u64, a["bytes"].as_u64().unwrap());
    }
    value
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check named {name}"))
}

#[test]
fn zero_time_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["rectangle", "--t", "0"], dir.path());
    assert_eq!(code(&o), 64);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--t"));
}

#[test]
fn unknown_flags_and_bad_windows_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qcl(&["rectangle", "--bogus"], dir.path())), 64);
    assert_eq!(code(&qcl(&["rectangle", "--window", "5:1"], dir.path())), 64);
    assert_eq!(code(&qcl(&["polygon", "--shape", "triangle"], dir.path())), 64);
}

#[test]
fn rectangle_default_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["rectangle"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path(), "rectangle");
    let e = r["results"]["tail"]["exponent"].as_f64().unwrap();
    assert!((e + 2.0).abs() <= 0.05, "{e}");
    assert_eq!(r["status"], "ok");

    let (header, rows) = csv_rows(&dir.path().join("density.csv"));
    assert_eq!(header, ["y", "re", "im", "density"]);
    for row in &rows {
        for field in row {
            // shortest round-trip text: parsing and re-printing is the identity
            let v: f64 = field.parse().unwrap();
            assert_eq!(&format!("{v:?}"), field);
        }
        let (re, im, d): (f64, f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap(), row[3].parse().unwrap());
        assert_eq!(re * re + im * im, d);
    }
}

#[test]
fn rectangle_first_moment_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["rectangle", "--window", "1e2:1e4", "--t", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let r = report(dir.path(), "rectangle");
    assert_eq!(r["results"]["moment"]["verdict"], "divergent-log");
}

#[test]
fn polygon_constant_telescopes() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["polygon", "--shape", "constant"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path(), "polygon");
    assert!(r["results"]["telescoping_residual"].as_f64().unwrap() <= 1e-12);
    let (header, rows) = csv_rows(&dir.path().join("comparison.csv"));
    assert_eq!(header[0], "y");
    assert_eq!(rows.len(), 10);
}

#[test]
fn polygon_ramp_tail_is_inverse_square() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["polygon", "--shape", "ramp"], dir.path());
    assert_eq!(code(&o), 0);
    let e = report(dir.path(), "polygon")["results"]["tail"]["exponent"].as_f64().unwrap();
    assert!((e + 2.0).abs() <= 0.05, "{e}");
}

#[test]
fn polygon_half_sine_tail_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["polygon", "--shape", "half-sine"], dir.path());
    let r = report(dir.path(), "polygon");
    let e = r["results"]["tail"]["exponent"].as_f64().unwrap();
    assert!((e + 6.0).abs() <= 0.3, "half-sine tail exponent {e}, exit {}", code(&o));
    assert_eq!(code(&o), 0);
}

#[test]
fn samples_file_is_ingested() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.csv");
    let mut text = String::from("x,re,im\n");
    for j in 0..=16 {
        let x = -1.0 + j as f64 / 16.0;
        text.push_str(&format!("{x},1,0\n"));
    }
    fs::write(&samples, text).unwrap();
    let out = dir.path().join("out");
    let o = qcl(&["polygon", "--samples", samples.to_str().unwrap()], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(report(&out, "polygon")["results"]["telescoping_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn malformed_samples_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("bad.csv");
    fs::write(&samples, "x,re,im\n-1,1,0\n-0.5,1,zero\n0,1,0\n").unwrap();
    let o = qcl(&["polygon", "--samples", samples.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(code(&o), 64);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.csv:3:"), "{err}");
}

#[test]
fn sharp_single_step_equals_zero_width_taper() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("sharp"), dir.path().join("taper"));
    assert_eq!(code(&qcl(&["zeno", "--mode", "sharp", "--dt", "0.5"], &a)), 0);
    assert_eq!(code(&qcl(&["zeno", "--mode", "tapered", "--taper-width", "0", "--dt", "0.5"], &b)), 0);
    let (_, sharp) = csv_rows(&a.join("survival.csv"));
    let (_, taper) = csv_rows(&b.join("survival.csv"));
    assert_eq!(sharp.len(), 1);
    assert_eq!(sharp[0][0], "sharp");
    assert_eq!(taper[0][0], "tapered");
    assert_eq!(sharp[0][1..], taper[0][1..]);
    report(&a, "zeno");
}

#[test]
fn zeno_non_integer_steps_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&qcl(&["zeno", "--dt", "0.3"], dir.path())), 64);
}

#[test]
fn zeno_default_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["zeno"], dir.path());
    let r = report(dir.path(), "zeno");
    let (header, _) = csv_rows(&dir.path().join("survival.csv"));
    assert_eq!(header, ["mode", "dt", "step", "t", "q", "cumulative"]);
    assert_eq!(check(&r, "tapered survival strictly increasing")["pass"], true);
    assert_eq!(check(&r, "leak accounting")["pass"], true);
    let gap = r["results"]["exponent_gap"].as_f64().unwrap();
    assert!(gap >= 1.0, "exponent gap {gap}");
    assert_eq!(code(&o), 0);
}

#[test]
fn fresnel_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["fresnel-check"], dir.path());
    let r = report(dir.path(), "fresnel-check");
    let (header, rows) = csv_rows(&dir.path().join("fresnel.csv"));
    assert_eq!(header.last().unwrap(), "conjugate_ok");
    assert_eq!(rows[0][0..3], ["0.0", "1.0", "0.0"]);
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
    let slope = r["results"]["slopes"][2]["relative"].as_f64().unwrap();
    assert!(slope <= -3.0 + 0.2, "n_terms = 2 slope {slope}, exit {}", code(&o));
}

#[test]
fn potential_validity_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["potential", "--amplitude", "1000"], dir.path());
    assert_eq!(code(&o), 64);
}

#[test]
fn potential_keeps_the_discontinuous_class() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["potential", "--shape", "ramp"], dir.path());
    assert_eq!(code(&o), 0);
    let r = report(dir.path(), "potential");
    assert_eq!(r["results"]["standard"]["verdict"], "-2");
    assert_eq!(r["results"]["literal"]["verdict"], "-2");
}

#[test]
fn moments_of_a_discontinuous_state_diverge() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl(&["moments", "--shape", "constant"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path(), "moments");
    assert_eq!(r["results"]["position"]["verdict"], "divergent-log");
    assert_eq!(r["results"]["momentum"]["verdict"], "divergent-log");
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["polygon", "--shape", "random", "--seed", "11", "--n-segments", "32"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&qcl_env(&args, &a, &[("QCL_THREADS", "1")])), 0);
    assert_eq!(code(&qcl_env(&args, &b, &[("QCL_THREADS", "4")])), 0);
    for f in ["comparison.csv", "density.csv", "polygon.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let c = dir.path().join("c");
    qcl(&["polygon", "--shape", "random", "--seed", "12", "--n-segments", "32"], &c);
    assert_ne!(fs::read(a.join("density.csv")).unwrap(), fs::read(c.join("density.csv")).unwrap());
}

#[test]
fn thread_cap_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcl_env(&["fresnel-check"], dir.path(), &[("QCL_THREADS", "0")]);
    assert_eq!(code(&o), 64);
}
