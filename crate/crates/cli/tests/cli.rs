use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polarsl"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn polarsl")
}

fn problems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn catalog_lists_entries() {
    let o = run(&["catalog", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for name in ["sgn", "log-weights", "unit-reflection", "neumann-unit", "staircase"] {
        assert!(s.lines().any(|l| l.starts_with(&format!("{name},"))), "{name} missing:\n{s}");
    }
}

#[test]
fn analyze_writes_report_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rep.json");
    let o = run(&["analyze", "--catalog", "log-weights", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema_version"], "1.0.0");
    assert_eq!(v["similarity"]["status"], "holds");
    let traces = v["traces"].as_object().unwrap();
    assert!(traces.contains_key("q_trace"));
    for f in traces.values() {
        assert!(dir.path().join(f.as_str().unwrap()).exists(), "{f}");
    }
    assert!(dir.path().join("rep.log").exists());
}

#[test]
fn analyze_problem_file_with_override() {
    let f = problems().join("log-weights.cfg");
    let o = run(&["analyze", "--problem", f.to_str().unwrap(), "--alpha-plus", "2", "--no-cross-check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // a+ = 2 gives w+ = 2 x^-1 neglog^-3
    assert_eq!(v["problem"]["w_plus"]["term"]["scale"], 2.0);
    assert_eq!(v["problem"]["w_plus"]["term"]["logpower"], -3.0);
}

#[test]
fn parse_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.cfg");
    std::fs::write(&f, "name = bad\ninterval.b_minus = -1\ninterval.b_plus = 1\nplus.w = 1*x^\nplus.r = 1\nminus.w = 1\nminus.r = 1\n").unwrap();
    let o = run(&["analyze", "--problem", f.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn eigs_csv_with_oracle() {
    let o = run(&["eigs", "--catalog", "sgn", "--window", "-60", "60", "--format", "csv", "--oracle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let rows: Vec<Vec<&str>> = s.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5, "{s}");
    assert_eq!(rows[2][3], "zero");
    for r in rows.iter().filter(|r| r[3] != "zero") {
        let diff: f64 = r[5].parse().unwrap();
        assert!(diff < 1e-3, "{r:?}");
    }
    let l: f64 = rows[3][1].parse().unwrap();
    assert!((l - 15.418205716966).abs() < 1e-6, "{l}");
}

#[test]
fn eigs_refuses_without_discreteness() {
    let o = run(&["eigs", "--catalog", "half-line", "--window", "-10", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force-truncate"));
}

#[test]
fn mfun_rejects_nonpositive_y() {
    let o = run(&["mfun", "--catalog", "sgn", "--y-min", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mfun_csv_tracks_atkinson() {
    let o = run(&["mfun", "--catalog", "sgn", "--y-min", "1e3", "--y-max", "1e6", "--points", "4", "--side", "plus", "--format", "csv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for l in s.lines().skip(1) {
        let ratio: f64 = l.split(',').nth(9).unwrap().parse().unwrap();
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3, "{l}");
    }
}

#[test]
fn karamata_verdict_lines() {
    let o = run(&["karamata", "--fn", "neglog(x)", "--test", "slowly-varying", "--at", "zero-plus"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(": holds"), "{}", stdout(&o));
    let o = run(&["karamata", "--fn", "x^2", "--test", "slowly-varying", "--at", "zero-minus"]);
    assert!(stdout(&o).contains(": fails"), "{}", stdout(&o));
}

#[test]
fn strict_flags_inconclusive() {
    let o = run(&["karamata", "--fn", "staircase", "--test", "slowly-varying", "--at", "plus-inf", "--strict"]);
    let s = stdout(&o);
    if s.contains("inconclusive") {
        assert_eq!(o.status.code(), Some(4));
    } else {
        assert!(o.status.success());
    }
}
