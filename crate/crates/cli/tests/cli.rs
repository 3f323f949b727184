use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lowlying"));
    c.env_remove("LOWLYING_OUT_DIR");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

#[test]
fn constants_include_d1_with_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["constants"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&read(dir.path().join("lowlying-out/constants.json"))).unwrap();
    let d1 = v.as_array().unwrap().iter().find(|c| c["id"] == "D1").unwrap();
    assert!((d1["value"].as_f64().unwrap() - 1.9435964).abs() < 1e-7);
    assert!(d1["error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn verify_explicit_small_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify-explicit", "--q", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout_json(&o);
    assert_eq!(s["within_envelope"], true);
    let bound = 3.0 / 4.0;
    assert!(s["residual"].as_f64().unwrap().abs() <= s["envelope"].as_f64().unwrap());
    assert!(s["envelope"].as_f64().unwrap() >= bound);
}

#[test]
fn support_gate_violation_exits_4_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["density", "--q", "9", "--sources", "thm14", "--sigma", "2"]);
    assert_eq!(o.status.code(), Some(4));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "support_gate");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["chars"],
        vec!["density", "--q", "7", "--sources", "nope"],
        vec!["density", "--q", "7", "--table-limit", "10", "--sigma", "2"],
        vec!["no-such-command"],
    ] {
        let o = run(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e: Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(e["error"]["exit_code"], 2);
    }
}

#[test]
fn chars_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["chars", "5", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout_json(&o);
    assert_eq!((s["characters"].as_u64(), s["even"].as_u64(), s["odd"].as_u64()), (Some(4), Some(2), Some(2)));
    let csv = read(dir.path().join("o/chars.csv"));
    assert_eq!(csv.lines().next(), Some("q,chi_index,order,parity,conductor,primitive,real"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .current_dir(dir.path())
        .env("LOWLYING_OUT_DIR", "from-env")
        .args(["chars", "3"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("from-env/chars.csv").exists());
}

#[test]
fn replay_reproduces_artifacts_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["density", "--q", "101", "--sources", "ratios,thm14,thm15", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(dir.path(), &["replay", "a/density.manifest.json", "--out", "b"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(dir.path().join("a/density.csv")), read(dir.path().join("b/density.csv")));
    let m: Value = serde_json::from_str(&read(dir.path().join("b/density.manifest.json"))).unwrap();
    assert_eq!(m["global"]["sigma"], 1.0);
    assert_eq!(m["global"]["table_limit"], 101);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), "# lemma\nR = 100,1000\nvariant = polynomial\ncoeffs = 1\n").unwrap();
    let o = run(dir.path(), &["lemma24", "--config", "run.cfg", "--R", "1000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout_json(&o);
    assert_eq!(s["variant"], "polynomial");
    let pts = s["points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert!(pts[0]["normalized"].as_f64().unwrap() <= 5.0);
}

#[test]
fn zero_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["zeros", "7", "--height", "20", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let first = read(dir.path().join("a/zeros.csv"));
    let cached = dir.path().join("a/cache/zeros-v1/q7_chi1_T20.csv");
    let stamp = std::fs::metadata(&cached).unwrap().modified().unwrap();
    let o = run(dir.path(), &["zeros", "7", "--height", "20", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::metadata(&cached).unwrap().modified().unwrap(), stamp);
    assert_eq!(read(dir.path().join("a/zeros.csv")), first);
    assert_eq!(first.lines().next(), Some("q,chi_index,conductor,parity,ordinate"));
    // first zero of ζ, carried by the principal character
    let g: f64 = first.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!((g - 14.134725141734693).abs() < 1e-9);
    let s = stdout_json(&o);
    assert_eq!(s["certificate_mismatches"], 0);
}

#[test]
fn scans_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["deavg", "--x", "1e5", "--Q", "10,100,1000", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(dir.path().join("a/deavg.csv")).lines().count(), 4);
    assert!(stdout_json(&o)["fit"]["exponent"].as_f64().unwrap().is_finite());
    let o = run(dir.path(), &["montgomery", "--x", "1e5", "--q", "3,10,30,100", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(dir.path(), &["variance", "--x", "1e5", "--Q", "316", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&read(dir.path().join("a/variance.json"))).unwrap();
    let s = &v[0];
    assert!(s["class_one"].as_f64().unwrap() <= s["range_variance"].as_f64().unwrap());
}

#[test]
fn explicit_slack_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify-explicit", "--q", "7", "--explicit-slack", "0", "--out", "a"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tight = stdout_json(&o)["envelope"].as_f64().unwrap();
    let o = run(dir.path(), &["verify-explicit", "--q", "7", "--out", "b"]);
    let default = stdout_json(&o)["envelope"].as_f64().unwrap();
    assert!((default - tight - 3.0 / 6.0).abs() < 1e-12, "{default} {tight}");
    let o = run(dir.path(), &["verify-explicit", "--q", "7", "--explicit-slack", "-1", "--out", "c"]);
    assert_eq!(o.status.code(), Some(2));
}
