use std::path::Path;
use std::process::Command;

fn npspectra(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_npspectra")).args(args).output().unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    for out in [&a, &b] {
        let o = npspectra(&["spectrum", "--domain", "lens:pi/3,pi/4", "--panels", "4", "--grading", "4", "--seed", "7", "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["schema"], "np-spectra/1");
    assert_eq!(v["seed"], 7);
}

#[test]
fn both_methods_write_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "e.json");
    let o = npspectra(&["spectrum", "--domain", "ellipse:2,1", "--method", "both", "--panels", "16", "--degree", "16", "--out", &out]);
    assert!(o.status.success());
    for f in ["e.nystrom.json", "e.bergman.json", "e.deviation.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let dev = std::fs::read_to_string(dir.path().join("e.deviation.csv")).unwrap();
    for line in dev.lines().skip(2) {
        let d: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(d < 1e-10, "{line}");
    }
}

#[test]
fn input_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x.json");
    for args in [
        vec!["spectrum", "--domain", "trapezoid"],
        vec!["spectrum", "--domain", "square:-2"],
        vec!["bounds", "--domain", "{\"kind\": \"polygon\", \"vertices\": [[0,0],[1,0]]}"],
        vec!["spectrum", "--domain", "disk", "--panels", "0"],
        vec!["map", "--prevertices", "0,pi", "--angles", "pi,pi/2"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", &out]);
        let o = npspectra(&a);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!Path::new(&out).exists());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bounds_json_for_square_and_lens() {
    let o = npspectra(&["bounds", "--domain", "square", "--panels", "6", "--grading", "6"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kuhnau_lower"], 0.5);
    assert!(v.get("essbound_upper").is_none());
    assert_eq!(v["condition_satisfied"], false);
    assert_eq!(v["verdicts"][0]["name"], "kuhnau");
    assert_eq!(v["verdicts"][0]["passed"], true);

    let o = npspectra(&["bounds", "--domain", "lens:pi/4,pi/5", "--panels", "6", "--grading", "6"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["essbound_upper"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert_eq!(v["essbound_permutation"], 1);
}

#[test]
fn map_writes_trace_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "m");
    let o = npspectra(&["map", "--prevertices", "0,pi", "--angles", "pi/2,pi/2", "--points", "32", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(dir.path().join("m.trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2 + 33);
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["certificate"]["holds"], true);

    let o = npspectra(&["map", "--prevertices", "0,1.2,2.5,3.8,5", "--angles", "pi/4,pi/4,pi/4,pi/4,pi/4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certificate"]["holds"], false);
    assert!(v.get("krushkal_value").is_none());
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_npspectra"))
        .args(["spectrum", "--domain", "disk", "--panels", "4"])
        .env("NPSPECTRA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_npspectra"))
        .args(["spectrum", "--domain", "disk", "--panels", "4", "--format", "csv"])
        .env("NPSPECTRA_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("# schema=np-spectra/1 seed=0"));
}
