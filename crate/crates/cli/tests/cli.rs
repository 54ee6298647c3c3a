use std::fs;
use std::process::Command;

fn cartan() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cartan"))
}

fn write_inputs(dir: &std::path::Path) {
    let f = r#"{"degz":2,"degw":0,"coeffs":[{"i":2,"j":0,"re":1.0,"im":0.0},{"i":0,"j":0,"re":-0.01,"im":0.0}]}"#;
    let g = r#"{"degz":1,"degw":0,"coeffs":[{"i":1,"j":0,"re":1.0,"im":0.0},{"i":0,"j":0,"re":-0.3,"im":0.0}]}"#;
    fs::write(dir.join("f.json"), f).unwrap();
    fs::write(dir.join("g.json"), g).unwrap();
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let by_flags = cartan().current_dir(dir.path()).args(["resultant", "--f", "f.json", "--g", "g.json", "--delta", "0.1"]).output().unwrap();
    fs::write(dir.path().join("run.json"), r#"{"command": "resultant", "f": "f.json", "g": "g.json", "delta": 0.1}"#).unwrap();
    let by_config = cartan().current_dir(dir.path()).args(["--config", "run.json"]).output().unwrap();
    assert!(by_flags.status.success());
    assert_eq!(by_flags.stdout, by_config.stdout);
    let v: serde_json::Value = serde_json::from_slice(&by_flags.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert!((v["result"]["sylvester"][0].as_f64().unwrap() - 0.08).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let usage = cartan().args(["cover1d", "--H", "3"]).output().unwrap().status;
    assert_eq!(usage.code(), Some(2));
    let missing = cartan().args(["resultant", "--f", "nope.json", "--g", "nope.json"]).output().unwrap().status;
    assert_eq!(missing.code(), Some(2));
    // a zero tolerance cannot be met by two independently rounded values
    let out = cartan().current_dir(dir.path()).args(["resultant", "--f", "f.json", "--g", "g.json", "--tol", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["failures"].as_array().unwrap().len(), 1);
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        cartan().env("CARTAN_BERNSTEIN_THREADS", threads).args(["verify", "--suite", "example-logR", "--R", "0.1,0.2"]).output().unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(cartan().env("CARTAN_BERNSTEIN_THREADS", "zero").args(["verify", "--suite", "example-logR"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn svg_and_cover_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path());
    let st = cartan().current_dir(dir.path()).args(["cover1d", "--f", "f.json", "--H", "4", "--out", "c.json", "--svg", "c.svg"]).output().unwrap().status;
    assert!(st.success());
    let cover: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(cover["H"], 4.0);
    assert!(!cover["disks"].as_array().unwrap().is_empty());
    assert!(fs::read_to_string(dir.path().join("c.svg")).unwrap().starts_with("<svg"));
}
