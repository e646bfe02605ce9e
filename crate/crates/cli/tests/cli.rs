use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const THREE: &str = r#"{"iets": [{"lengths": ["1/2", "1/4", "1/4"], "permutation": [3, 2, 1]}], "coefficients": ["1"]}"#;

fn ietlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ietlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sweep_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", THREE);
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let out = ietlab(&[
        "sweep",
        "--spec",
        &spec,
        "--samples",
        "3",
        "--seed",
        "5",
        "--ladder-max",
        "12",
        "--out",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].starts_with("# generated: "));
    assert!(lines.contains(&"# seed: 5"));
    assert!(lines.contains(&"# backend: fixed"));
    assert!(lines.contains(&"# precision: 256"));
    assert!(lines.contains(&"alpha,N,Dstar,max_birkhoff_dev,spread,beta_hat,idoc,occupancy"));
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 4);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    assert_eq!(report["seed"], 5);
    let hash = report["config_hash"].as_str().unwrap();
    assert!(text.contains(&format!("# config_hash: {hash}")));
}

#[test]
fn sweep_is_deterministic_across_pool_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", THREE);
    let run = |threads: &str| {
        let out = ietlab(&[
            "--threads",
            threads,
            "sweep",
            "--spec",
            &spec,
            "--samples",
            "4",
            "--seed",
            "1",
            "--ladder-max",
            "12",
            "--no-timestamp",
        ]);
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("1"));
}

#[test]
fn rational_backend_forced_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "id.json",
        r#"{"iets": [{"lengths": ["1"], "permutation": [1]}], "coefficients": ["1"]}"#,
    );
    let out = ietlab(&[
        "sweep",
        "--spec",
        &spec,
        "--backend",
        "rational",
        "--alpha",
        "1/2",
        "--ladder-max",
        "12",
        "--no-timestamp",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(&fields[..2], &["1/2", "4096"]);
    // the worst default start, 0.123456789, gives D* = 1/2 - 0.123456789
    assert_eq!(fields[2], "0.376543211");
    assert_eq!(fields[6], "FAIL@2");
}

#[test]
fn mixed_sweep_rejects_zero_sum() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "zero.json",
        r#"{"iets": [{"lengths": ["1"], "permutation": [1]}, {"lengths": ["1"], "permutation": [1]}],
            "coefficients": ["1", "-1"]}"#,
    );
    let out = ietlab(&[
        "mixed-sweep",
        "--spec",
        &spec,
        "--samples",
        "1",
        "--ladder-max",
        "12",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum to zero"));
    let out = ietlab(&[
        "sweep",
        "--spec",
        &spec,
        "--samples",
        "1",
        "--ladder-max",
        "12",
    ]);
    assert!(!out.status.success());
}

#[test]
fn diagnose_reports_one_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", THREE);
    let v = stdout_json(&ietlab(&[
        "diagnose",
        "--spec",
        &spec,
        "--alpha",
        "0.3183098861",
        "--ladder-max",
        "12",
    ]));
    assert_eq!(v["backend"], "fixed");
    assert_eq!(
        v["diagnosis"]["report"]["starts"].as_array().unwrap().len(),
        4
    );
    assert_eq!(v["diagnosis"]["row"]["n"], 4096);
}

#[test]
fn surface_info_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "surface.json",
        r#"{"iets": [{"lengths": ["1/2", "1/4", "1/4"], "permutation": [3, 2, 1]},
                     {"lengths": ["1/3", "2/3"], "permutation": [2, 1]}],
            "heights": ["1", "3/2"], "incommensurable_heights": [2]}"#,
    );
    let trace = dir.path().join("trace.csv");
    let v = stdout_json(&ietlab(&[
        "surface-info",
        "--spec",
        &spec,
        "--backend",
        "rational",
        "--alpha",
        "2/5",
        "--x0",
        "1/9",
        "--trace",
        trace.to_str().unwrap(),
    ]));
    assert_eq!(v["rectangles"], 2);
    assert_eq!(v["area"], "5/2");
    assert_eq!(v["square_tiled"]["verdict"], false);
    assert_eq!(v["cylinders"][1]["modulus"], "3/2");
    assert_eq!(v["first_return"]["rectangles"], serde_json::json!([1, 2]));
    let csv = fs::read_to_string(&trace).unwrap();
    assert!(csv.contains("step,rectangle,x,y\n0,1,1/9,0/1\n"));

    let fixed = stdout_json(&ietlab(&["surface-info", "--spec", &spec]));
    assert!(fixed["square_tiled"]["error"].is_string());
}

#[test]
fn oracle_check_passes() {
    let v = stdout_json(&ietlab(&[
        "oracle-check",
        "--configs",
        "4",
        "--starts",
        "50",
        "--seed",
        "3",
    ]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["rational"]["mismatches"], 0);
}
