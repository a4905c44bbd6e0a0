use std::path::PathBuf;
use std::process::{Command, Output};

fn telegrav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telegrav")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name).to_str().unwrap().to_string()
}

#[test]
fn catalog_lists_builtins() {
    let o = telegrav(&["catalog"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for name in ["minkowski", "minkowski_polar", "schwarzschild", "frw"] {
        assert!(text.lines().any(|l| l == name), "{name} missing from\n{text}");
    }
    assert!(text.contains("example: schwarzschild:M=1"));
}

#[test]
fn vacuum_suite_exits_zero() {
    let o = telegrav(&["check", "minkowski", "--n", "5"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("overall    PASS"));
    let o = telegrav(&["check", &spec("schwarzschild.json"), "--n", "5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["tetrad"]["name"], "schwarzschild");
}

#[test]
fn matter_fails_vacuum_and_passes_non_vacuum() {
    let o = telegrav(&["check", "frw:a=t^(2/3)", "--n", "5"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("einstein_vacuum") && l.ends_with("FAIL")));
    let o = telegrav(&["check", "frw:a=t^(2/3)", "--n", "5", "--non-vacuum"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn tight_tolerance_fails() {
    let o = telegrav(&[
        "check",
        "schwarzschild:M=1",
        "--n",
        "5",
        "--checks",
        "ad_integrity",
        "--tol",
        "ad_integrity=1e-30",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": \"x\", \"dim\": 4").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", bad.to_str().unwrap(), "--point", "0,1,2,3"],
        vec!["analyze", "nowhere.json", "--point", "0,1,2,3"],
        vec!["analyze", "minkowski", "--point", "0,1"],
        vec!["analyze", "schwarzschild", "--point", "0,4,1,0"],
        vec!["check", "minkowski", "--format", "xml"],
        vec!["check", "minkowski", "--checks", "bogus"],
        vec!["check", "minkowski", "--tol", "jacobi"],
        vec!["check", "minkowski", "--n", "0"],
        vec!["check"],
        vec!["grid", "minkowski", "--field", "torsion", "--out", "-", "--vary", "w"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = telegrav(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn analyze_prints_tensors() {
    let o = telegrav(&["analyze", "schwarzschild:M=1", "--point", "0,4,1.5707963267948966,0"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["det_h"].as_f64().unwrap() - 16.0).abs() <= 1e-12);
    assert_eq!(v["riemann"].as_array().unwrap().len(), 4);
    let g = &v["einstein"];
    for m in 0..4 {
        for n in 0..4 {
            assert!(g[m][n].as_f64().unwrap().abs() <= 1e-12);
        }
    }
}

#[test]
fn bracket_prints_terms() {
    let o = telegrav(&["bracket", "minkowski_polar", "--u", "0,1,0,0", "--v", "0,0,1,0", "--point", "0,2,1,0"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    let row: Vec<f64> = lines[4].split_whitespace().skip(1).map(|s| s.parse().unwrap()).collect();
    // [D_r, D_theta]^theta = -1/r on the polar frame
    assert!((row[3] + 0.5).abs() <= 1e-12, "{text}");
}

#[test]
fn grid_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.csv");
    let o = telegrav(&[
        "grid",
        "schwarzschild:M=1",
        "--field",
        "lagrangian",
        "--out",
        out.to_str().unwrap(),
        "--steps",
        "7",
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,lagrangian");
    assert_eq!(lines.len(), 8);
    let o = telegrav(&["grid", "minkowski_polar", "--field", "torsion", "--out", "-", "--steps", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 1 + 4 * 6);
}

#[test]
fn reports_are_deterministic_and_written_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = |p: &PathBuf, extra: &'static str| {
        vec![
            "check".to_string(),
            "schwarzschild:M=1".into(),
            "--n".into(),
            "8".into(),
            "--seed".into(),
            "9".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
            extra.into(),
        ]
    };
    let run = |v: Vec<String>| telegrav(&v.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&run(args(&a, "--serial"))), 0);
    assert_eq!(code(&run(args(&b, "--non-vacuum"))), 1);
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(ja.starts_with(b"{"));
    assert_ne!(ja, jb);
    assert_eq!(code(&run(args(&b, "--serial"))), 0);
    assert_eq!(ja, std::fs::read(&b).unwrap());
}

#[test]
fn config_file_drives_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let cfg = dir.path().join("suite.json");
    let body = serde_json::json!({
        "tetrad": "minkowski_polar",
        "seed": 3,
        "n_points": 4,
        "checks": ["jacobi", "decomposition"],
        "tolerances": {"nested": 1e-9},
        "output": {"path": out.to_str().unwrap(), "format": "csv"}
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    let o = telegrav(&["check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,mode,n_points,max_residual,min_residual,tolerance,pass,error");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("decomposition,upper_bound,4,"));
    assert!(lines[2].starts_with("jacobi,upper_bound,4,") && lines[2].contains(",1e-9,true,"));
}
