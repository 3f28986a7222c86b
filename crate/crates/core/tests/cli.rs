use lpsq::cli::dispatch;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lpsq").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn report(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn check_kernel_haar() {
    let r = report(&[
        "check-kernel",
        "--kernel",
        "haar",
        "--eps",
        "0.5",
        "--u",
        "2",
    ]);
    let s = &r["result"]["seminorms"];
    assert_eq!(s["b_eps"]["value"].as_f64().unwrap(), 0.0);
    let d = s["d_u"]["value"].as_f64().unwrap();
    assert!((d - 2f64.sqrt()).abs() < 1e-9, "{d}");
    assert_eq!(r["command"], "check-kernel");
    assert!(r["timestamp"].is_u64());
}

#[test]
fn sqfn_poisson_band_limited() {
    let r = report(&["sqfn", "--kernel", "poisson", "--f", "band", "--p", "2"]);
    let ratio = r["result"]["ratio"].as_f64().unwrap();
    assert!((ratio - 0.5).abs() < 0.01, "{ratio}");
}

#[test]
fn version_and_help_exit_zero() {
    let (code, out, _) = run(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("sqfn"));
}

#[test]
fn malformed_kernel_json_is_a_usage_error() {
    let (code, out, err) = run(&["check-kernel", "--kernel", r#"{"type":"haar""#]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("line 1 column"), "{err}");
}

#[test]
fn unknown_command_is_a_usage_error() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn deterministic_reports_are_byte_identical() {
    let args = [
        "--deterministic",
        "--seed",
        "7",
        "check-kernel",
        "--kernel",
        "poisson",
        "--samples",
        "20000",
    ];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert!(!a.contains("timestamp"));
}

#[test]
fn out_and_csv_go_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let (code, out, err) = run(&[
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "weights",
        "--weight",
        r#"{"type":"power","a":0.5}"#,
        "--p",
        "2",
        "--levels",
        "3",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["command"], "weights");
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("levels,characteristic"));
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn strict_turns_flags_into_failure() {
    let args = [
        "--strict",
        "weights",
        "--weight",
        r#"{"type":"power","a":1.1}"#,
        "--p",
        "2",
        "--levels",
        "4",
    ];
    let (code, _, err) = run(&args);
    assert_eq!(code, 1);
    assert!(err.contains("flag:"), "{err}");
}

#[test]
fn binary_runs() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_lpsq"))
        .args([
            "--deterministic",
            "check-kernel",
            "--kernel",
            "haar",
            "--samples",
            "1000",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        r["result"]["seminorms"]["b_eps"]["value"].as_f64().unwrap(),
        0.0
    );
}
