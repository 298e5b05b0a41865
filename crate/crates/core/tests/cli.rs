use std::process::Command;

fn modkron(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_modkron"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).trim_end().to_string(),
        String::from_utf8_lossy(&out.stderr).to_string(),
    )
}

#[test]
fn expand_prints_the_text_format() {
    let (code, out, _) = modkron(&["expand", "j", "--prec", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "q^-1 + 744 + 196884*q + 21493760*q^2 + O(q^3)");
    let (_, out, _) = modkron(&["expand", "eta(2^24 * 1^-24)", "--prec", "3"]);
    assert_eq!(out, "q + 24*q^2 + O(q^3)");
    let (code, _, err) = modkron(&["expand", "fricke(2,0)"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn verify_exit_statuses_follow_the_verdict() {
    let (code, out, _) = modkron(&[
        "verify",
        "--f",
        "j",
        "--N",
        "1",
        "--p",
        "2",
        "--mode",
        "all-cosets",
    ]);
    assert_eq!(code, 0);
    assert!(out.ends_with("verdict: PASS"));
    let (code, out, _) = modkron(&[
        "verify",
        "--f",
        "fricke(3,1,0)",
        "--N",
        "3",
        "--p",
        "2",
        "--mode",
        "all-cosets",
    ]);
    assert_eq!(code, 0, "{out}");
    let (code, _, err) = modkron(&["verify", "--f", "fricke(5,0,1)", "--N", "5", "--p", "3"]);
    assert_eq!(code, 2);
    assert!(err.contains("hypothesis"));
    let (code, out, _) = modkron(&[
        "verify",
        "--f",
        "fricke(5,0,1)",
        "--N",
        "5",
        "--p",
        "2",
        "--mode",
        "cusp-infinity",
        "--negative-control",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("(negative control)"));
}

#[test]
fn structured_output_goes_to_the_requested_file() {
    let dir = std::env::temp_dir().join(format!("modkron-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let (code, out, _) = modkron(&[
        "verify",
        "--f",
        "fricke(2,0,1)",
        "--p",
        "3",
        "--mode",
        "sampled",
        "--samples",
        "5",
        "--seed",
        "11",
        "--format",
        "structured",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "verify");
    assert_eq!(doc["config"]["seed"], 11);
    assert_eq!(doc["result"]["verdict"], "pass");
    assert_eq!(doc["result"]["mode"], "sampled(5, seed=11)");
    assert!(doc["timing_ms"].is_u64());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn modpoly_reports_the_kronecker_check() {
    for p in ["2", "3"] {
        let (code, out, _) = modkron(&["modpoly", "--p", p]);
        assert_eq!(code, 0);
        assert!(out.ends_with("Kronecker check: true"));
    }
    let (code, _, err) = modkron(&["modpoly", "--p", "7"]);
    assert_eq!(code, 2);
    assert!(err.contains("unsupported"));
}
