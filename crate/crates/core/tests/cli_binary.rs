use std::process::Command;

fn qsl2r() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qsl2r"));
    cmd.env("QSL2R_THREADS", "2");
    cmd
}

#[test]
fn json_report_on_stdout_and_file() {
    let dir = std::env::temp_dir().join(format!("qsl2r-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("integral.json");
    let out = qsl2r()
        .args(["integral", "--max-spin", "3", "--format", "json", "--report"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let stdout: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(stdout, file);
    assert_eq!(file["schema"], "qsl2r-report/1");
    assert_eq!(file["subcommand"], "integral");
    assert_eq!(file["passed"], true);
    let mu1 = file["values"]["mu[1]"].as_f64().unwrap();
    assert!((mu1 - 1.7).abs() < 1e-9, "mu[1] = {mu1}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn failing_check_exits_one() {
    let out = qsl2r()
        .args(["balance", "--g-exponent", "0", "--max-spin", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn bad_parameters_exit_two() {
    for args in [
        &["spectrum", "--q", "1.5"][..],
        &["spectrum", "--max-spin", "2.3"],
        &["regrep", "--max-spin", "2"],
    ] {
        let out = qsl2r().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
