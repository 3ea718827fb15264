use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mzinet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzinet")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn shot_noise_single_arm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"d":1,"u_tilde":[1.0],"alpha_sq":[100.0],"n_s":0.0}"#);
    let out = mzinet(&["sensitivity", "--config", &cfg, "--v", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let emom = stdout_json(&out)["emom"].as_f64().unwrap();
    assert!((emom - 0.01).abs() < 1e-15);
}

#[test]
fn worked_two_arm_config() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cfg =
        write(dir.path(), "c.json", &format!(r#"{{"d":2,"u_tilde":[{h},{h}],"alpha_sq":[100.0,100.0],"n_s":1.0}}"#));
    let out = mzinet(&["sensitivity", "--config", &cfg, "--v", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["emom"].as_f64().unwrap() - 8.9176e-4).abs() < 5e-9);
    assert!(v["eqcr"].as_f64().unwrap() < v["emom"].as_f64().unwrap());
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", "{\"d\": 2,");
    let out = mzinet(&["sensitivity", "--config", &cfg, "--v", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mzinet(&["optimize", "--constraint", "c9", "--v", "1", "--n-t", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mzinet(&["optimize", "--constraint", "c3", "--v", "1,x", "--n-t", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_3_with_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"d":2,"u_tilde":[1.0,0.0],"alpha_sq":[5.0,0.0],"n_s":2.0}"#);
    let out = mzinet(&["sensitivity", "--config", &cfg, "--v", "1,1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("DegenerateSlope") || err.starts_with("SingularInformation"), "{err}");

    let out = mzinet(&["optimize", "--constraint", "c3", "--v", "1,1", "--n-t", "10", "--n-s", "20"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("Infeasible"));
}

#[test]
fn oracle_check_exit_codes() {
    let out = mzinet(&["oracle-check", "--trials", "40", "--d-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert!(r["passed"].as_bool().unwrap());
    assert!(r["max_deviation_qfim"].as_f64().unwrap() < 1e-9);

    let out = mzinet(&["oracle-check", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["checks"].as_u64(), Some(0));

    let out = mzinet(&["oracle-check", "--trials", "10", "--perturb", "1e-6"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn optimize_reports_bounds() {
    let out =
        mzinet(&["--format", "json", "optimize", "--constraint", "c3", "--v", "1,1", "--n-t", "1e6", "--n-s", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    let m = r["result"]["minimum_variance"].as_f64().unwrap();
    assert!(m >= r["bounds"]["lower"].as_f64().unwrap());
}

#[test]
fn figure_csv_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = mzinet(&["--seed", "7", "--out", dir.path().to_str().unwrap(), "figure", "fig2a"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let x = fs::read(a.path().join("fig2a.csv")).unwrap();
    let y = fs::read(b.path().join("fig2a.csv")).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let header = String::from_utf8(x).unwrap().lines().next().unwrap().to_string();
    for col in ["emom_closed", "eqcr_closed", "sn", "hl"] {
        assert!(header.split(',').any(|c| c == col), "{header}");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(a.path().join("fig2a.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"].as_u64(), Some(7));
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 1);
}

#[test]
fn ensemble_csv_is_byte_identical_across_runs() {
    let run = || {
        let out = mzinet(&[
            "--seed",
            "3",
            "ensemble",
            "--kind",
            "fixed",
            "--d",
            "6",
            "--n-t",
            "1e5",
            "--n-s",
            "50",
            "--samples",
            "64",
        ]);
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let x = run();
    assert_eq!(x, run());
    assert!(String::from_utf8(x)
        .unwrap()
        .starts_with("n_t,mean,rms,optimal_n_s_mean,optimal_n_s_rms,sample_count,seed\n"));
}

#[test]
fn unknown_figure_is_a_parse_error() {
    assert_eq!(mzinet(&["figure", "fig9"]).status.code(), Some(2));
}
