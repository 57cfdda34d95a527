use parlike::cli::{run, CliError};
use parlike::config::{ConfigError, JobConfig};
use std::process::Command;

fn cfg(text: &str) -> JobConfig {
    JobConfig::parse(text).unwrap()
}

fn run_text(command: &str, text: &str) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(command, &cfg(text), Some(1), &mut out).unwrap();
    (code, String::from_utf8(out).unwrap())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_parlike"))
}

#[test]
fn config_errors() {
    assert_eq!(JobConfig::parse("map per1").unwrap_err(), ConfigError::Syntax { line: 1 });
    assert_eq!(JobConfig::parse("# ok\nfoo = 1").unwrap_err(), ConfigError::UnknownKey("foo".into()));
    assert!(JobConfig::parse("map =").is_err());
    let bad = cfg("map = per1\nA_re = one");
    let err = run("analyze", &bad, None, &mut Vec::new()).unwrap_err();
    assert!(matches!(err, CliError::Config(ConfigError::BadValue { .. })));
    assert_eq!(err.exit_code(), 2);
    let err = run("frobnicate", &JobConfig::default(), None, &mut Vec::new()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn analyze_perone_one() {
    let (code, text) = run_text("analyze", "map = per1\nA_re = 1\nA_im = 0");
    assert_eq!(code, 0);
    let fixed = text.lines().find(|l| l.starts_with("fixed") && l.contains("-1.0000000000000000e0")).expect(&text);
    assert!(fixed.contains("multiplier 0.0000000000000000e0"), "{fixed}");
    assert!(text.contains("parabolic ∞") || text.contains("parabolic inf"), "{text}");
    let n = text.lines().find(|l| l.trim_start().starts_with("n ")).unwrap();
    assert_eq!(n.split_whitespace().last(), Some("1"));
}

#[test]
fn numerical_failures_exit_three() {
    // only a = i has a built-in restriction
    let err = run("verify-plm", &cfg("map = cubic\na_re = 2"), None, &mut Vec::new()).unwrap_err();
    assert!(matches!(err, CliError::Numerical(_)));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn selftest_passes() {
    let (code, text) = run_text("selftest", "");
    assert_eq!(code, 0, "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}

#[test]
fn verify_example1_exits_zero() {
    let (code, text) = run_text("verify-plm", "map = htwo\nepsilon = 0.25");
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("arc_in_repelling_petals"));
}

#[test]
fn verify_reports_failure_with_exit_one() {
    // m+ on the wrong side of the petal puts γ(1) outside ∂U
    let (code, text) = run_text("verify-plm", "map = htwo\nm_plus_re = -3\nm_plus_im = -1\nm_minus_re = -3\nm_minus_im = 1");
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn arc_csv_columns() {
    let (code, text) = run_text("arc", "map = htwo");
    assert_eq!(code, 0);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,z_re,z_im,residual"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() > 100);
    assert!(rows.iter().all(|r| r.len() == 4));
    for r in &rows {
        let t: f64 = r[0].parse().unwrap();
        if t.abs() <= 0.5 {
            assert!(r[3].parse::<f64>().unwrap() < 1e-6);
        } else {
            assert_eq!(r[3], "nan");
        }
    }
}

#[test]
fn fatou_csv_columns() {
    let (code, text) = run_text("fatou", "map = per1\nA_re = 1\ncenter_re = 6\nwidth = 2\npx = 4");
    assert_eq!(code, 0);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z_re,z_im,phi_re,phi_im,residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.len() == 5 && r[4] < 1e-6));
}

#[test]
fn straighten_output() {
    let (code, text) = run_text("straighten", "map = cubic\na_re = 0\na_im = 1");
    assert_eq!(code, 0);
    assert!(text.contains("attracting_multiplier") && text.contains("guaranteed"), "{text}");
}

#[test]
fn julia_writes_image() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("j.ppm");
    let job = format!("map = per1\nA_re = 1\npx = 32\nmax_iter = 200\nout = {}", ppm.display());
    let (code, _) = run_text("julia", &job);
    assert_eq!(code, 0);
    let bytes = std::fs::read(&ppm).unwrap();
    assert!(bytes.starts_with(b"P6\n32 32\n255\n"));
    assert_eq!(bytes.len(), 13 + 3 * 32 * 32);
    let pgm = dir.path().join("p.pgm");
    let job = format!("px = 16\nout = {}", pgm.display());
    assert_eq!(run_text("paramplane", &job).0, 0);
    assert!(std::fs::read(&pgm).unwrap().starts_with(b"P5\n16 16\n255\n"));
}

#[test]
fn binary_exit_codes_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.txt");
    std::fs::write(&job, "map = per1\nA_re = 2\n").unwrap();
    let out = bin().args(["analyze", "--config"]).arg(&job).args(["--A_re", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // A = 1 from the flag: fixed point -1 with multiplier 0
    assert!(text.contains("-1.0000000000000000e0"), "{text}");

    std::fs::write(&job, "map per1\n").unwrap();
    let out = bin().args(["analyze", "--config"]).arg(&job).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));

    let out = bin().args(["selftest"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn binary_output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for t in ["1", "4"] {
        let p = dir.path().join(format!("t{t}.ppm"));
        let out = bin()
            .args(["paramplane", "--px", "48", "--threads", t, "--out"])
            .arg(&p)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        files.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(files[0], files[1]);
}
