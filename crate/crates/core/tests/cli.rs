use std::path::Path;
use std::process::{Command, Output};

fn homfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homfam")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn list_prints_one_row_per_family() {
    let o = homfam(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family\tsample_space\tG\tH\tV\tv0");
    assert_eq!(lines.len(), 12);
    assert!(lines.iter().any(|l| l.starts_with("wishart\tSym+(2,R)\tGL(2,R)\tO(2)")));
}

#[test]
fn describe_bernoulli() {
    let o = homfam(&["describe", "bernoulli"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("all real θ"));
    assert!(text.contains("s = e^{-θ}/(e^{-θ}+e^{θ})"));
}

#[test]
fn eval_uniform_von_mises() {
    let o = homfam(&["eval", "--family", "von_mises", "--classical", r#"{"kappa":0,"mu":0}"#, "--points", "[0]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("angle,log_density"));
    let value: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((value + (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
}

#[test]
fn verify_poincare_passes() {
    let o = homfam(&["verify", "--family", "poincare"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut pullback = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v["check_tag"] == "poincare.pullback.corrected" {
            assert!(v["residual"].as_f64().unwrap() <= 1e-10);
            pullback += 1;
        }
    }
    assert_eq!(pullback, 1);
    assert!(text.lines().last().unwrap().contains(r#""passed":true"#));
}

#[test]
fn sample_is_deterministic_and_fits_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.csv");
    let args = ["sample", "--family", "gamma_lambda", "--classical", r#"{"k":3,"theta":2}"#, "--count", "10000", "--seed", "5"];
    let a = homfam(&args);
    let b = homfam(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(homfam(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);

    let fit = homfam(&["fit", "--family", "gamma_lambda", "--in", path.to_str().unwrap()]);
    assert_eq!(fit.status.code(), Some(0), "{}", stderr(&fit));
    let v: serde_json::Value = serde_json::from_slice(&fit.stdout).unwrap();
    let k = v["classical"]["values"]["k"].as_f64().unwrap();
    let theta = v["classical"]["values"]["theta"].as_f64().unwrap();
    assert!((k / 3.0 - 1.0).abs() < 0.05, "{k}");
    assert!((theta / 2.0 - 1.0).abs() < 0.05, "{theta}");
    assert_eq!(v["observations"], 10000);
}

#[test]
fn parameter_document_drives_eval() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("theta.json");
    std::fs::write(
        &doc,
        r#"{"schema_version":1,"family":"normal","parameterization":"classical","values":{"sigma":1,"mu":0}}"#,
    )
    .unwrap();
    let arg = format!("@{}", doc.display());
    let o = homfam(&["eval", "--params", &arg, "--points", "[0, 1]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let c = -0.5 * (2.0 * std::f64::consts::PI).ln();
    assert!((rows[0] - c).abs() < 1e-14);
    assert!((rows[1] - (c - 0.5)).abs() < 1e-14);
}

#[test]
fn exit_codes() {
    let usage = homfam(&["eval", "--family", "normal", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(stderr(&usage).lines().count(), 1);

    let unknown = homfam(&["describe", "cauchy"]);
    assert_eq!(unknown.status.code(), Some(2));

    let domain = homfam(&["eval", "--family", "normal", "--natural", "[-1, 0, 0]", "--points", "[0]"]);
    assert_eq!(domain.status.code(), Some(3));
    assert_eq!(stderr(&domain).lines().count(), 1);

    let point = homfam(&["eval", "--family", "gamma_lambda", "--classical", r#"{"k":1,"theta":1}"#, "--points", "[-1]"]);
    assert_eq!(point.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let same = dir.path().join("same.csv");
    std::fs::write(&same, "x\n1.5\n1.5\n1.5\n").unwrap();
    let fit = homfam(&["fit", "--family", "normal", "--in", same.to_str().unwrap()]);
    assert_eq!(fit.status.code(), Some(3), "{}", stderr(&fit));
}

#[test]
fn csv_header_must_match_chart() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "y\n1\n").unwrap();
    let o = homfam(&["eval", "--family", "normal", "--natural", "[1, 0, 0]", "--in", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(Path::new(&bad).exists());
}
