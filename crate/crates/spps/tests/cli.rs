use std::path::PathBuf;
use std::process::{Command, Output};

fn spps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spps")).args(args).output().expect("spawn spps")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Column `col` of every data row.
fn column(csv: &str, col: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == col).unwrap_or_else(|| panic!("no column {col}"));
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn sine_spectrum_from_catalog() {
    let o = spps(&["eigs", "--catalog", "constant-dirichlet", "--count", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("n,lambda_re,lambda_im,delta1,delta2,tail_bound,shift_round\n"));
    assert!(!out.contains('\r'));
    let got = column(&out, "lambda_re");
    assert_eq!(column(&out, "n"), vec![1.0, 2.0, 3.0]);
    for (g, w) in got.iter().zip([1.0, 4.0, 9.0]) {
        assert!((g - w).abs() / w < 1e-10, "{g}");
    }
}

#[test]
fn eigenparameter_in_boundary_condition_from_file() {
    // u(0) = 0, u'(1) = λu(1) for −u″ = λu: λ = z² with cos z = z sin z
    let z = bisect(|z| z.cos() - z * z.sin(), 0.1, 1.5);
    let o = spps(&["eigs", "--problem", &fixture("tan_robin.json"), "--count", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = column(&stdout(&o), "lambda_re");
    assert!((got[0] - z * z).abs() < 1e-7, "{} vs {}", got[0], z * z);
    assert!((got[0] - 0.740174).abs() < 1e-6);
}

#[test]
fn output_is_deterministic() {
    let args = ["eigs", "--catalog", "constant-neumann-dirichlet", "--count", "4", "--digits", "15"];
    let a = spps(&args);
    let b = spps(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_errors_exit_one_with_a_single_line() {
    for args in [
        vec!["eigs", "--problem", &fixture("bad_expression.json") as &str],
        vec!["eigs", "--catalog", "no-such-problem"],
        vec!["eigs", "--catalog", "paine", "--digits", "5"],
        vec!["eigs", "--catalog", "paine", "--shift", "somewhere"],
        vec!["sweep", "--eps", "3"],
    ] {
        let o = spps(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("spps: "));
    }
}

#[test]
fn stagnation_exits_two() {
    let o = spps(&["eigs", "--catalog", "paine", "--count", "40", "--powers", "10", "--grid", "200", "--digits", "15"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("increase N"));
}

#[test]
fn ivp_matches_closed_form() {
    let o = spps(&["ivp", "--catalog", "constant-dirichlet", "--lambda", "4", "--a", "0", "--b", "1", "--x0", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("x,u_re,u_im,du_re,du_im\n"));
    let xs = column(&out, "x");
    let us = column(&out, "u_re");
    let dus = column(&out, "du_re");
    assert_eq!(xs.len(), 2001);
    for ((x, u), du) in xs.iter().zip(&us).zip(&dus) {
        assert!((u - (2.0 * x).sin() / 2.0).abs() < 1e-10, "u({x})");
        assert!((du - (2.0 * x).cos()).abs() < 1e-9, "u'({x})");
    }
}

#[test]
fn ivp_at_paine_ground_state_vanishes_at_right_end() {
    let o = spps(&["ivp", "--catalog", "paine", "--lambda", "1.519865821099", "--a", "0", "--b", "1", "--x0", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let us = column(&stdout(&o), "u_re");
    assert!(us.last().unwrap().abs() < 1e-6, "{}", us.last().unwrap());
}

#[test]
fn json_format_and_out_file() {
    let dir = std::env::temp_dir().join(format!("spps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("eigs.json");
    let o = spps(&["eigs", "--catalog", "constant-dirichlet", "--count", "2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let l: f64 = rows[1]["lambda_re"].as_str().unwrap().parse().unwrap();
    assert!((l - 4.0).abs() < 1e-10);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_emits_long_format_rows() {
    let o = spps(&["sweep", "--eps", "0.5,0.1", "--count", "2", "--digits", "15"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("epsilon,n,lambda_n"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[0][0], rows[0][1]), ("0.5", "1"));
    assert_eq!((rows[2][0], rows[2][1]), ("0.1", "1"));
    let l: f64 = rows[2][2].parse().unwrap();
    assert!((l - 1.00968).abs() < 5e-4, "{l}");
}

#[test]
fn catalog_lists_and_exports_entries() {
    let o = spps(&["catalog"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in ["paine", "coffey-evans-20", "bessel", "benilov-0.01", "constant-dirichlet"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("{name},"))), "{name}");
    }
    let o = spps(&["catalog", "paine"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["name"], "paine");
    assert_eq!(v["boundary"]["kind"], "dirichlet");
    assert_eq!(v["recommended"]["M"], 10000);
    assert_eq!(v["references"][0]["lambda"], "1.519865821099");
}

#[test]
fn exported_problem_file_runs() {
    let dir = std::env::temp_dir().join(format!("spps-export-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dn.json");
    let o = spps(&["catalog", "constant-dirichlet-neumann"]);
    std::fs::write(&path, &o.stdout).unwrap();
    let from_file = spps(&["eigs", "--problem", path.to_str().unwrap(), "--count", "3", "--digits", "15"]);
    let from_catalog = spps(&["eigs", "--catalog", "constant-dirichlet-neumann", "--count", "3", "--digits", "15"]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    assert_eq!(from_file.stdout, from_catalog.stdout);
    for (n, l) in column(&stdout(&from_file), "lambda_re").iter().enumerate() {
        let w = (n as f64 + 0.5).powi(2);
        assert!((l - w).abs() / w < 1e-10);
    }
    std::fs::remove_dir_all(&dir).ok();
}
