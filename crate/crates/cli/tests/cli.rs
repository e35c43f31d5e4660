use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ab-spectral"))
        .args(args)
        .env_remove("AB_SPECTRAL_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Data rows of a CSV, header and comments dropped.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

/// `key=value` from a summary line.
fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in {line:?}"))
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn bound_state_profile_decays() {
    let out = run(&[
        "eigenfunction",
        "--kappa",
        "0.5",
        "--theta",
        "1.5708",
        "--energy",
        "bound",
        "--r",
        "0.05:10:512",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("r,u,du_dr\n"));
    let data = rows(&text);
    assert_eq!(data.len(), 512);
    // E_b ≈ −1, so u ~ e^{−r} with algebraic corrections of order 1/r².
    let at = |r: f64| {
        data.iter()
            .min_by(|a, b| (a[0] - r).abs().total_cmp(&(b[0] - r).abs()))
            .unwrap()
    };
    let (a, b) = (at(8.0), at(10.0));
    let slope = (b[1].abs().ln() - a[1].abs().ln()) / (b[0] - a[0]);
    assert!((slope + 1.0).abs() < 1e-2, "slope {slope}");
    // The log derivative tends to −√|E_b| as well.
    assert!((b[2] / b[1] + 1.0).abs() < 1e-2);
}

#[test]
fn exact_angle_at_exact_energy_decays() {
    let out = run(&[
        "eigenfunction",
        "--kappa",
        "0.5",
        "--theta",
        "1.5707963267948966",
        "--energy",
        "-1",
        "--r",
        "1:9:3",
    ]);
    assert!(out.status.success());
    let data = rows(&stdout(&out));
    let ratio = data[2][1] / data[0][1];
    assert!((ratio.abs() - (-8f64).exp()).abs() < 1e-3 * (-8f64).exp(), "{ratio}");
}

#[test]
fn theta_is_optional_only_outside_the_extension_family() {
    let out = run(&["eigenfunction", "--kappa", "1.5", "--energy", "2", "--r", "0.5:1:2"]);
    assert!(out.status.success());
    assert_eq!(rows(&stdout(&out)).len(), 2);
    let out = run(&["eigenfunction", "--kappa", "0.5", "--energy", "2", "--r", "0.5:1:2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn axis_is_a_usage_error() {
    let out = run(&[
        "eigenfunction",
        "--kappa",
        "0",
        "--theta",
        "1",
        "--energy",
        "1",
        "--r",
        "0:1:5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("positive"));
}

#[test]
fn bound_state_tables() {
    let out = run(&["bound-states", "--phi", "0.5", "--theta", "1.5707963267948966"]);
    assert!(out.status.success());
    let data = rows(&stdout(&out));
    assert_eq!(data.len(), 2);
    for row in &data {
        assert!((row[2] + 1.0).abs() < 1e-12);
    }

    let out = run(&["bound-states", "--phi", "0.3", "--theta", "kappa"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "m,kappa,E_b,weight,theta\n");

    let out = run(&["bound-states", "--phi", "0", "--theta", "0.7853981633974483"]);
    let data = rows(&stdout(&out));
    assert_eq!(data.len(), 1);
    let e = -std::f64::consts::PI.exp();
    assert!((data[0][2] - e).abs() < 1e-12 * e.abs());
}

#[test]
fn config_channels_and_bad_channel_sets() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.toml",
        "phi = 0.5\n[[channel]]\nm = -1\ntheta = 0.5\n[[channel]]\nm = 0\ntheta = 1.5707963267948966\n",
    );
    let out = run(&["bound-states", "--config", &good]);
    assert!(out.status.success(), "{}", stderr(&out));
    let data = rows(&stdout(&out));
    assert_eq!(data.len(), 1);
    assert_eq!(data[0][0], 0.0);

    let bad = write(dir.path(), "bad.toml", "phi = 0.3\n[[channel]]\nm = 0\ntheta = 1.0\n");
    for cmd in ["bound-states", "verify"] {
        let out = run(&[cmd, "--config", &bad]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(stderr(&out).contains("channels"));
    }
    let typo = write(dir.path(), "typo.toml", "phi = 0.5\n[grid]\nradial_node = 3\n");
    assert_eq!(
        run(&["bound-states", "--config", &typo, "--theta", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn measure_lists_atom_and_density() {
    let out = run(&["measure", "--kappa", "0.5", "--theta", "kappa", "--energy", "1:4:2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains("# atom"));
    for row in rows(&text) {
        assert!((row[1] - 0.5 * row[0].sqrt()).abs() < 1e-12);
    }
    let out = run(&[
        "measure",
        "--phi",
        "0.5",
        "--theta",
        "1.5707963267948966",
        "--m",
        "0",
        "--energy",
        "1:2:2",
    ]);
    assert!(stdout(&out).starts_with("# atom -1"));
}

#[test]
fn transform_named_family_is_unitary_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let out = run(&[
            "transform",
            "--kappa",
            "0.3",
            "--theta",
            "1",
            "--family",
            "gauss:0.5:3",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let line = stdout(&out);
        assert!(field(&line, "roundtrip_defect") <= 1e-6, "{line}");
        assert!(field(&line, "parseval_defect") <= 1e-6, "{line}");
        assert_eq!(field(&line, "atoms"), 1.0);
        files.push(std::fs::read(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files.remove(0)).unwrap();
    assert!(text.starts_with("# atom "));
    assert!(!text.contains('\r') && text.ends_with('\n'));
    assert!(text.lines().all(|l| !l.ends_with(',')));
}

#[test]
fn transform_csv_input() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("r,re,im\n");
    for i in 0..=400 {
        let r = 0.5 + 2.5 * f64::from(i) / 400.0;
        let x = (r - 1.75) / 1.25;
        csv.push_str(&format!("{r},{},0\n", (1.0 - x * x).powi(5)));
    }
    let input = write(dir.path(), "psi.csv", &csv);
    let out = run(&["transform", "--kappa", "1.5", "--input", &input, "--e-max", "200"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(field(&stderr(&out), "atoms"), 0.0);
    assert!(stdout(&out).starts_with("E,re,im\n"));

    let bad = write(dir.path(), "bad.csv", "r,re,im\n1,0,0\n2,x,0\n");
    let out = run(&["transform", "--kappa", "1.5", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn transform_3d_separable_keeps_only_its_channel() {
    let out = run(&[
        "transform",
        "--mode",
        "3d",
        "--phi",
        "0.3",
        "--theta",
        "1.5707963267948966",
        "--family",
        "gauss:0.5:3",
        "--field-m",
        "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(field(&stderr(&out), "parseval_defect_3d") < 1e-5);
    let text = stdout(&out);
    assert!(!text.contains("# atom"));
    let data = rows(&text);
    assert!(!data.is_empty());
    assert!(data.iter().all(|row| row[0] == 2.0));

    let out = run(&[
        "transform",
        "--mode",
        "3d",
        "--phi",
        "0.3",
        "--theta",
        "1.5707963267948966",
        "--family",
        "gauss:0.5:3",
        "--field-m",
        "0",
    ]);
    assert!(stdout(&out).contains("# atom 0 "));
}

#[test]
fn verify_reports_controls_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let small = "[verify]\nkappas = [0.5]\ntransform_kappas = [0.3]\nthetas = [1.0]\nphis = []\n";
    let cfg = write(dir.path(), "v.toml", small);
    let report = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--config",
        &cfg,
        "--negative-controls",
        "-o",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let results: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let controls: Vec<_> = results.iter().filter(|r| r["expected_failure"] == true).collect();
    assert!(!controls.is_empty());
    assert!(controls.iter().all(|r| r["passed"] == false));

    let strict = write(
        dir.path(),
        "s.toml",
        &format!("{small}[verify.tolerances]\nwronskian = 1e-30\n"),
    );
    let out = run(&["verify", "--config", &strict]);
    assert_eq!(out.status.code(), Some(1));
    let results: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(results
        .iter()
        .any(|r| r["check_id"] == "ac01-wronskian" && r["passed"] == false));
}

#[test]
fn thread_variable_is_validated() {
    let bin = env!("CARGO_BIN_EXE_ab-spectral");
    let args = ["bound-states", "--phi", "0.5", "--theta", "1"];
    let out = Command::new(bin)
        .args(args)
        .env("AB_SPECTRAL_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin)
        .args(args)
        .env("AB_SPECTRAL_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn help_describes_outputs() {
    let out = run(&["eigenfunction", "--help"]);
    let text = stdout(&out);
    assert!(text.contains("u^κ_θ(E|r)") && text.contains("--energy"));
    let out = run(&["bound-states", "--help"]);
    assert!(stdout(&out).contains("-e^{π cot θ}"));
}
