use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use liouville_core::relations::{predict_height, HeightInputs};
use liouville_lab::commands::read_height_inputs;
use liouville_lab::emit::{read_f64_array, to_json_bytes};
use serde_json::Value;

fn lab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouville-lab"))
        .env_remove("LIOUVILLE_LAB_OUT")
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn summary(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_record(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).lines().last().unwrap_or("").to_string()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn beta_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&lab(dir.path(), &["beta", "--alpha", "1", "--a", "2.4849"]));
    assert!((f(&s["beta"]) - 6.0).abs() < 1e-4);
    let s = summary(&lab(dir.path(), &["--units", "rho", "beta", "--alpha", "1", "--a", &12f64.ln().to_string()]));
    assert!((f(&s["beta"]) - 12.0 * PI).abs() < 1e-5);
}

#[test]
fn masses_listing() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&lab(dir.path(), &["masses", "--alpha1", "2", "--alpha2", "2"]));
    assert_eq!(s["masses"], serde_json::json!([[1, 4.0], [2, 8.0]]));
    let o = lab(dir.path(), &["masses", "--alpha1", "1", "--alpha2", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_record(&o).starts_with("error kind=InvalidParams code=1 msg=\""));
}

#[test]
fn blowup_points_and_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&lab(dir.path(), &["--seed", "5", "blowup-points", "--alpha1", "2", "--alpha2", "2", "--m", "2", "--oracle-starts", "10"]));
    let pts: Vec<[f64; 2]> = serde_json::from_value(s["points"].clone()).unwrap();
    let r = 1.0 / 3f64.sqrt();
    assert!((pts[0][0]).abs() < 1e-14 && (pts[0][1] + r).abs() < 1e-14 && (pts[1][1] - r).abs() < 1e-14);
    assert_eq!(s["oracle"]["converged"], 10);
    let s = summary(&lab(dir.path(), &["blowup-points", "--alpha1", "2", "--alpha2", "1", "--m", "1", "--rotation", "0.5pi"]));
    let pts: Vec<[f64; 2]> = serde_json::from_value(s["points"].clone()).unwrap();
    assert!(pts[0][0].abs() < 1e-15 && (pts[0][1] + 1.0 / 3.0).abs() < 1e-15);
    let o = lab(dir.path(), &["blowup-points", "--alpha1", "2.5", "--alpha2", "2", "--m", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(lab(dir.path(), &["beta", "--alpha", "1"]).status.code(), Some(64));
    assert_eq!(lab(dir.path(), &["--help"]).status.code(), Some(0));
    // validation
    assert_eq!(lab(dir.path(), &["mass-curve", "--alpha", "-2"]).status.code(), Some(1));
    assert_eq!(lab(dir.path(), &["collapse", "--rho", "12.6pi", "--schedule", "1e-4,1e-2"]).status.code(), Some(1));
    // numerical: no interior minimum
    let o = lab(dir.path(), &["rho-bar", "--alpha", "0.5", "--n", "40"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_record(&o).starts_with("error kind=NoInteriorMin code=2"));
    // numerical: Newton runs out of iterations
    let o = lab(dir.path(), &["disk-solve", "--t", "0.1", "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_record(&o).starts_with("error kind=NewtonDiverged code=2"));
    // io
    let o = lab(dir.path(), &["height", "--input", "/nonexistent/inputs.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_record(&o).starts_with("error kind=Io code=2"));
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

#[test]
fn identical_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["mass-curve", "--alpha", "2", "--n", "60", "--target", "7.8"];
    let oa = lab(a.path(), &args);
    let ob = lab(b.path(), &[&["--jobs", "4"], &args[..]].concat());
    assert_eq!(oa.stdout, ob.stdout);
    for name in ["mass_curve.csv", "mass_curve.json"] {
        assert_eq!(read(&a.path().join(name)), read(&b.path().join(name)), "{name}");
    }
    let csv = String::from_utf8(read(&a.path().join("mass_curve.csv"))).unwrap();
    assert!(csv.starts_with("a,beta,converged,tail\n") && !csv.contains('\r'));
    assert_eq!(csv.lines().count(), 61);

    let args = ["--seed", "9", "blowup-points", "--alpha1", "3", "--alpha2", "3", "--m", "2", "--oracle-starts", "8"];
    assert_eq!(lab(a.path(), &args).stdout, lab(b.path(), &[&["--jobs", "3"], &args[..]].concat()).stdout);
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# anchor\ncommand = beta\nalpha = 1\na = 2.4849\nderivative = true\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = summary(&lab(dir.path(), &["--config", cfg]));
    let from_flags = summary(&lab(dir.path(), &["beta", "--alpha", "1", "--a", "2.4849", "--derivative"]));
    assert_eq!(from_file, from_flags);
    let overridden = summary(&lab(dir.path(), &["--config", cfg, "beta", "--a", "0"]));
    assert_eq!(f(&overridden["a"]), 0.0);
    std::fs::write(dir.path().join("bad.cfg"), "command = beta\nalpha = 1\na = 0\nspeed = 3\n").unwrap();
    let o = lab(dir.path(), &["--config", dir.path().join("bad.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_record(&o).contains("kind=Config"));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_liouville-lab"))
        .env("LIOUVILLE_LAB_OUT", dir.path())
        .args(["masses", "--alpha1", "1", "--alpha2", "1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("masses.json").exists());
}

fn height_inputs() -> HeightInputs {
    HeightInputs {
        rho: 8.0 * PI * 2.0 + 1.7,
        m: 2,
        alpha1: 3,
        alpha2: 2,
        mass_integral: 0.37,
        c_ti: vec![0.9, 1.3],
        pairwise_dist: vec![vec![0.0, 0.4], vec![0.4, 0.0]],
        green_regular: vec![vec![0.11, -0.03], vec![-0.03, 0.07]],
        w_at_points: vec![0.2, -1.0 / 3.0],
        t: 0.05,
    }
}

#[test]
fn height_inputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = height_inputs();
    let path = dir.path().join("inputs.json");
    std::fs::write(&path, to_json_bytes(&h).unwrap()).unwrap();
    assert_eq!(read_height_inputs(&path).unwrap(), h);
    let s = summary(&lab(dir.path(), &["height", "--input", path.to_str().unwrap()]));
    let heights: Vec<f64> = serde_json::from_value(s["heights"].clone()).unwrap();
    assert_eq!(heights, vec![predict_height(&h, 0).unwrap(), predict_height(&h, 1).unwrap()]);
    assert_eq!(f(&s["log_coefficient"]), -(2.0 + 6.0 + 4.0 - 8.0));
}

#[test]
fn disk_grid_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&lab(dir.path(), &["disk-solve", "--t", "0.1"]));
    assert!((f(&s["lambda"]) - 8.446969872).abs() < 1e-6);
    let u = read_f64_array(&dir.path().join("disk.f64")).unwrap();
    assert_eq!(u.len() as u64, s["len"].as_u64().unwrap());
    assert_eq!(u[0], f(&s["max"]["value"]));
    let sidecar: Value = serde_json::from_slice(&read(&dir.path().join("disk.json"))).unwrap();
    assert_eq!(sidecar, s);

    let s = summary(&lab(dir.path(), &["disk-solve", "--case", "singular", "--n-r", "184", "--n-theta", "8"]));
    assert!(f(&s["sup_error"]) < 5e-3);
}

#[test]
fn collapse_and_scaling_reports() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&lab(dir.path(), &["collapse", "--rho", "12.6pi"]));
    assert!((f(&s["final_plateau"]) - 4.0).abs() < 1e-5);
    assert!(s["note"].as_str().unwrap().starts_with("radial mechanism only"));
    let csv = String::from_utf8(read(&dir.path().join("collapse.csv"))).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "eps,a_found,beta_check,plateau,plateau_third,r_probe,roots");
    assert_eq!(csv.lines().count(), 7);

    let s = summary(&lab(dir.path(), &["scaling", "--schedule", "0.2,0.1"]));
    assert!(s["note"].as_str().unwrap().starts_with("EXPLORATORY"));
    assert!(f(&s["total_variation"]) < 1e-3);
    assert_eq!(String::from_utf8(read(&dir.path().join("scaling.csv"))).unwrap().lines().count(), 3);
}
