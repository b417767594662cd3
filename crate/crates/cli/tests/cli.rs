use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boundary-steering"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

const SYMMETRIC: &[&str] =
    &["compute", "--alignment", "parallel", "--omega-a", "0.1", "--omega-b", "0.1", "--l", "0.5", "--dz", "1"];

#[test]
fn identical_detectors_steer_symmetrically() {
    let o = run(SYMMETRIC);
    assert!(o.status.success());
    let v = json(&o);
    assert!(v["s_ab"].as_f64().unwrap() > 0.0);
    assert_eq!(v["s_ab"], v["s_ba"]);
    assert_eq!(v["p_a"], v["p_b"]);
    assert_eq!(v["provenance"]["command"], "compute");
    assert_eq!(v["provenance"]["defaults"][0], "lambda = 1");
}

#[test]
fn compute_record_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let args = ["compute", "--alignment", "orthogonal", "--omega-a", "0.1", "--omega-b", "0.5", "--l", "0.3"];
    let o = run(&[&args[..], &["--dz", "0.7", "--lambda", "0.2", "--out", first.to_str().unwrap()]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let again = run(&["compute", "--from", first.to_str().unwrap()]);
    assert!(again.status.success());
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    let b = json(&again);
    for key in ["alignment", "omega_a", "omega_b", "lambda", "l", "dz", "p_a", "p_b", "c_re", "x_im", "s_ab", "s_ba"] {
        assert_eq!(a[key], b[key], "{key}");
    }
    assert_eq!(a["provenance"]["config_hash"], b["provenance"]["config_hash"]);
}

#[test]
fn invalid_input_exits_with_two() {
    let cases: &[&[&str]] = &[
        &["compute", "--alignment", "parallel", "--omega-a", "0.1", "--omega-b", "0.1", "--l", "1", "--dz", "-1"],
        &["compute", "--alignment", "parallel", "--omega-a", "0.5", "--omega-b", "0.1", "--l", "1", "--dz", "1"],
        &["compute", "--alignment", "parallel", "--omega-a", "0.1", "--omega-b", "0.1", "--l", "1"],
        &["compute", "--alignment", "parallel", "--omega-a", "0.1", "--omega-b", "0.1", "--l", "0", "--dz", "1"],
        &["sweep", "--alignment", "parallel", "--omega-a", "0.1", "--omega-b", "0.1", "--dz", "1", "--axis", "l", "--start", "0", "--stop", "1", "--log"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
}

#[test]
fn relabel_swaps_the_detectors() {
    let o = run(&["compute", "--alignment", "parallel", "--omega-a", "0.5", "--omega-b", "0.1", "--l", "1", "--dz", "1", "--relabel"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["omega_a"], 0.1);
    assert_eq!(v["omega_b"], 0.5);
    assert_eq!(v["swapped"], true);
}

#[test]
fn sweep_csv_has_comments_and_header() {
    let o = run(&[
        "sweep", "--alignment", "orthogonal", "--omega-a", "0.1", "--omega-b", "0.3", "--dz", "1", "--axis", "l", "--start",
        "0.05", "--stop", "2", "--points", "7",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let (comments, body): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| l.starts_with('#'));
    assert!(comments.iter().any(|l| l.starts_with("# config_hash: ")));
    assert!(comments.contains(&"# l: swept"));
    assert_eq!(body[0], "axis,p_a,p_b,abs_c,abs_x,s_ab,s_ba,asymmetry,concurrence");
    assert_eq!(body.len(), 8);
    let first: Vec<f64> = body[1].split(',').map(|x| x.parse().unwrap()).collect();
    let last: Vec<f64> = body[7].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.05);
    assert_eq!(last[0], 2.0);
}

#[test]
fn optimize_finds_the_identical_death_point() {
    let o = run(&[
        "optimize", "--alignment", "parallel", "--omega-a", "0.1", "--omega-b", "0.1", "--dz", "1", "--axis", "l", "--bracket",
        "0.05,2", "--transition", "ab",
    ]);
    assert!(o.status.success());
    let v = json(&o);
    let at = v["result"]["location"].as_f64().unwrap();
    assert!((at - 0.8448).abs() < 1e-3, "{at}");
    assert_eq!(v["result"]["kind"], "SuddenDeath");
}

#[test]
fn badly_bracketed_peak_is_rejected() {
    let o = run(&[
        "optimize", "--alignment", "parallel", "--omega-a", "0.1", "--omega-b", "0.1", "--dz", "1", "--axis", "l", "--bracket",
        "0.05,2", "--objective", "sab",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn csv_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn figure_writes_one_file_per_curve() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure", "fig5", "--out", dir.path().to_str().unwrap(), "--points", "9"]);
    assert!(o.status.success());
    let files = csv_files(dir.path());
    assert_eq!(files.len(), 4);
    for f in files {
        let text = std::fs::read_to_string(&f).unwrap();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert!(header.ends_with(",ref_s_ab,ref_s_ba"), "{}", f.display());
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10);
    }
}

#[test]
fn difference_figure_has_its_own_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["figure", "fig7", "--out", dir.path().to_str().unwrap(), "--points", "5", "--omega-b", "0.1"]);
    assert!(o.status.success());
    let files = csv_files(dir.path());
    assert_eq!(files.len(), 1);
    let text = std::fs::read_to_string(&files[0]).unwrap();
    assert!(text.lines().any(|l| l == "axis,delta_s_ab,delta_s_ba"));
}

#[test]
fn small_verify_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.json");
    let o = run(&["verify", "--grid", "small", "--out", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
    assert_eq!(v["provenance"]["quadrature"]["nodes"], 400);
}

#[test]
fn tight_verify_tolerance_exits_with_one() {
    let o = run(&["verify", "--grid", "small", "--tolerance", "2e-5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn unreachable_quadrature_tolerance_exits_with_three() {
    let o = run(&["verify", "--grid", "small", "--tolerance", "1e-9"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("convergence"));
}
