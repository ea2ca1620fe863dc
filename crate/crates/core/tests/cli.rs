use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const REFERENCE: &str = "\
# reference geometry
l = 30
l0 = 11
r = 1
l1 = 17
h_s = 15
h_0 = 10
zeta_w = -7.5
period = 1.5
dx = 0.02
";

fn owc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_owc")).args(args).output().unwrap()
}

fn scenario(dir: &Path, extra: &str) -> String {
    let path = dir.join("scenario.txt");
    fs::write(&path, format!("{REFERENCE}{extra}")).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_accepts_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = owc(&["validate", &scenario(dir.path(), "t_end = 5\n")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("valid (owc mode)"));
}

#[test]
fn validate_rejects_bad_geometry_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(dir.path(), "t_end = 5\n");
    fs::write(&path, fs::read_to_string(&path).unwrap().replace("l0 = 11", "l0 = 20")).unwrap();
    let out = owc(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("l1>l0>r"));
}

#[test]
fn unknown_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = owc(&["validate", &scenario(dir.path(), "t_end = 5\nwidth = 2\n")]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 12") && stderr.contains("width"), "{stderr}");
}

#[test]
fn numerical_abort_exits_2_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(dir.path(), "t_end = 2\namplitude = 40\ngauges = -29\n");
    let out_dir = dir.path().join("out");
    let out = owc(&["run", &path, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let gauges = fs::read_to_string(out_dir.join("gauges.csv")).unwrap();
    assert!(gauges.starts_with("t,x,zeta,q\n") && gauges.lines().count() > 2);
}

#[test]
fn run_writes_owc_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(dir.path(), "t_end = 0.5\ngauges = -20, 11\nsnapshot_times = 0.25\n");
    let out_dir = dir.path().join("out");
    let out = owc(&["run", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["gauges.csv", "energy.csv", "power.csv", "snapshot_t0.250.csv"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let power = fs::read_to_string(out_dir.join("power.csv")).unwrap();
    assert_eq!(power.lines().count(), 2);
    // the gauge under the structure reads the interior values
    let gauges = fs::read_to_string(out_dir.join("gauges.csv")).unwrap();
    let interior: Vec<&str> = gauges.lines().filter(|l| l.split(',').nth(1) == Some("1.1000000000000000e1")).collect();
    assert!(!interior.is_empty());
    assert!(interior.iter().all(|l| l.split(',').nth(2) == Some("-7.5000000000000000e0")));
}

#[test]
fn compare_writes_paired_snapshots_and_arrivals() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(dir.path(), "t_end = 5\ngauges = 10\nsnapshot_times = 1.7, 3.3, 5.0\n");
    let out_dir = dir.path().join("out");
    let out = owc(&["compare", &path, "--step-heights", "0,5", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut snapshots: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("snapshot_"))
        .collect();
    snapshots.sort();
    assert_eq!(
        snapshots,
        [
            "snapshot_s0_t1.700.csv",
            "snapshot_s0_t3.300.csv",
            "snapshot_s0_t5.000.csv",
            "snapshot_s5_t1.700.csv",
            "snapshot_s5_t3.300.csv",
            "snapshot_s5_t5.000.csv",
        ]
    );
    let arrivals = fs::read_to_string(out_dir.join("arrivals.csv")).unwrap();
    let times: Vec<f64> = arrivals
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(times.len(), 2);
    assert!(times[1] > times[0], "{arrivals}");
}

#[test]
fn compare_needs_two_heights() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(dir.path(), "t_end = 0.1\n");
    let out = owc(&["compare", &path, "--step-heights", "0,2,5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
