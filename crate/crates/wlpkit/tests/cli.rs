use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64 as C64;
use wlpkit::touchstone::{self, Options};
use wlpkit_core::network::{FrequencyGrid, SMatrix, TwoPortNetwork};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn wlpkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlpkit")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&wlpkit(&["validate", s(&config("cpw_sweep.json"))])), 0);
    let bad = wlpkit(&["validate", s(&config("bad_geometry.json"))]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("recess-through-cap"));
    assert_eq!(code(&wlpkit(&["validate", "/nonexistent/x.json"])), 1);
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "{\n  \"preset\": \"cpw_sweep\",\n  \"viaa\": 3\n}\n");
    let o = wlpkit(&["validate", s(&p)]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("viaa") && err.contains("line 3"), "{err}");
    let p = write_config(dir.path(), r#"{"preset": "nope"}"#);
    assert_eq!(code(&wlpkit(&["validate", s(&p)])), 1);
}

#[test]
fn sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlpkit(&["sweep", s(&config("cpw_sweep.json")), "-o", s(dir.path()), "--workers", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "gsg_lateral_distance,via_diameter,s21_db,s11_db");
    assert_eq!(lines.len(), 1 + 11 * 19);
    assert!(lines[1].starts_with("150,5,"));
    assert!(lines[2].starts_with("150,10,"));
    let trend = std::fs::read_to_string(dir.path().join("trend.csv")).unwrap();
    assert_eq!(trend.lines().count(), 7);
    assert!(trend.lines().skip(1).all(|l| l.split(',').nth(3) == Some("true")), "{trend}");
}

#[test]
fn objective_must_be_on_grid() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        r#"{"preset": "cpw_sweep",
            "frequency": {"start_hz": 1e9, "stop_hz": 10e9, "points": 4},
            "sweep": {"objective_frequency_hz": 5e9,
                      "axes": [{"dof": "via_diameter", "min": 5, "max": 95, "count": 3}]}}"#,
    );
    let o = wlpkit(&["sweep", s(&p)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a grid point"));
}

#[test]
fn compose_through_via_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let grid = FrequencyGrid::linear(0.5e9, 10e9, 20).unwrap();
    let through = TwoPortNetwork::through(grid, 50.0).unwrap();
    let via = dir.path().join("through.s2p");
    std::fs::write(&via, touchstone::write(&through, Options::default())).unwrap();
    let o = wlpkit(&["compose", s(&config("varactor_via.json")), "--via-sn", s(&via), "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let read = |n: &str| std::fs::read_to_string(dir.path().join(n)).unwrap();
    assert_eq!(read("capped.s2p"), read("uncapped.s2p"));
    assert_eq!(read("capped_s21.csv"), read("uncapped_s21.csv"));
    assert!(read("capped_s21.csv").starts_with("freq_hz,mag_db,phase_deg,smith_re,smith_im\n"));
}

#[test]
fn compose_open_via_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let grid = FrequencyGrid::linear(0.5e9, 10e9, 20).unwrap();
    let open = SMatrix {
        s11: C64::new(1.0, 0.0),
        s12: C64::new(0.0, 0.0),
        s21: C64::new(0.0, 0.0),
        s22: C64::new(1.0, 0.0),
    };
    let n = TwoPortNetwork::new(grid, vec![open; 20], 50.0).unwrap();
    let via = dir.path().join("open.s2p");
    std::fs::write(&via, touchstone::write(&n, Options::default())).unwrap();
    let o = wlpkit(&["compose", s(&config("varactor_via.json")), "--via-sn", s(&via), "-o", s(dir.path())]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn convert_between_formats() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/attenuator_3db_ma_hz.s2p");
    let db = dir.path().join("att_db.s2p");
    let ri = dir.path().join("att_ri.s2p");
    assert_eq!(code(&wlpkit(&["touchstone", "convert", s(&src), s(&db), "--format", "DB"])), 0);
    assert_eq!(code(&wlpkit(&["touchstone", "convert", s(&db), s(&ri), "--format", "ri"])), 0);
    let text = std::fs::read_to_string(&ri).unwrap();
    assert!(text.contains("# Hz S RI R 50"));
    let a = touchstone::parse(&std::fs::read_to_string(&src).unwrap(), 2).unwrap().into_two_port().unwrap();
    let b = touchstone::parse(&text, 2).unwrap().into_two_port().unwrap();
    for (x, y) in a.s().iter().zip(b.s()) {
        assert!((x.s21 - y.s21).norm() < 1e-9);
    }
    let bad = dir.path().join("bad.s2p");
    std::fs::write(&bad, "# GHz S RI\n1 0 0 1\n").unwrap();
    let o = wlpkit(&["touchstone", "convert", s(&bad), s(&ri), "--format", "MA"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn varactor_cv_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = wlpkit(&["varactor", "cv", s(&config("varactor_via.json")), "-o", s(dir.path())]);
    assert_eq!(code(&o), 0);
    let cv = std::fs::read_to_string(dir.path().join("cv.csv")).unwrap();
    let rows: Vec<&str> = cv.lines().collect();
    assert_eq!(rows[0], "bias_v,displacement_m,capacitance_f,state");
    assert_eq!(rows.len(), 14);
    assert!(rows[1].ends_with(",up") && rows[13].ends_with(",pulled_in"));
    let pull = std::fs::read_to_string(dir.path().join("pull_in.csv")).unwrap();
    assert!(pull.lines().nth(1).unwrap().split(',').nth(1).unwrap().starts_with("4.9086"));
}

#[test]
fn db_format_flag_rejects_junk() {
    let o = wlpkit(&["touchstone", "convert", "a.s2p", "b.s2p", "--format", "XY"]);
    assert_eq!(code(&o), 1);
}
