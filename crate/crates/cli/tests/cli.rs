use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn material() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../materials/aluminium.conf")
}

fn stefan(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stefan"))
        .args(args)
        .arg("--material")
        .arg(material())
        .arg("--out-dir")
        .arg(out)
        .env_remove("STEFAN_OUT_DIR")
        .output()
        .expect("spawn stefan")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn assert_headers(dir: &Path) {
    let prefix = format!("# stefan {} config_sha256=", env!("CARGO_PKG_VERSION"));
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let first = text.lines().next().unwrap_or("");
        let hash = first.strip_prefix(&prefix).unwrap_or_else(|| panic!("{}: header `{first}`", path.display()));
        assert_eq!(hash.len(), 64, "{}", path.display());
        assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
        n += 1;
    }
    assert!(n > 0);
}

#[test]
fn rod_check_names_row_three() {
    let tmp = tempfile::tempdir().unwrap();
    let o = stefan(&["check", "rod", "--k=-2", "--gamma=1", "--q0=1"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("row 3"));
    let csv = fs::read_to_string(tmp.path().join("check_rod_residuals.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("family,item,condition,eps,residual"));
    assert!(csv.lines().count() > 100);
    assert_headers(tmp.path());
}

#[test]
fn rod_check_without_symmetry_row() {
    let tmp = tempfile::tempdir().unwrap();
    let o = stefan(&["check", "rod", "--k=1.5", "--gamma=1", "--q0=1"], tmp.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("no row"));
}

#[test]
fn stefan_and_generator_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let o = stefan(&["check", "stefan", "--law", "general"], tmp.path());
    assert!(stdout(&o).contains("classification: row 1"));
    let o = stefan(&["check", "stefan", "--law", "inverse-sqrt"], tmp.path());
    assert!(stdout(&o).contains("classification: row 3"));
    let o = stefan(&["check", "table2-case-5"], tmp.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("invariant: true"));
    assert_headers(tmp.path());
}

#[test]
fn reproduce_lists_published_beside_computed() {
    let tmp = tempfile::tempdir().unwrap();
    let o = stefan(&["reproduce-paper"], tmp.path());
    assert!(o.status.success());
    let summary = fs::read_to_string(tmp.path().join("reproduce_summary.csv")).unwrap();
    let rows: Vec<Vec<f64>> = summary
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for (row, (q0, mu, delta)) in rows.iter().zip([(1e10, 0.10, 9.60e-4), (5e10, 0.54, 2.23e-4)]) {
        assert_eq!((row[0], row[1], row[3]), (q0, mu, delta));
        assert!((row[2] / mu - 1.0).abs() < 0.15);
        assert!((row[4] / delta - 1.0).abs() < 0.15);
    }
    for f in ["profile_q0_1e10.csv", "profile_q0_5e10.csv"] {
        let text = fs::read_to_string(tmp.path().join(f)).unwrap();
        assert_eq!(text.lines().nth(1), Some("xi_m,eta,phase,T_K,u_or_v_Jm3"));
    }
    assert_headers(tmp.path());
}

#[test]
fn identical_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [a.path(), b.path()] {
        assert!(stefan(&["solve-tw", "--q0", "3e10"], dir).status.success());
        assert!(stefan(&["solve-ss"], dir).status.success());
    }
    for f in ["tw_profile.csv", "tw_summary.csv", "ss_profile.csv", "ss_summary.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_hash_tracks_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let header = |args: &[&str]| {
        assert!(stefan(args, tmp.path()).status.success());
        let t = fs::read_to_string(tmp.path().join("tw_summary.csv")).unwrap();
        t.lines().next().unwrap().to_string()
    };
    let base = header(&["solve-tw"]);
    assert_eq!(base, header(&["solve-tw"]));
    assert_ne!(base, header(&["solve-tw", "--set", "Tinf=290"]));
}

#[test]
fn missing_material_exits_two_without_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_stefan"))
        .args(["solve-tw", "--material", "/nonexistent/al.conf", "--out-dir"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    assert!(!out.exists());
}

#[test]
fn bad_overrides_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    for args in [
        &["solve-tw", "--set", "colour=3"][..],
        &["solve-tw", "--set", "rho=-1"],
        &["solve-tw", "--set", "rho"],
        &["check", "table2-case-9"],
        &["check", "nonsense"],
    ] {
        let o = stefan(args, &out);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert!(!out.exists());
}

#[test]
fn oracle_outside_tolerance_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = stefan(&["verify-fd", "--n", "10", "--tol", "1e-9"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds --tol"));
    let o = stefan(&["verify-fd", "--n", "10"], tmp.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("velocity_rel_error"));
    assert_headers(tmp.path());
}

#[test]
fn out_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_stefan"))
        .args(["solve-tw", "--material"])
        .arg(material())
        .env("STEFAN_OUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(tmp.path().join("tw_summary.csv").exists());
}

#[test]
fn help_documents_units() {
    let help = |sub: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_stefan")).args([sub, "--help"]).output().unwrap();
        stdout(&o)
    };
    assert!(help("solve-tw").contains("W/m^2"));
    assert!(help("verify-fd").contains("s."));
    assert!(help("check").contains("dimensionless"));
}
