use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qswitch_cli::config::ScenarioConfig;
use tempfile::TempDir;

const ROTATIONS: &str = r#"
system = "qubit"
family = "rotations"

[params]
beta = 1.0
omega = 1.0
t_abs = 0.5
t_phase = 0.0
theta_c = 1.5707963267948966
phi_c = 0.0
alpha_x = 1.5707963267948966
alpha_y = 3.141592653589793

[[sweep]]
parameter = "beta"
start = 0.0
stop = 2.0
count = 5
"#;

const U2_SEARCH: &str = r#"
system = "qubit"
family = "u2"
seed = 3
budget = 2000

[params]
beta = 0.0
omega = 1.0
t_abs = 1.0
t_phase = 0.0
theta_c = 1.5707963267948966
phi_c = 0.0
"#;

fn qswitch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qswitch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "rot.toml", ROTATIONS);
    let out = dir.path().join("rot.csv");
    let run = qswitch(&["sweep", s(&cfg), "--out", s(&out)]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("alpha_x [rad],alpha_y [rad],beta [1/energy]"));
    assert!(lines[0].contains("delta_qs [energy]"));
    assert!(!text.contains('\r'));
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "rot.toml", ROTATIONS);
    let a = qswitch(&["sweep", s(&cfg)]);
    let b = qswitch(&["sweep", s(&cfg)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn single_point_axis_gives_one_row() {
    let dir = TempDir::new().unwrap();
    let body = ROTATIONS.replace("count = 5", "count = 1");
    let cfg = write(&dir, "one.toml", &body);
    let run = qswitch(&["sweep", s(&cfg)]);
    assert!(run.status.success());
    assert_eq!(String::from_utf8(run.stdout).unwrap().lines().count(), 2);
}

#[test]
fn minimize_reports_seed_and_angles() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "u2.toml", U2_SEARCH);
    let run = qswitch(&["minimize", s(&cfg)]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let text = String::from_utf8(run.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    let col = |n: &str| headers.iter().position(|h| h.starts_with(n)).unwrap();
    assert_eq!(&row[col("seed")], "3");
    assert!(row[col("min_delta_qs")].parse::<f64>().unwrap() < 0.0);
    assert_eq!(qswitch(&["minimize", s(&cfg)]).stdout, text.into_bytes());
}

#[test]
fn minimize_rejects_non_u2_family() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "rot.toml", ROTATIONS);
    let run = qswitch(&["minimize", s(&cfg)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("family"));
}

#[test]
fn invalid_configs_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (
            "unknown.toml",
            ROTATIONS.replace("alpha_y", "alpha_z"),
            "alpha_z",
        ),
        (
            "omega.toml",
            ROTATIONS.replace("omega = 1.0", "omega = -1.0"),
            "omega",
        ),
        (
            "count.toml",
            ROTATIONS.replace("count = 5", "count = 0"),
            "sweep[0]",
        ),
        (
            "missing.toml",
            ROTATIONS.replace("alpha_x = 1.5707963267948966\n", ""),
            "alpha_x",
        ),
    ];
    for (name, body, field) in cases {
        let cfg = write(&dir, name, &body);
        let run = qswitch(&["sweep", s(&cfg)]);
        assert_eq!(run.status.code(), Some(1), "{name}");
        let err = String::from_utf8_lossy(&run.stderr);
        assert!(err.contains(field), "{name}: {err}");
    }
    let run = qswitch(&["sweep", s(&dir.path().join("absent.toml"))]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn unknown_figure_exits_with_one() {
    let run = qswitch(&["figure", "fig10"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(qswitch(&["figure"]).status.code() == Some(1));
}

#[test]
fn figure_writes_baseline_bytes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig1.csv");
    let run = qswitch(&["figure", "fig1", "--out", s(&out)]);
    assert!(run.status.success());
    let base = fs::read(format!("{}/fig1.csv", qswitch_cli::BASELINE_DIR)).unwrap();
    assert_eq!(fs::read(&out).unwrap(), base);
}

#[test]
fn verify_quick_passes_and_mutation_fails() {
    let ok = qswitch(&["verify", "--level", "quick"]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let bad = qswitch(&["verify", "--level", "quick", "--mutate", "chi-sign"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL cv_oracle"));
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = ScenarioConfig::parse(ROTATIONS).unwrap();
    let again = ScenarioConfig::parse(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(cfg, again);
}
