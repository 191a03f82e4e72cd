use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cqtraj_core::closed_form::step_contour_level;
use cqtraj_core::{ModelSpec, Units, VelocityField, Wavefunction, C64};
use serde_json::Value;

fn cqtraj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqtraj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

/// Rows of a numeric CSV, header checked.
fn read_csv(path: &Path, header: &[&str]) -> Vec<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), header);
    r.records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .map(|v| v.parse::<f64>().unwrap())
                .collect()
        })
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const TRAJ: [&str; 5] = ["t", "x_re", "x_im", "v_re", "v_im"];

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = cqtraj(&["figures", "--which", "shm1", "--out", &out_arg(d.path())]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (fa, fb) = (sorted_files(a.path()), sorted_files(b.path()));
    assert_eq!(fa.len(), 8);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(
            fs::read(x).unwrap(),
            fs::read(y).unwrap(),
            "{}",
            x.display()
        );
    }
}

#[test]
fn every_data_file_has_one_sidecar() {
    let d = tempfile::tempdir().unwrap();
    let o = cqtraj(&["figures", "--out", &out_arg(d.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let files = sorted_files(d.path());
    let csvs: Vec<_> = files
        .iter()
        .filter(|p| p.extension().unwrap() == "csv")
        .collect();
    assert_eq!(csvs.len(), 4 + 4 + 4 + 1 + 5);
    assert_eq!(files.len(), 2 * csvs.len());
    for c in csvs {
        let meta = read_json(&c.with_extension("json"));
        assert_eq!(meta["data_file"], c.file_name().unwrap().to_str().unwrap());
        assert_eq!(meta["incomplete"], false);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(code(&cqtraj(&["--help"])), 0);
    assert_eq!(code(&cqtraj(&["--version"])), 0);
    assert_eq!(
        code(&cqtraj(&["traj", "--model", "well", "--x0", "1,0"])),
        3
    );
    assert_eq!(code(&cqtraj(&["traj", "--model", "ho", "--bogus"])), 3);
    assert_eq!(code(&cqtraj(&["traj", "--model", "ho", "--x0", "1;0"])), 3);
    assert_eq!(
        code(&cqtraj(&[
            "traj", "--model", "ho", "--alpha", "-1", "--x0", "1,0"
        ])),
        3
    );
    assert_eq!(
        code(&cqtraj(&[
            "traj", "--model", "ho", "--rtol", "0", "--x0", "1,0"
        ])),
        3
    );
    assert_eq!(code(&cqtraj(&["expect", "--model", "plane"])), 3);
    assert_eq!(
        code(&cqtraj(&["action", "--model", "packet", "--x0", "1,0"])),
        3
    );
    assert_eq!(
        code(&cqtraj(&["field", "--model", "ho", "--quantity", "c"])),
        3
    );
}

#[test]
fn singularity_keeps_partial_data() {
    // Starts on the separatrix of n = 1, which runs into the node at 0.
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"model": "ho", "n": 1, "psi_floor": 1e-3, "t1": 3.0}"#,
    )
    .unwrap();
    let o = cqtraj(&[
        "traj",
        "--json-config",
        cfg.to_str().unwrap(),
        "--x0",
        "1.09868411346781,0.45508986056222",
        "--x0",
        "1.55,0",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&d.path().join("traj_000.csv"), &TRAJ);
    assert!(rows.len() > 10);
    let meta = read_json(&d.path().join("traj_000.json"));
    assert_eq!(meta["incomplete"], true);
    assert_eq!(meta["trajectory"]["termination"], "singularity");
    let other = read_json(&d.path().join("traj_001.json"));
    assert_eq!(other["incomplete"], false);
    assert_eq!(other["trajectory"]["termination"], "time_reached");

    // Starting exactly on the node leaves nothing to write.
    let o = cqtraj(&[
        "traj",
        "--model",
        "ho",
        "--n",
        "1",
        "--x0",
        "0,0",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn csv_rows_satisfy_the_velocity_field() {
    let d = tempfile::tempdir().unwrap();
    let o = cqtraj(&[
        "traj",
        "--model",
        "ho",
        "--n",
        "2",
        "--x0",
        "2.05,0.1",
        "--x0",
        "-0.3,0.4",
        "--t1",
        "4",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let wf = Wavefunction::new(ModelSpec::oscillator(2), Units::default()).unwrap();
    let field = VelocityField::new(&wf);
    for f in ["traj_000.csv", "traj_001.csv"] {
        for row in read_csv(&d.path().join(f), &TRAJ) {
            let v = field
                .complex_velocity(C64::new(row[1], row[2]), row[0])
                .unwrap()
                .xdot;
            let err = (v - C64::new(row[3], row[4])).norm();
            assert!(
                err <= 1e-9 * (1.0 + v.norm()),
                "{f}: t = {}: {err:e}",
                row[0]
            );
        }
    }
}

#[test]
fn action_of_first_excited_nest() {
    let d = tempfile::tempdir().unwrap();
    let o = cqtraj(&[
        "action",
        "--model",
        "ho",
        "--n",
        "1",
        "--x0",
        "1.55,0",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = read_json(&d.path().join("orbit_000.json"));
    let orbit = &meta["orbit"];
    assert!((orbit["action_over_h"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(orbit["winding"], 1);
    assert_eq!(orbit["is_larger_nest"], true);
    assert!((orbit["period"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    assert_eq!(meta["derived"]["energy"], 1.5);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn flags_win_over_json_config() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"model": "ho", "n": 2, "x0": ["2.0,0"], "rtol": 1e-10}"#,
    )
    .unwrap();
    let o = cqtraj(&[
        "action",
        "--json-config",
        cfg.to_str().unwrap(),
        "--n",
        "1",
        "--x0",
        "1.45,0",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = read_json(&d.path().join("orbit_000.json"));
    assert_eq!(meta["model"]["n"], 1);
    assert_eq!(meta["trajectory"]["x0"][0], 1.45);
    assert_eq!(meta["integrator"]["rel_tol"], 1e-10);
}

#[test]
fn step_dataset_levels() {
    let d = tempfile::tempdir().unwrap();
    let o = cqtraj(&["figures", "--which", "step", "--out", &out_arg(d.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let wf = Wavefunction::new(
        ModelSpec::PotentialStep {
            energy: 0.5,
            v0: 0.25,
            reflection: Some(1.0 / 2f64.sqrt()),
        },
        Units::default(),
    )
    .unwrap();
    for (label, c) in [
        ("-4", -4.0),
        ("-3", -3.0),
        ("-2", -2.0),
        ("-1", -1.0),
        ("0", 0.0),
    ] {
        let rows = read_csv(&d.path().join(format!("step_c{label}.csv")), &TRAJ);
        let last = rows.last().unwrap()[0];
        assert!((last - 20.0).abs() < 1e-9, "c = {c} ends at {last}");
        for row in rows {
            let level = step_contour_level(&wf, C64::new(row[1], row[2])).unwrap();
            assert!((level - c).abs() < 1e-6, "c = {c}: {level}");
            assert!(row[1] < 0.0);
        }
    }
    let grid = read_csv(&d.path().join("step_field.csv"), &["x_re", "x_im", "value"]);
    assert_eq!(grid.len(), 400 * 200);
    let lo = grid.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
    let hi = grid.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max);
    assert!(lo < -4.0 && hi <= 0.0 && hi > -0.1, "{lo} .. {hi}");
}

#[test]
fn ground_state_dataset_is_circles() {
    let d = tempfile::tempdir().unwrap();
    let o = cqtraj(&["figures", "--which", "shm0", "--out", &out_arg(d.path())]);
    assert_eq!(code(&o), 0);
    for r in [1.0, 2.0, 3.0, 4.0] {
        for row in read_csv(&d.path().join(format!("shm0_x{r}.csv")), &TRAJ) {
            assert!((C64::new(row[1], row[2]).norm() - r).abs() < 1e-6);
        }
    }
}

#[test]
fn packet_expectations() {
    let d = tempfile::tempdir().unwrap();
    let o = cqtraj(&[
        "expect",
        "--model",
        "packet",
        "--sigma",
        "1",
        "--kbar",
        "1.5",
        "--t",
        "0",
        "--t",
        "2",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(
        &d.path().join("expect.csv"),
        &[
            "t",
            "norm",
            "mean_x",
            "mean_p",
            "mean_e",
            "imag_residual",
            "truncation_l",
        ],
    );
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!((row[1] - 1.0).abs() < 1e-8);
        assert!((row[2] - 1.5 * row[0]).abs() < 1e-7);
        assert!((row[3] - 1.5).abs() < 1e-8);
        assert!((row[4] - 0.5 * (2.25 + 0.5)).abs() < 1e-8);
    }
}

#[test]
fn velocity_field_grid() {
    let d = tempfile::tempdir().unwrap();
    let o = cqtraj(&[
        "field",
        "--model",
        "ho",
        "--n",
        "1",
        "--nx",
        "21",
        "--ny",
        "11",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let grid = read_csv(&d.path().join("field.csv"), &["x_re", "x_im", "value"]);
    assert_eq!(grid.len(), 21 * 11);
    let meta = read_json(&d.path().join("field.json"));
    assert_eq!(meta["grid"]["quantity"], "velocity");
    // the node at the origin is a grid point
    assert_eq!(meta["grid"]["singular_samples"], 1);
}
