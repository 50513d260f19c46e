use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use zigzag::lattice::{build_zigzag_chain, ZigZagParams};
use zigzag::numerics::eig_hermitian;
use zigzag::spectral::{selected_ipr, StateRule};

fn zigzag(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zigzag"))
        .current_dir(dir)
        .env_remove("ZIGZAG_WORKERS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn rows(path: PathBuf) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn reals(path: PathBuf) -> Vec<Vec<f64>> {
    rows(path).into_iter().map(|r| r.iter().map(|x| x.parse().unwrap()).collect()).collect()
}

fn manifest(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn band_k_points_and_landmarks() {
    let d = TempDir::new().unwrap();
    let o = zigzag(d.path(), &["band", "--k-points", "2", "--out", "two"]);
    assert_eq!(code(&o), 0);
    assert_eq!(reals(d.path().join("two.csv")).len(), 2);

    assert_eq!(code(&zigzag(d.path(), &["band", "--g", "0", "--out", "flat"])), 0);
    for r in reals(d.path().join("flat.csv")) {
        assert!((r[1] - r[2]).abs() < 1e-12 && (r[3] - r[4]).abs() < 1e-12);
        assert!((r[1] + r[4]).abs() < 1e-12);
        assert!(r[1..].windows(2).all(|w| w[0] <= w[1]));
    }

    assert_eq!(code(&zigzag(d.path(), &["band", "--out", "default"])), 0);
    let m = manifest(d.path().join("default.manifest.json"));
    let g = m["parameters"]["g"].as_f64().unwrap();
    assert_eq!(m["results"]["k_at_gap_min"].as_f64(), Some(0.0));
    assert!((m["results"]["gap_min"].as_f64().unwrap() - 2.0 * (0.063 - 2.0 * g)).abs() < 1e-12);
}

#[test]
fn band_validation() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&zigzag(d.path(), &["band", "--k-points", "1"])), 2);
    assert_eq!(code(&zigzag(d.path(), &["band", "--theta", "60"])), 2);
    assert_eq!(code(&zigzag(d.path(), &["band", "--k-points", "x"])), 2);
    assert_eq!(code(&zigzag(d.path(), &["band", "--theta", "60", "--g", "0", "--k-points", "5"])), 0);
    assert_eq!(code(&zigzag(d.path(), &["--help"])), 0);
    assert_eq!(code(&zigzag(d.path(), &["bogus"])), 2);
}

#[test]
fn winding_phases() {
    let d = TempDir::new().unwrap();
    let o = zigzag(d.path(), &["winding", "--g", "0.016"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "1"));
    let o = zigzag(d.path(), &["winding", "--g", "0.048"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "0"));
    let o = zigzag(d.path(), &["winding", "--g", "0.0315", "--out", "closed"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("winding undefined: spectrum gapless"));
    let contour = rows(d.path().join("closed.csv"));
    assert_eq!(contour.len(), 1025);
    assert!(manifest(d.path().join("closed.manifest.json"))["status"].as_str().unwrap().starts_with("error (exit 3)"));
}

#[test]
fn winding_contour_columns() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&zigzag(d.path(), &["winding", "--k-points", "128"])), 0);
    let r = reals(d.path().join("winding.csv"));
    assert_eq!(r.len(), 129);
    assert_eq!(r[0][0], -std::f64::consts::PI);
    for row in &r {
        assert!((row[2].atan2(row[1]) - row[3]).abs() < 1e-12);
    }
    assert_eq!(code(&zigzag(d.path(), &["winding", "--k-points", "8"])), 2);
}

#[test]
fn chain_spectrum_and_states() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&zigzag(d.path(), &["chain", "--n", "7", "--g", "0", "--states", "mid-spectrum", "--out", "c"])), 0);
    let e: Vec<f64> = reals(d.path().join("c_spectrum.csv")).iter().map(|r| r[1]).collect();
    assert_eq!(e.len(), 14);
    for pair in e.chunks(2) {
        assert!((pair[0] - pair[1]).abs() < 1e-12);
    }
    let state = reals(d.path().join("c_state_6.csv"));
    assert_eq!(state.len(), 7);
    let norm: f64 = state.iter().map(|r| r[1..].iter().map(|x| x * x).sum::<f64>()).sum();
    assert!((norm - 1.0).abs() < 1e-12);

    assert_eq!(code(&zigzag(d.path(), &["chain", "--n", "3", "--states", "all", "--out", "a"])), 0);
    assert!((0..6).all(|k| d.path().join(format!("a_state_{k}.csv")).exists()));
    assert_eq!(code(&zigzag(d.path(), &["chain", "--n", "3", "--states", "6"])), 2);
    assert_eq!(code(&zigzag(d.path(), &["chain", "--n", "3", "--states", "edge"])), 2);
}

#[test]
fn chain_edge_polarizations_are_opposite() {
    let d = TempDir::new().unwrap();
    let o = zigzag(d.path(), &["chain", "--n", "101", "--g", "0.016", "--states", "mid-spectrum", "--out", "e"]);
    assert_eq!(code(&o), 0);
    let s = &manifest(d.path().join("e.manifest.json"))["results"]["states"][0];
    assert_eq!(s["polarizations_opposite"], Value::Bool(true));
    let (lx, rx) = (s["left_weight_x"].as_f64().unwrap(), s["right_weight_x"].as_f64().unwrap());
    let (ly, ry) = (s["left_weight_y"].as_f64().unwrap(), s["right_weight_y"].as_f64().unwrap());
    assert!(lx.max(rx) / (lx + rx) > 0.9 && ly.max(ry) / (ly + ry) > 0.9);
    assert!((lx > rx) != (ly > ry));
}

#[test]
fn phase_diagram_single_cell_matches_direct() {
    let d = TempDir::new().unwrap();
    let args = ["phase-diagram", "--t-perp-range", "0.037:0.037:1", "--g-range", "0.02:0.02:1", "--n", "21"];
    assert_eq!(code(&zigzag(d.path(), &args)), 0);
    let r = reals(d.path().join("phase-diagram.csv"));
    assert_eq!(r.len(), 1);
    let h = build_zigzag_chain(&ZigZagParams::new(-0.1, 0.037, 0.02, 21)).unwrap();
    let s = eig_hermitian(&h.matrix).unwrap();
    assert_eq!(r[0][2], selected_ipr(&h, &s, StateRule::MidSpectrum).unwrap());
}

#[test]
fn phase_diagram_independent_of_workers() {
    let d = TempDir::new().unwrap();
    let base = ["phase-diagram", "--t-perp-range", "-0.1:0.1:4", "--g-range", "0:0.08:5", "--n", "15"];
    let one = [&base[..], &["--workers", "1", "--out", "one"]].concat();
    let many = [&base[..], &["--workers", "8", "--out", "many"]].concat();
    assert_eq!(code(&zigzag(d.path(), &one)), 0);
    assert_eq!(code(&zigzag(d.path(), &many)), 0);
    let a = fs::read(d.path().join("one.csv")).unwrap();
    assert_eq!(a, fs::read(d.path().join("many.csv")).unwrap());
    assert_eq!(rows(d.path().join("one.csv")).len(), 20);
    let env = Command::new(env!("CARGO_BIN_EXE_zigzag"))
        .current_dir(d.path())
        .env("ZIGZAG_WORKERS", "2")
        .args([&base[..], &["--out", "env"]].concat())
        .output()
        .unwrap();
    assert_eq!(code(&env), 0);
    assert_eq!(manifest(d.path().join("env.manifest.json"))["workers"].as_u64(), Some(2));
    assert_eq!(a, fs::read(d.path().join("env.csv")).unwrap());
}

#[test]
fn phase_diagram_range_validation() {
    let d = TempDir::new().unwrap();
    for bad in ["0:1", "0:1:0", "0:1:1", "a:b:c"] {
        let o = zigzag(d.path(), &["phase-diagram", "--t-perp-range", bad, "--g-range", "0:0.1:3", "--n", "5"]);
        assert_eq!(code(&o), 2, "{bad}");
    }
}

#[test]
fn disorder_zero_range_and_reproducibility() {
    let d = TempDir::new().unwrap();
    let base = ["disorder", "--realizations", "40", "--n", "12", "--g-range", "0:0.08:9", "--seed", "7"];
    assert_eq!(code(&zigzag(d.path(), &[&base[..], &["--range", "0", "--out", "flat"]].concat())), 0);
    for r in reals(d.path().join("flat.csv")) {
        assert!(r[1..].iter().all(|&x| x == 0.0), "{r:?}");
    }
    assert_eq!(code(&zigzag(d.path(), &[&base[..], &["--out", "a"]].concat())), 0);
    assert_eq!(code(&zigzag(d.path(), &[&base[..], &["--out", "b", "--workers", "3"]].concat())), 0);
    assert_eq!(fs::read(d.path().join("a.csv")).unwrap(), fs::read(d.path().join("b.csv")).unwrap());
    let m = manifest(d.path().join("a.manifest.json"));
    assert_eq!(m["master_seed"].as_u64(), Some(7));
    assert_eq!(m["failures"]["total"].as_u64(), Some(0));
    assert_eq!(rows(d.path().join("a.csv"))[0].len(), 5);
}

#[test]
fn disorder_protects_edge_level_at_low_g() {
    let d = TempDir::new().unwrap();
    let args = ["disorder", "--realizations", "100", "--g-range", "0.01:0.01:1", "--seed", "3"];
    assert_eq!(code(&zigzag(d.path(), &args)), 0);
    let r = &reals(d.path().join("disorder.csv"))[0];
    assert!(r[1] < 0.05 * r[2], "edge {} bulk {}", r[1], r[2]);
}

#[test]
fn circuit_transmon_panels() {
    let d = TempDir::new().unwrap();
    let o = zigzag(d.path(), &["circuit", "transmon", "--ratio-range", "15:50:8", "--gnuplot", "--out", "t"]);
    assert_eq!(code(&o), 0);
    let disp = reals(d.path().join("t_dispersion.csv"));
    assert_eq!(disp.len(), 8);
    assert!(disp.windows(2).all(|w| w[1][2] < w[0][2]));
    let slope = manifest(d.path().join("t.manifest.json"))["results"]["wkb_fit"]["slope"].as_f64().unwrap();
    assert!(slope < -0.8 && slope > -1.1, "slope {slope}");
    assert_eq!(reals(d.path().join("t_levels.csv"))[0].len(), 6);
    let alpha = reals(d.path().join("t_anharmonicity.csv"));
    assert!(alpha.iter().all(|r| r[1] < -1.0 && r[1] > -2.0));
    assert!(alpha.windows(2).all(|w| w[1][1] > w[0][1]));
    assert!(d.path().join("t_dispersion.gp").exists());
}

#[test]
fn circuit_below_floor_token_and_validation() {
    let d = TempDir::new().unwrap();
    let o = zigzag(d.path(), &["circuit", "transmon", "--ratio-range", "400:400:1", "--panels", "dispersion"]);
    assert_eq!(code(&o), 0);
    let r = rows(d.path().join("circuit_dispersion.csv"));
    assert_eq!(r[0][1..], ["below_floor".to_string(), "below_floor".to_string()]);
    let m = manifest(d.path().join("circuit.manifest.json"));
    assert!(m["results"]["wkb_fit"]["unavailable"].is_string());
    assert_eq!(code(&zigzag(d.path(), &["circuit", "transmon", "--ratio-range", "15:50:8", "--levels", "0"])), 2);
    assert_eq!(code(&zigzag(d.path(), &["circuit", "transmon", "--ratio-range", "15:50:8", "--probe", "rss"])), 2);
    assert_eq!(code(&zigzag(d.path(), &["circuit", "ptransmon", "--ratio-range", "5:5:1", "--c", "0"])), 2);
}

#[test]
fn circuit_ptransmon_small_ratio() {
    let d = TempDir::new().unwrap();
    let args = ["circuit", "ptransmon", "--ratio-range", "8:12:2", "--transitions", "3", "--out", "p"];
    assert_eq!(code(&zigzag(d.path(), &args)), 0);
    let levels = reals(d.path().join("p_levels.csv"));
    // Dipole doublet.
    assert!(levels.iter().all(|r| (r[1] - r[2]).abs() < 1e-6 * r[1]));
    assert_eq!(rows(d.path().join("p_anharmonicity.csv"))[0].len(), 4);
    assert_eq!(rows(d.path().join("p_dispersion.csv")).len(), 2);
}

#[test]
fn ssh_defaults() {
    let d = TempDir::new().unwrap();
    let o = zigzag(d.path(), &["ssh"]);
    assert_eq!(code(&o), 0);
    let m = manifest(d.path().join("ssh.manifest.json"));
    let ratio = m["results"]["decay_fit"]["ratio"].as_f64().unwrap();
    assert!((ratio.abs() - 0.37).abs() < 0.01 && ratio < 0.0);
    assert_eq!(m["results"]["ratio_path_winding"].as_i64(), Some(1));
    assert_eq!(rows(d.path().join("ssh_profile.csv")).len(), 17);
    assert_eq!(rows(d.path().join("ssh_ratio_path.csv"))[0].len(), 3);
    assert!(stdout(&o).contains("ratio_path_winding 1"));

    let o = zigzag(d.path(), &["ssh", "--cell", "right", "--out", "r"]);
    assert_eq!(code(&o), 0);
    assert_eq!(manifest(d.path().join("r.manifest.json"))["results"]["ratio_path_winding"].as_i64(), Some(0));
}

#[test]
fn ssh_trivial_chain_has_no_fit() {
    let d = TempDir::new().unwrap();
    let o = zigzag(d.path(), &["ssh", "--n", "4", "--v", "1", "--w", "0"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient data"));
}

#[test]
fn replay_reproduces_outputs() {
    let d = TempDir::new().unwrap();
    let args = ["disorder", "--realizations", "20", "--n", "10", "--g-range", "0:0.06:4", "--seed", "11", "--out", "run"];
    assert_eq!(code(&zigzag(d.path(), &args)), 0);
    let first = fs::read(d.path().join("run.csv")).unwrap();
    fs::remove_file(d.path().join("run.csv")).unwrap();
    assert_eq!(code(&zigzag(d.path(), &["replay", "run.manifest.json"])), 0);
    assert_eq!(first, fs::read(d.path().join("run.csv")).unwrap());
    assert_eq!(code(&zigzag(d.path(), &["replay", "missing.json"])), 2);
}

#[test]
fn csv_reals_carry_seventeen_digits() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&zigzag(d.path(), &["band", "--k-points", "3"])), 0);
    for r in rows(d.path().join("band.csv")) {
        for field in r {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{field}");
        }
    }
}
