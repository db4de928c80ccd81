use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use icsrs_cli::config::Strictness;
use icsrs_cli::recipes::RECIPES;

fn icsrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icsrs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn column(csv: &str, name: &str) -> Vec<(f64, f64)> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[idx].parse().unwrap())
        })
        .collect()
}

fn argmax(points: &[(f64, f64)]) -> f64 {
    points.iter().fold((0.0, f64::MIN), |best, &(x, y)| if y > best.1 { (x, y) } else { best }).0
}

const BASE: &str = r#"
[link]
length_km = 50
alpha_c_db_per_km = 0.22
alpha_q_db_per_km = 0.21
h_ij_per_m = 1e-6

[plan]
quantum_frequency_thz = 193.5
channels = [{ frequency_thz = 193.7, power_dbm = 0 }]

[sweep]
variable = "length"
from = 1
to = 100
points = 100
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_recipes_names_all_figures() {
    let out = icsrs(&["list-recipes"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn fig4_forward_peak_near_forty_km() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig4.csv");
    let out = icsrs(&["run", "fig4", path.to_str().unwrap(), "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("# scenario = fig4\n"));
    let peak = argmax(&column(&csv, "forward_icsrs_mw_per_nm"));
    assert!((37.0..=43.0).contains(&peak), "{peak}");
    let backward = column(&csv, "backward_icsrs_mw_per_nm");
    assert!(backward.windows(2).all(|w| w[1].1 >= w[0].1));
}

#[test]
fn fig7_forward_srs_peak_near_twenty_km() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig7.csv");
    assert!(icsrs(&["run", "fig7", path.to_str().unwrap(), "-q"]).status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let peak = argmax(&column(&csv, "forward_srs_mw_per_nm"));
    assert!((19.0..=21.5).contains(&peak), "{peak}");
    assert!(csv.contains("# analysis.forward_srs_peak_km = 2.02033860883e1"));
}

#[test]
fn recipes_are_fast_and_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for r in RECIPES {
        let a = dir.path().join(format!("{}-a.csv", r.name));
        let b = dir.path().join(format!("{}-b.csv", r.name));
        let start = Instant::now();
        assert!(icsrs(&["run", r.name, a.to_str().unwrap(), "-q"]).status.success());
        assert!(start.elapsed() < Duration::from_secs(10), "{} took {:?}", r.name, start.elapsed());
        assert!(icsrs(&["run", r.name, b.to_str().unwrap(), "-q"]).status.success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{}", r.name);
    }
}

#[test]
fn library_and_binary_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    assert!(icsrs(&["run", "fig3", path.to_str().unwrap(), "-q"]).status.success());
    let config = icsrs_cli::recipes::find("fig3").unwrap().load(Strictness::Strict).unwrap();
    let out = icsrs_cli::execute(&config).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), out.csv);
}

#[test]
fn gnuplot_companion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5.csv");
    assert!(icsrs(&["run", "fig5", path.to_str().unwrap(), "-q", "--gnuplot"]).status.success());
    let gp = std::fs::read_to_string(dir.path().join("fig5.gp")).unwrap();
    assert!(gp.contains("plot 'fig5.csv' using 1:12"));
    let csv = std::fs::read_to_string(&path).unwrap();
    for mode in ["noiseless", "forward", "backward"] {
        assert!(csv.contains(&format!("# analysis.max_distance_km.{mode} = ")));
    }
}

#[test]
fn step_flag_changes_peak_search_only() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(icsrs(&["run", "fig4", a.to_str().unwrap(), "-q"]).status.success());
    assert!(icsrs(&["run", "fig4", b.to_str().unwrap(), "-q", "--step", "0.005"]).status.success());
    let a = std::fs::read_to_string(a).unwrap();
    let b = std::fs::read_to_string(b).unwrap();
    assert!(b.contains("# analysis.peak_step_km = 0.005"));
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
    assert_eq!(icsrs(&["run", "fig4", "x.csv", "--step", "0"]).status.code(), Some(3));
}

#[test]
fn config_file_with_output_section() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("from-config.csv");
    let text = format!("{BASE}\n[output]\npath = {:?}\n", out_path.to_str().unwrap());
    let cfg = write_config(dir.path(), &text);
    let out = icsrs(&["run", &cfg, "-q"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(column(&std::fs::read_to_string(out_path).unwrap(), "length_km").len(), 100);
}

#[test]
fn validation_failures_exit_three_and_name_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &BASE.replace("length_km = 50", "length_km = -5").replace("points = 100", "points = 0"));
    let out = icsrs(&["validate", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("link.length_km"), "{err}");
    assert!(err.contains("sweep.points"), "{err}");
}

#[test]
fn unknown_keys_strict_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &BASE.replace("[sweep]", "[sweep]\nstride = 2"));
    assert_eq!(icsrs(&["validate", &cfg]).status.code(), Some(3));
    assert_eq!(icsrs(&["validate", &cfg, "--strict"]).status.code(), Some(3));
    let lenient = icsrs(&["validate", &cfg, "--lenient"]);
    assert!(lenient.status.success());
    assert!(String::from_utf8(lenient.stderr).unwrap().contains("sweep.stride"));
}

#[test]
fn io_failures_exit_five() {
    assert_eq!(icsrs(&["validate", "/nonexistent/scenario.toml"]).status.code(), Some(5));
    let out = icsrs(&["run", "fig4", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn computation_failures_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{BASE}\n[receiver]\ndetection_efficiency = 0\ndark_count_prob = 0\n");
    let cfg = write_config(dir.path(), &text);
    assert!(icsrs(&["validate", &cfg]).status.success());
    let out = icsrs(&["run", &cfg, dir.path().join("o.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!dir.path().join("o.csv").exists());
}

#[test]
fn profile_file_resolved_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("eta.txt"), "-20 3e-9\n20 3e-9\n").unwrap();
    let cfg = write_config(dir.path(), &format!("{BASE}\n[profile]\nsource = \"eta.txt\"\n"));
    let out_path = dir.path().join("o.csv");
    assert!(icsrs(&["run", &cfg, out_path.to_str().unwrap(), "-q"]).status.success());
    let half = column(&std::fs::read_to_string(&out_path).unwrap(), "forward_icsrs_mw_per_nm");

    let cfg = write_config(dir.path(), BASE);
    assert!(icsrs(&["run", &cfg, out_path.to_str().unwrap(), "-q"]).status.success());
    let full = column(&std::fs::read_to_string(&out_path).unwrap(), "forward_icsrs_mw_per_nm");
    for (h, f) in half.iter().zip(&full) {
        assert!((2.0 * h.1 - f.1).abs() <= 1e-10 * f.1);
    }
}
