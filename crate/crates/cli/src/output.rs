//! CSV emission: `#` metadata lines, a fixed header row, one row per point.

use std::io::Write;
use std::path::{Path, PathBuf};

use icsrs_core::analysis::{Spacing, SweepResult, SweepRow, SweepVariable};
use icsrs_core::dwdm::Direction;
use icsrs_core::qkd::ClickModel;
use icsrs_core::raman::NoiseDensity;

use crate::config::ScenarioConfig;
use crate::Analyses;

/// Noise columns, each emitted as `<name>_mw_per_nm` and `<name>_dbm_per_nm`.
pub const NOISE_COLUMNS: [&str; 5] = ["forward_icsrs", "backward_icsrs", "forward_srs", "backward_srs", "plan_icsrs"];

/// Key-rate columns following the noise columns.
pub const KEY_COLUMNS: [&str; 8] = [
    "skr",
    "qber",
    "skr_forward",
    "qber_forward",
    "skr_backward",
    "qber_backward",
    "skr_noiseless",
    "qber_noiseless",
];

pub fn header(abscissa: &str) -> Vec<String> {
    let mut h = vec![abscissa.to_string()];
    for n in NOISE_COLUMNS {
        h.push(format!("{n}_mw_per_nm"));
        h.push(format!("{n}_dbm_per_nm"));
    }
    h.extend(KEY_COLUMNS.iter().map(|s| s.to_string()));
    h
}

/// 12 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn record(row: &SweepRow, abscissa_scale: f64) -> Vec<String> {
    let mut r = vec![num(row.abscissa / abscissa_scale)];
    let noise: [NoiseDensity; 5] = [
        row.forward_icsrs,
        row.backward_icsrs,
        row.forward_srs,
        row.backward_srs,
        row.plan_icsrs,
    ];
    for n in noise {
        r.push(num(n.value()));
        r.push(num(n.dbm_per_nm()));
    }
    for k in [row.key, row.key_forward, row.key_backward, row.key_noiseless] {
        r.push(num(k.rate));
        r.push(num(k.qber));
    }
    r
}

fn metadata(config: &ScenarioConfig, analyses: &Analyses) -> Vec<String> {
    let s = config.scenario();
    let spec = &config.sweep;
    let mut m = vec![
        format!("scenario = {}", config.name),
        format!("link.length_km = {}", s.link.length_km()),
        format!("link.alpha_c_per_km = {}", s.link.alpha_c().value()),
        format!("link.alpha_q_per_km = {}", s.link.alpha_q().value()),
        format!("link.h_ij_per_m = {}", s.link.h_ij().per_meter_value()),
        format!("link.validation = {:?}", config.validation),
        format!("plan.quantum_wavelength_nm = {}", s.plan.quantum_wavelength().value()),
    ];
    if let Some(g) = s.plan.grid_spacing_ghz() {
        m.push(format!("plan.grid_spacing_ghz = {g}"));
    }
    for (i, ch) in s.plan.channels().iter().enumerate() {
        let dir = match ch.direction {
            Direction::CoPropagating => "co",
            Direction::CounterPropagating => "counter",
        };
        let alpha = ch.alpha_c.map(|a| a.value().to_string()).unwrap_or_else(|| "link".into());
        m.push(format!(
            "plan.channel[{i}] = wavelength_nm {}, power_mw {}, direction {dir}, alpha_c_per_km {alpha}",
            ch.wavelength.value(),
            ch.launch_power.value()
        ));
    }
    let rx = &s.receiver;
    m.push(format!(
        "receiver = det_efficiency {}, dark_count_prob {}, gate_width_s {}, bandwidth_ghz {}, e_d {}, mu {}, f_ec {}, q {}",
        rx.det_efficiency,
        rx.dark_count_prob,
        rx.gate_width_s,
        rx.rx_bandwidth_ghz,
        rx.misalignment_error,
        rx.mean_photon_number,
        rx.ec_efficiency,
        rx.protocol_factor
    ));
    m.push(match rx.click_model {
        ClickModel::BandwidthWindow => "receiver.click_model = bandwidth-window".into(),
        ClickModel::Calibrated { clicks_per_mw_per_nm } => {
            format!("receiver.click_model = calibrated {clicks_per_mw_per_nm}")
        }
    });
    m.push(format!("profile.source = {}", config.profile_source));
    m.push(format!(
        "sweep = {} from {} to {}, {} points, {}",
        variable_name(spec.variable),
        spec.lo / config.abscissa.to_canonical,
        spec.hi / config.abscissa.to_canonical,
        spec.points,
        match spec.spacing {
            Spacing::Linear => "linear",
            Spacing::Logarithmic => "log",
        }
    ));
    m.push(format!("analysis.peak_step_km = {}", config.analysis.peak.step_km));
    m.push(format!("analysis.forward_icsrs_peak_km = {}", outcome(&analyses.icsrs_peak_km)));
    m.push(format!("analysis.forward_srs_peak_km = {}", outcome(&analyses.srs_peak_km)));
    for (mode, d) in &analyses.max_distance {
        let text = match d {
            Ok(d) if d.bracket_limited => format!("> {}", num(d.distance_km)),
            Ok(d) => num(d.distance_km),
            Err(e) => format!("unavailable ({e})"),
        };
        m.push(format!("analysis.max_distance_km.{mode} = {text}"));
    }
    m.push("columns: noise densities in mW/nm and dBm/nm; *_icsrs/*_srs treat every channel as co (forward) or counter (backward)".into());
    m.push("columns: plan_icsrs and skr/qber follow the configured directions; skr is secure bits per pulse".into());
    m
}

fn outcome(r: &Result<f64, icsrs_core::Error>) -> String {
    match r {
        Ok(v) => num(*v),
        Err(e) => format!("unavailable ({e})"),
    }
}

pub fn variable_name(v: SweepVariable) -> &'static str {
    match v {
        SweepVariable::Length => "length",
        SweepVariable::CouplingCoeff => "h_ij",
        SweepVariable::AlphaC => "alpha_c",
        SweepVariable::AlphaQ => "alpha_q",
        SweepVariable::LaunchPower => "launch_power",
    }
}

/// Render the whole CSV document.
pub fn render(config: &ScenarioConfig, result: &SweepResult, analyses: &Analyses) -> Result<Vec<u8>, csv::Error> {
    let mut buf = Vec::new();
    for line in metadata(config, analyses) {
        writeln!(buf, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(header(config.abscissa.column))?;
    for row in &result.rows {
        w.write_record(record(row, config.abscissa.to_canonical))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Gnuplot script plotting `csv_path`; noise curves, or key rates for
/// receiver-side scenarios.
pub fn gnuplot_script(config: &ScenarioConfig, csv_path: &Path) -> String {
    let csv_name = csv_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let key_plot = config.analysis.max_distance.is_some() || config.sweep.variable == SweepVariable::LaunchPower;
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{}'\n", config.abscissa.column));
    if config.sweep.spacing == Spacing::Logarithmic {
        s.push_str("set logscale x\n");
    }
    let columns: &[usize] = if key_plot {
        s.push_str("set logscale y\nset ylabel 'secure key rate (bits/pulse)'\n");
        &[12, 14, 16, 18]
    } else {
        s.push_str("set ylabel 'noise (mW/nm)'\n");
        &[2, 4, 6, 8]
    };
    let plots: Vec<String> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let file = if i == 0 { format!("'{csv_name}'") } else { "''".into() };
            format!("{file} using 1:{c} with lines")
        })
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = header("length_km");
        assert_eq!(h.len(), 1 + 2 * NOISE_COLUMNS.len() + KEY_COLUMNS.len());
        assert_eq!(h[1], "forward_icsrs_mw_per_nm");
        assert_eq!(h[11], "skr");
        assert_eq!(h[17], "skr_noiseless");
    }

    #[test]
    fn number_format() {
        assert_eq!(num(1.19867446123683e-9), "1.19867446124e-9");
        assert_eq!(num(0.0), "0.00000000000e0");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
