//! Scenario files, figure recipes and CSV output for `icsrs-core`.

pub mod config;
pub mod output;
pub mod recipes;

use std::path::{Path, PathBuf};

use icsrs_core::analysis::{find_forward_peak, forward_srs_peak_closed_form, run_sweep, SweepResult};
use icsrs_core::qkd::{max_secure_distance, MaxDistance, NoiseMode};
use icsrs_core::raman::RamanEfficiency;
use icsrs_core::units::Power;

use config::{load_config, ConfigError, LoadError, ScenarioConfig, Strictness};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Compute(#[from] icsrs_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("no output path: pass one or set [output] path")]
    NoOutput,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::NoOutput => 3,
            CliError::Compute(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { path, source } => CliError::Io { path, source },
            LoadError::Config(c) => CliError::Config(c),
        }
    }
}

/// A recipe name or a path to a scenario file.
pub fn resolve(target: &str, strictness: Strictness) -> Result<ScenarioConfig, CliError> {
    match recipes::find(target) {
        Some(r) => Ok(r.load(strictness)?),
        None => Ok(load_config(Path::new(target), strictness)?),
    }
}

/// Scalar results reported alongside the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Analyses {
    pub icsrs_peak_km: Result<f64, icsrs_core::Error>,
    pub srs_peak_km: Result<f64, icsrs_core::Error>,
    pub max_distance: Vec<(&'static str, Result<MaxDistance, icsrs_core::Error>)>,
}

/// Peak locations on the configured link, and maximum secure distances when
/// requested. Failures are recorded rather than raised: a flat or monotone
/// curve is a property of the scenario, not an error in the run.
pub fn analyse(config: &ScenarioConfig) -> Analyses {
    let s = config.scenario();
    let unit = |l| {
        let p = Power::mw(1.0)?;
        let eta = RamanEfficiency::per_km_nm(1.0)?;
        Ok(find_forward_peak(l, p, eta, config.analysis.peak)?.location_km)
    };
    let icsrs_peak_km = unit(&s.link);
    let srs_peak_km = forward_srs_peak_closed_form(s.link.alpha_c(), s.link.alpha_q());
    let mut max_distance = Vec::new();
    if let Some(search) = config.analysis.max_distance {
        match s.plan.noise_sources(&s.profile) {
            Ok(sources) => {
                for (label, mode) in [
                    ("noiseless", NoiseMode::None),
                    ("forward", NoiseMode::Forward),
                    ("backward", NoiseMode::Backward),
                ] {
                    max_distance.push((label, max_secure_distance(&s.link, &s.receiver, &sources, mode, search)));
                }
            }
            Err(e) => max_distance.push(("all", Err(e))),
        }
    }
    Analyses {
        icsrs_peak_km,
        srs_peak_km,
        max_distance,
    }
}

pub struct RunOutput {
    pub result: SweepResult,
    pub analyses: Analyses,
    pub csv: Vec<u8>,
}

/// Evaluate the sweep and render the CSV document without touching disk.
pub fn execute(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    let result = run_sweep(&config.sweep)?;
    let analyses = analyse(config);
    let csv = output::render(config, &result, &analyses).map_err(|e| CliError::Io {
        path: PathBuf::from("<csv>"),
        source: e.into(),
    })?;
    Ok(RunOutput { result, analyses, csv })
}

/// Execute and write the CSV (and optionally a gnuplot script next to it).
pub fn run_to_file(config: &ScenarioConfig, path: &Path, gnuplot: bool) -> Result<RunOutput, CliError> {
    let out = execute(config)?;
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    output::write_atomic(path, &out.csv).map_err(io)?;
    if gnuplot {
        let gp = path.with_extension("gp");
        output::write_atomic(&gp, output::gnuplot_script(config, path).as_bytes()).map_err(|source| CliError::Io {
            path: gp.clone(),
            source,
        })?;
    }
    Ok(out)
}
