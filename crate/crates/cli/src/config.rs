//! Scenario documents: TOML text walked by hand so that every problem is
//! reported with its key path, not just the first one.

use std::fmt;
use std::path::{Path, PathBuf};

use icsrs_core::analysis::{PeakSearch, Scenario, Spacing, SweepSpec, SweepVariable};
use icsrs_core::dwdm::{load_profile, ChannelPlan, ClassicalChannel, Direction, RamanEfficiencyProfile};
use icsrs_core::fiber::{FiberLink, Validation};
use icsrs_core::qkd::{ClickModel, DistanceSearch, QuantumReceiver};
use icsrs_core::raman::RamanEfficiency;
use icsrs_core::units::{AttenuationCoeff, CouplingCoeff, Power, Wavelength};
use toml::{Table, Value};

pub const FLAT_PROFILE: &str = include_str!("../profiles/flat.txt");
pub const ILLUSTRATIVE_PROFILE: &str = include_str!("../profiles/illustrative.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{} problem(s):\n{}", .0.len(), list(.0))]
    Invalid(Vec<Issue>),
}

fn list(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

/// Units the swept variable is written in, both in config and CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub column: &'static str,
    /// Multiplier from config units to the model's canonical units.
    pub to_canonical: f64,
}

impl Abscissa {
    pub fn for_variable(v: SweepVariable) -> Self {
        let (column, to_canonical) = match v {
            SweepVariable::Length => ("length_km", 1.0),
            SweepVariable::CouplingCoeff => ("h_ij_per_m", 1e3),
            SweepVariable::AlphaC => ("alpha_c_per_km", 1.0),
            SweepVariable::AlphaQ => ("alpha_q_per_km", 1.0),
            SweepVariable::LaunchPower => ("launch_power_mw", 1.0),
        };
        Self { column, to_canonical }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub peak: PeakSearch,
    /// Report the maximum secure distance with and without noise.
    pub max_distance: Option<DistanceSearch>,
}

/// A fully validated scenario document.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub validation: Validation,
    pub profile_source: String,
    pub sweep: SweepSpec,
    pub abscissa: Abscissa,
    pub analysis: AnalysisOptions,
    pub output: Option<PathBuf>,
    pub warnings: Vec<Issue>,
}

impl ScenarioConfig {
    pub fn scenario(&self) -> &Scenario {
        &self.sweep.scenario
    }
}

/// Read and validate a scenario file. Relative profile paths resolve against
/// the file's directory.
pub fn load_config(path: &Path, strictness: Strictness) -> Result<ScenarioConfig, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse_config(&text, &name, path.parent(), strictness).map_err(LoadError::Config)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

struct Walker {
    issues: Vec<Issue>,
    warnings: Vec<Issue>,
    strictness: Strictness,
}

impl Walker {
    fn error(&mut self, key: impl Into<String>, message: impl Into<String>) {
        self.issues.push(Issue {
            key: key.into(),
            message: message.into(),
        });
    }

    fn unknown_keys(&mut self, section: &str, table: &Table, allowed: &[&str]) {
        for key in table.keys().filter(|k| !allowed.contains(&k.as_str())) {
            let issue = Issue {
                key: join(section, key),
                message: "unknown key".into(),
            };
            match self.strictness {
                Strictness::Strict => self.issues.push(issue),
                Strictness::Lenient => {
                    log::warn!("ignoring {issue}");
                    self.warnings.push(issue);
                }
            }
        }
    }

    fn section<'a>(&mut self, root: &'a Table, name: &str, required: bool) -> Option<&'a Table> {
        match root.get(name) {
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.error(name, "expected a section");
                None
            }
            None => {
                if required {
                    self.error(name, "missing section");
                }
                None
            }
        }
    }

    fn number(&mut self, table: &Table, section: &str, key: &str) -> Option<f64> {
        match table.get(key)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.error(join(section, key), format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    fn integer(&mut self, table: &Table, section: &str, key: &str) -> Option<i64> {
        match table.get(key)? {
            Value::Integer(i) => Some(*i),
            other => {
                self.error(join(section, key), format!("expected an integer, found {}", other.type_str()));
                None
            }
        }
    }

    fn string<'a>(&mut self, table: &'a Table, section: &str, key: &str) -> Option<&'a str> {
        match table.get(key)? {
            Value::String(s) => Some(s),
            other => {
                self.error(join(section, key), format!("expected a string, found {}", other.type_str()));
                None
            }
        }
    }

    fn boolean(&mut self, table: &Table, section: &str, key: &str) -> Option<bool> {
        match table.get(key)? {
            Value::Boolean(b) => Some(*b),
            other => {
                self.error(join(section, key), format!("expected a boolean, found {}", other.type_str()));
                None
            }
        }
    }

    /// At most one of `keys` may be present.
    fn exclusive(&mut self, table: &Table, section: &str, keys: &[&str]) -> bool {
        let present: Vec<_> = keys.iter().filter(|k| table.contains_key(**k)).collect();
        if present.len() > 1 {
            self.error(
                join(section, present[1]),
                format!("conflicts with {}", join(section, present[0])),
            );
            return false;
        }
        true
    }

    fn check<T>(&mut self, key: impl Into<String>, r: icsrs_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.error(key, e.to_string());
                None
            }
        }
    }
}

fn join(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

const ROOT_KEYS: &[&str] = &["name", "link", "receiver", "plan", "profile", "sweep", "analysis", "output"];
const LINK_KEYS: &[&str] = &[
    "length_km",
    "alpha_c_db_per_km",
    "alpha_c_per_km",
    "alpha_q_db_per_km",
    "alpha_q_per_km",
    "h_ij_per_m",
    "validation",
];
const RECEIVER_KEYS: &[&str] = &[
    "detection_efficiency",
    "dark_count_prob",
    "gate_width_ns",
    "bandwidth_ghz",
    "misalignment_error",
    "mean_photon_number",
    "ec_efficiency",
    "protocol_factor",
    "clicks_per_mw_per_nm",
];
const PLAN_KEYS: &[&str] = &["quantum_frequency_thz", "quantum_wavelength_nm", "grid_spacing_ghz", "channels"];
const CHANNEL_KEYS: &[&str] = &[
    "frequency_thz",
    "wavelength_nm",
    "power_mw",
    "power_dbm",
    "direction",
    "alpha_c_db_per_km",
    "alpha_c_per_km",
];
const PROFILE_KEYS: &[&str] = &["source", "constant_eta"];
const SWEEP_KEYS: &[&str] = &["variable", "from", "to", "points", "spacing"];
const ANALYSIS_KEYS: &[&str] = &["peak_step_km", "peak_range_km", "max_distance", "distance_bracket_km"];
const OUTPUT_KEYS: &[&str] = &["path"];

/// Parse and validate scenario text. `base_dir` resolves relative profile paths.
pub fn parse_config(
    text: &str,
    default_name: &str,
    base_dir: Option<&Path>,
    strictness: Strictness,
) -> Result<ScenarioConfig, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    let mut w = Walker {
        issues: Vec::new(),
        warnings: Vec::new(),
        strictness,
    };
    w.unknown_keys("", &root, ROOT_KEYS);
    let name = w.string(&root, "", "name").unwrap_or(default_name).to_string();

    let sweep_t = w.section(&root, "sweep", true);
    let sweep = sweep_t.and_then(|t| read_sweep(&mut w, t));

    let link_t = w.section(&root, "link", true);
    let validation = link_t.map(|t| read_validation(&mut w, t)).unwrap_or_default();
    let link = link_t.and_then(|t| read_link(&mut w, t, validation, sweep.as_ref()));

    let plan_t = w.section(&root, "plan", true);
    let plan = plan_t.and_then(|t| read_plan(&mut w, t, validation, sweep.as_ref()));

    let quantum = plan.as_ref().map(|p| p.quantum_wavelength());
    let receiver = match (w.section(&root, "receiver", false), quantum) {
        (Some(t), Some(q)) => read_receiver(&mut w, t, q),
        (None, Some(q)) => Some(QuantumReceiver::with_defaults(q)),
        _ => None,
    };

    let (profile_source, profile) = match w.section(&root, "profile", false) {
        Some(t) => read_profile(&mut w, t, base_dir),
        None => (
            "builtin:flat".to_string(),
            w.check("profile.source", load_profile(FLAT_PROFILE)),
        ),
    };

    let analysis = match w.section(&root, "analysis", false) {
        Some(t) => read_analysis(&mut w, t),
        None => AnalysisOptions {
            peak: PeakSearch::default(),
            max_distance: None,
        },
    };

    let output = match w.section(&root, "output", false) {
        Some(t) => {
            w.unknown_keys("output", t, OUTPUT_KEYS);
            w.string(t, "output", "path").map(PathBuf::from)
        }
        None => None,
    };

    let mut config = None;
    if let (Some((variable, lo, hi, points, spacing)), Some(link), Some(plan), Some(receiver), Some(profile)) =
        (sweep, link, plan, receiver, profile)
    {
        let abscissa = Abscissa::for_variable(variable);
        let spec = SweepSpec {
            variable,
            lo: lo * abscissa.to_canonical,
            hi: hi * abscissa.to_canonical,
            points,
            spacing,
            scenario: Scenario {
                link,
                plan,
                receiver,
                profile,
            },
        };
        if w.check("sweep", spec.validate()).is_some() {
            check_endpoints(&mut w, &spec);
        }
        config = Some(ScenarioConfig {
            name,
            validation,
            profile_source,
            sweep: spec,
            abscissa,
            analysis,
            output,
            warnings: Vec::new(),
        });
    }

    match config {
        Some(mut c) if w.issues.is_empty() => {
            c.warnings = w.warnings;
            Ok(c)
        }
        _ => Err(ConfigError::Invalid(w.issues)),
    }
}

type SweepParts = (SweepVariable, f64, f64, usize, Spacing);

fn read_sweep(w: &mut Walker, t: &Table) -> Option<SweepParts> {
    w.unknown_keys("sweep", t, SWEEP_KEYS);
    let variable = match w.string(t, "sweep", "variable") {
        Some("length") => Some(SweepVariable::Length),
        Some("h_ij") => Some(SweepVariable::CouplingCoeff),
        Some("alpha_c") => Some(SweepVariable::AlphaC),
        Some("alpha_q") => Some(SweepVariable::AlphaQ),
        Some("launch_power") => Some(SweepVariable::LaunchPower),
        Some(other) => {
            w.error(
                "sweep.variable",
                format!("unknown variable {other:?}; expected length, h_ij, alpha_c, alpha_q or launch_power"),
            );
            None
        }
        None => {
            if !t.contains_key("variable") {
                w.error("sweep.variable", "missing key");
            }
            None
        }
    };
    let lo = required_number(w, t, "sweep", "from");
    let hi = required_number(w, t, "sweep", "to");
    let points = match w.integer(t, "sweep", "points") {
        Some(n) if n >= 2 => Some(n as usize),
        Some(n) => {
            w.error("sweep.points", format!("{n} points requested; at least 2 required"));
            None
        }
        None => {
            if !t.contains_key("points") {
                w.error("sweep.points", "missing key");
            }
            None
        }
    };
    let spacing = match w.string(t, "sweep", "spacing") {
        None if !t.contains_key("spacing") => Some(Spacing::Linear),
        Some("linear") => Some(Spacing::Linear),
        Some("log") | Some("logarithmic") => Some(Spacing::Logarithmic),
        Some(other) => {
            w.error("sweep.spacing", format!("unknown spacing {other:?}; expected linear or log"));
            None
        }
        None => None,
    };
    Some((variable?, lo?, hi?, points?, spacing?))
}

fn required_number(w: &mut Walker, t: &Table, section: &str, key: &str) -> Option<f64> {
    if !t.contains_key(key) {
        w.error(join(section, key), "missing key");
        return None;
    }
    let v = w.number(t, section, key)?;
    if !v.is_finite() {
        w.error(join(section, key), "must be finite");
        return None;
    }
    Some(v)
}

fn read_validation(w: &mut Walker, t: &Table) -> Validation {
    match w.string(t, "link", "validation") {
        None | Some("standard") => Validation::Standard,
        Some("c-band") | Some("c_band") => Validation::CBand,
        Some(other) => {
            w.error("link.validation", format!("unknown mode {other:?}; expected standard or c-band"));
            Validation::Standard
        }
    }
}

/// Read an attenuation given either in dB/km or km⁻¹.
fn attenuation(w: &mut Walker, t: &Table, section: &str, stem: &str) -> Option<Option<AttenuationCoeff>> {
    let db_key = format!("{stem}_db_per_km");
    let lin_key = format!("{stem}_per_km");
    if !w.exclusive(t, section, &[&db_key, &lin_key]) {
        return None;
    }
    if t.contains_key(&db_key) {
        let v = w.number(t, section, &db_key)?;
        return w.check(join(section, &db_key), AttenuationCoeff::from_db_per_km(v)).map(Some);
    }
    if t.contains_key(&lin_key) {
        let v = w.number(t, section, &lin_key)?;
        return w.check(join(section, &lin_key), AttenuationCoeff::per_km(v)).map(Some);
    }
    Some(None)
}

fn read_link(w: &mut Walker, t: &Table, mode: Validation, sweep: Option<&SweepParts>) -> Option<FiberLink> {
    w.unknown_keys("link", t, LINK_KEYS);
    let swept = sweep.map(|s| (s.0, s.1));
    // A swept quantity may be omitted; the sweep start stands in for it.
    let fallback = |v: SweepVariable| swept.filter(|s| s.0 == v).map(|s| s.1 * Abscissa::for_variable(v).to_canonical);

    let length = match w.number(t, "link", "length_km") {
        Some(v) => Some(v),
        None if t.contains_key("length_km") => None,
        None => fallback(SweepVariable::Length).or_else(|| {
            w.error("link.length_km", "missing key");
            None
        }),
    };
    let alpha = |w: &mut Walker, stem: &str, var: SweepVariable| match attenuation(w, t, "link", stem)? {
        Some(a) => Some(a),
        None => match fallback(var) {
            Some(v) => w.check(join("link", stem), AttenuationCoeff::per_km(v)),
            None => {
                w.error(format!("link.{stem}_db_per_km"), "missing key");
                None
            }
        },
    };
    let alpha_c = alpha(w, "alpha_c", SweepVariable::AlphaC);
    let alpha_q = alpha(w, "alpha_q", SweepVariable::AlphaQ);
    let h = match w.number(t, "link", "h_ij_per_m") {
        Some(v) => w.check("link.h_ij_per_m", CouplingCoeff::per_meter(v)),
        None if t.contains_key("h_ij_per_m") => None,
        None => match fallback(SweepVariable::CouplingCoeff) {
            Some(v) => w.check("link.h_ij_per_m", CouplingCoeff::per_km(v)),
            None => {
                w.error("link.h_ij_per_m", "missing key");
                None
            }
        },
    };
    let link = w.check("link.length_km", FiberLink::new(length?, alpha_c?, alpha_q?, h?))?;
    w.check("link", link.validate(mode))?;
    Some(link)
}

fn wavelength(w: &mut Walker, t: &Table, section: &str, thz_key: &str, nm_key: &str) -> Option<Wavelength> {
    if !w.exclusive(t, section, &[thz_key, nm_key]) {
        return None;
    }
    if t.contains_key(thz_key) {
        let v = w.number(t, section, thz_key)?;
        return w.check(join(section, thz_key), Wavelength::from_frequency_thz(v));
    }
    if t.contains_key(nm_key) {
        let v = w.number(t, section, nm_key)?;
        return w.check(join(section, nm_key), Wavelength::nm(v));
    }
    w.error(join(section, thz_key), format!("missing key (or {nm_key})"));
    None
}

fn read_plan(w: &mut Walker, t: &Table, mode: Validation, sweep: Option<&SweepParts>) -> Option<ChannelPlan> {
    w.unknown_keys("plan", t, PLAN_KEYS);
    let quantum = wavelength(w, t, "plan", "quantum_frequency_thz", "quantum_wavelength_nm");
    let spacing = match w.number(t, "plan", "grid_spacing_ghz") {
        Some(v) if v > 0.0 && v.is_finite() => Some(Some(v)),
        Some(v) => {
            w.error("plan.grid_spacing_ghz", format!("{v} must be positive"));
            None
        }
        None if t.contains_key("grid_spacing_ghz") => None,
        None => Some(None),
    };
    let power_swept = sweep.is_some_and(|s| s.0 == SweepVariable::LaunchPower);
    let channels = match t.get("channels") {
        Some(Value::Array(items)) => {
            let mut out = Some(Vec::with_capacity(items.len()));
            for (i, item) in items.iter().enumerate() {
                let section = format!("plan.channels[{i}]");
                let ch = match item {
                    Value::Table(ct) => read_channel(w, ct, &section, power_swept),
                    _ => {
                        w.error(&section, "expected an inline table");
                        None
                    }
                };
                match (ch, out.as_mut()) {
                    (Some(c), Some(v)) => v.push(c),
                    _ => out = None,
                }
            }
            out
        }
        Some(_) => {
            w.error("plan.channels", "expected an array of inline tables");
            None
        }
        None => Some(Vec::new()),
    };
    w.check("plan.channels", ChannelPlan::new(quantum?, channels?, spacing?, mode))
}

fn read_channel(w: &mut Walker, t: &Table, section: &str, power_swept: bool) -> Option<ClassicalChannel> {
    w.unknown_keys(section, t, CHANNEL_KEYS);
    let lambda = wavelength(w, t, section, "frequency_thz", "wavelength_nm");
    let power = if !w.exclusive(t, section, &["power_mw", "power_dbm"]) {
        None
    } else if t.contains_key("power_mw") {
        let v = w.number(t, section, "power_mw");
        v.and_then(|v| w.check(join(section, "power_mw"), Power::mw(v)))
    } else if t.contains_key("power_dbm") {
        let v = w.number(t, section, "power_dbm");
        v.and_then(|v| w.check(join(section, "power_dbm"), Power::from_dbm(v)))
    } else if power_swept {
        Some(Power::ZERO)
    } else {
        w.error(join(section, "power_mw"), "missing key (or power_dbm)");
        None
    };
    let direction = match w.string(t, section, "direction") {
        None if !t.contains_key("direction") => Some(Direction::CoPropagating),
        Some("co") => Some(Direction::CoPropagating),
        Some("counter") => Some(Direction::CounterPropagating),
        Some(other) => {
            w.error(join(section, "direction"), format!("unknown direction {other:?}; expected co or counter"));
            None
        }
        None => None,
    };
    let alpha_c = attenuation(w, t, section, "alpha_c");
    let mut ch = ClassicalChannel::new(lambda?, power?, direction?);
    ch.alpha_c = alpha_c?;
    Some(ch)
}

fn read_receiver(w: &mut Walker, t: &Table, wavelength: Wavelength) -> Option<QuantumReceiver> {
    w.unknown_keys("receiver", t, RECEIVER_KEYS);
    let mut rx = QuantumReceiver::with_defaults(wavelength);
    let mut ok = true;
    let mut set = |w: &mut Walker, key: &str, slot: &mut f64, scale: f64| match w.number(t, "receiver", key) {
        Some(v) => *slot = v * scale,
        None => ok &= !t.contains_key(key),
    };
    set(w, "detection_efficiency", &mut rx.det_efficiency, 1.0);
    set(w, "dark_count_prob", &mut rx.dark_count_prob, 1.0);
    set(w, "gate_width_ns", &mut rx.gate_width_s, 1e-9);
    set(w, "bandwidth_ghz", &mut rx.rx_bandwidth_ghz, 1.0);
    set(w, "misalignment_error", &mut rx.misalignment_error, 1.0);
    set(w, "mean_photon_number", &mut rx.mean_photon_number, 1.0);
    set(w, "ec_efficiency", &mut rx.ec_efficiency, 1.0);
    set(w, "protocol_factor", &mut rx.protocol_factor, 1.0);
    let mut calibrated = f64::NAN;
    set(w, "clicks_per_mw_per_nm", &mut calibrated, 1.0);
    if !calibrated.is_nan() {
        rx.click_model = ClickModel::Calibrated {
            clicks_per_mw_per_nm: calibrated,
        };
    }
    if !ok {
        return None;
    }
    w.check("receiver", rx.validate())?;
    Some(rx)
}

fn read_profile(w: &mut Walker, t: &Table, base_dir: Option<&Path>) -> (String, Option<RamanEfficiencyProfile>) {
    w.unknown_keys("profile", t, PROFILE_KEYS);
    if !w.exclusive(t, "profile", &["source", "constant_eta"]) {
        return (String::new(), None);
    }
    if t.contains_key("constant_eta") {
        let Some(eta) = w.number(t, "profile", "constant_eta") else {
            return (String::new(), None);
        };
        let profile = RamanEfficiency::per_km_nm(eta).and_then(|e| RamanEfficiencyProfile::flat(e, -200.0, 200.0));
        return (format!("constant:{eta:e}"), w.check("profile.constant_eta", profile));
    }
    let source = w.string(t, "profile", "source").unwrap_or("builtin:flat").to_string();
    let text = match source.as_str() {
        "builtin:flat" => FLAT_PROFILE.to_string(),
        "builtin:illustrative" => ILLUSTRATIVE_PROFILE.to_string(),
        path => {
            let full = match base_dir {
                Some(dir) => dir.join(path),
                None => PathBuf::from(path),
            };
            match std::fs::read_to_string(&full) {
                Ok(s) => s,
                Err(e) => {
                    w.error("profile.source", format!("cannot read {}: {e}", full.display()));
                    return (source, None);
                }
            }
        }
    };
    let profile = w.check("profile.source", load_profile(&text));
    (source, profile)
}

fn read_analysis(w: &mut Walker, t: &Table) -> AnalysisOptions {
    w.unknown_keys("analysis", t, ANALYSIS_KEYS);
    let mut peak = PeakSearch::default();
    if let Some(step) = w.number(t, "analysis", "peak_step_km") {
        if step > 0.0 && step.is_finite() {
            peak.step_km = step;
        } else {
            w.error("analysis.peak_step_km", format!("{step} must be positive"));
        }
    }
    match t.get("peak_range_km") {
        None => {}
        Some(Value::Array(a)) if a.len() == 2 => {
            let bounds: Vec<Option<f64>> = a
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Some(*x),
                    Value::Integer(i) => Some(*i as f64),
                    _ => None,
                })
                .collect();
            match (bounds[0], bounds[1]) {
                (Some(lo), Some(hi)) if lo >= 0.0 && lo < hi && hi.is_finite() => {
                    peak.lo_km = lo;
                    peak.hi_km = hi;
                }
                _ => w.error("analysis.peak_range_km", "expected [lo, hi] with 0 <= lo < hi"),
            }
        }
        Some(_) => w.error("analysis.peak_range_km", "expected a two-element array"),
    }
    let mut max_distance = None;
    if w.boolean(t, "analysis", "max_distance") == Some(true) {
        let mut search = DistanceSearch::default();
        if let Some(b) = w.number(t, "analysis", "distance_bracket_km") {
            if b > 1.0 && b.is_finite() {
                search.bracket_km = b;
            } else {
                w.error("analysis.distance_bracket_km", format!("{b} must exceed 1 km"));
            }
        }
        max_distance = Some(search);
    }
    AnalysisOptions { peak, max_distance }
}

/// Apply the physical validation of the owning modules at both sweep ends.
fn check_endpoints(w: &mut Walker, spec: &SweepSpec) {
    use icsrs_core::analysis::scenario_at;
    for (end, x) in [("sweep.from", spec.lo), ("sweep.to", spec.hi)] {
        let checked = scenario_at(&spec.scenario, spec.variable, x).and_then(|s| {
            s.link.validate(Validation::Standard)?;
            s.plan.noise_sources(&s.profile).map(|_| ())
        });
        w.check(end, checked);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[link]
length_km = 50
alpha_c_db_per_km = 0.22
alpha_q_db_per_km = 0.21
h_ij_per_m = 1e-6

[plan]
quantum_frequency_thz = 193.5
channels = [{ frequency_thz = 193.7, power_dbm = 0.0 }]

[sweep]
variable = "length"
from = 1
to = 100
points = 100
"#;

    fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        parse_config(text, "test", None, Strictness::Strict)
    }

    fn issues(text: &str) -> Vec<Issue> {
        match parse(text) {
            Err(ConfigError::Invalid(v)) => v,
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn minimal_document() {
        let c = parse(MINIMAL).unwrap();
        assert_eq!(c.sweep.points, 100);
        assert_eq!(c.scenario().plan.channels().len(), 1);
        assert_eq!(c.profile_source, "builtin:flat");
        assert_eq!(c.scenario().receiver.det_efficiency, 0.1);
    }

    #[test]
    fn negative_length_names_key() {
        let bad = MINIMAL.replace("length_km = 50", "length_km = -5");
        let v = issues(&bad);
        assert!(v.iter().any(|i| i.key == "link.length_km"), "{v:?}");
    }

    #[test]
    fn unknown_key_strict_and_lenient() {
        let bad = MINIMAL.replace("h_ij_per_m = 1e-6", "h_ij_per_m = 1e-6\ncolour = \"blue\"");
        assert!(issues(&bad).iter().any(|i| i.key == "link.colour"));
        let c = parse_config(&bad, "t", None, Strictness::Lenient).unwrap();
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn all_errors_collected() {
        let bad = MINIMAL
            .replace("alpha_q_db_per_km = 0.21", "alpha_q_db_per_km = \"high\"")
            .replace("points = 100", "points = 0")
            .replace("power_dbm = 0.0", "power_dbm = 0.0, direction = \"sideways\"");
        let keys: Vec<String> = issues(&bad).into_iter().map(|i| i.key).collect();
        for k in ["link.alpha_q_db_per_km", "sweep.points", "plan.channels[0].direction"] {
            assert!(keys.iter().any(|x| x == k), "{k} missing from {keys:?}");
        }
    }

    #[test]
    fn swept_quantity_may_be_omitted() {
        let text = MINIMAL.replace("length_km = 50\n", "");
        assert!(parse(&text).is_ok());
        let text = MINIMAL.replace("h_ij_per_m = 1e-6\n", "");
        assert!(issues(&text).iter().any(|i| i.key == "link.h_ij_per_m"));
    }

    #[test]
    fn conflicting_units_rejected() {
        let bad = MINIMAL.replace("alpha_c_db_per_km = 0.22", "alpha_c_db_per_km = 0.22\nalpha_c_per_km = 0.05");
        assert!(issues(&bad).iter().any(|i| i.key == "link.alpha_c_per_km"));
    }

    #[test]
    fn log_sweep_from_zero_rejected() {
        let bad = MINIMAL.replace("from = 1", "from = 0\nspacing = \"log\"");
        assert!(issues(&bad).iter().any(|i| i.key == "sweep"));
    }

    #[test]
    fn sweep_endpoint_validated() {
        let bad = MINIMAL.replace("from = 1", "from = -10");
        assert!(issues(&bad).iter().any(|i| i.key == "sweep.from"));
    }

    #[test]
    fn syntax_errors_reported() {
        assert!(matches!(parse("[link\n"), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn coupling_sweep_converted_to_canonical_units() {
        let text = MINIMAL
            .replace("variable = \"length\"", "variable = \"h_ij\"")
            .replace("from = 1", "from = 1e-8")
            .replace("to = 100", "to = 1e-5")
            .replace("points = 100", "points = 4\nspacing = \"log\"");
        let c = parse(&text).unwrap();
        assert!((c.sweep.lo - 1e-5).abs() < 1e-20);
        assert_eq!(c.abscissa.column, "h_ij_per_m");
    }
}
