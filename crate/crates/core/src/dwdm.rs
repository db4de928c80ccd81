//! DWDM launch plans, the Raman-efficiency spectrum and multi-channel noise
//! aggregation.

use alloc::vec::Vec;

use crate::error::{Error, ProfileErrorKind, Result};
use crate::fiber::{FiberLink, Validation};
use crate::qkd::NoiseSource;
use crate::raman::{backward_icsrs, f_factor, forward_icsrs, g_factor, NoiseDensity, RamanEfficiency};
use crate::units::{AttenuationCoeff, Power, Wavelength};

/// Propagation direction of a classical channel relative to the quantum signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    CoPropagating,
    CounterPropagating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalChannel {
    pub wavelength: Wavelength,
    pub launch_power: Power,
    pub direction: Direction,
    /// Per-channel α_c; `None` uses the link's value.
    pub alpha_c: Option<AttenuationCoeff>,
}

impl ClassicalChannel {
    pub fn new(wavelength: Wavelength, launch_power: Power, direction: Direction) -> Self {
        Self {
            wavelength,
            launch_power,
            direction,
            alpha_c: None,
        }
    }
}

/// η as a function of signed detuning `λ_q − λ_c`, piecewise linear between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanEfficiencyProfile {
    nodes: Vec<(f64, f64)>,
}

impl RamanEfficiencyProfile {
    /// Nodes are `(detuning_nm, eta_per_km_nm)`; detunings strictly increasing, η ≥ 0.
    pub fn from_nodes(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Profile { line: 0, kind: ProfileErrorKind::Empty });
        }
        for (i, &(d, eta)) in nodes.iter().enumerate() {
            if !d.is_finite() || !eta.is_finite() {
                return Err(Error::Profile { line: i + 1, kind: ProfileErrorKind::Malformed });
            }
            if eta < 0.0 {
                return Err(Error::Profile { line: i + 1, kind: ProfileErrorKind::NegativeEta });
            }
            if i > 0 && d <= nodes[i - 1].0 {
                return Err(Error::Profile { line: i + 1, kind: ProfileErrorKind::NotIncreasing });
            }
        }
        Ok(Self { nodes })
    }

    /// Constant η over `[lo_nm, hi_nm]`.
    pub fn flat(eta: RamanEfficiency, lo_nm: f64, hi_nm: f64) -> Result<Self> {
        Self::from_nodes(alloc::vec![(lo_nm, eta.value()), (hi_nm, eta.value())])
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn detuning_range(&self) -> (f64, f64) {
        (self.nodes[0].0, self.nodes[self.nodes.len() - 1].0)
    }

    pub fn eta_at(&self, detuning_nm: f64) -> Result<RamanEfficiency> {
        let (lo, hi) = self.detuning_range();
        if !(lo..=hi).contains(&detuning_nm) {
            return Err(Error::DetuningOutOfRange {
                detuning_nm,
                lo_nm: lo,
                hi_nm: hi,
            });
        }
        // first node with detuning ≥ target
        let k = self.nodes.partition_point(|&(d, _)| d < detuning_nm);
        let (d1, e1) = self.nodes[k];
        if d1 == detuning_nm || k == 0 {
            return RamanEfficiency::per_km_nm(e1);
        }
        let (d0, e0) = self.nodes[k - 1];
        let t = (detuning_nm - d0) / (d1 - d0);
        RamanEfficiency::per_km_nm(e0 + t * (e1 - e0))
    }
}

/// η between a classical channel at `lambda_c` and the quantum channel at `lambda_q`.
pub fn eta_lookup(
    profile: &RamanEfficiencyProfile,
    lambda_c: Wavelength,
    lambda_q: Wavelength,
) -> Result<RamanEfficiency> {
    profile.eta_at(lambda_q.value() - lambda_c.value())
}

/// Parse a two-column `detuning_nm eta` table.
///
/// Columns may be separated by whitespace or a comma; `#` starts a comment;
/// a single non-numeric header line before the first data row is allowed.
/// Errors carry 1-based line numbers.
pub fn load_profile(source: &str) -> Result<RamanEfficiencyProfile> {
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    let mut header_allowed = true;
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let parsed = match fields.as_slice() {
            [d, e] => d.parse::<f64>().ok().zip(e.parse::<f64>().ok()),
            _ => None,
        };
        let Some((d, eta)) = parsed else {
            if header_allowed && nodes.is_empty() {
                header_allowed = false;
                continue;
            }
            return Err(Error::Profile { line, kind: ProfileErrorKind::Malformed });
        };
        header_allowed = false;
        if !d.is_finite() || !eta.is_finite() {
            return Err(Error::Profile { line, kind: ProfileErrorKind::Malformed });
        }
        if eta < 0.0 {
            return Err(Error::Profile { line, kind: ProfileErrorKind::NegativeEta });
        }
        if let Some(&(prev, _)) = nodes.last() {
            if d <= prev {
                return Err(Error::Profile { line, kind: ProfileErrorKind::NotIncreasing });
            }
        }
        nodes.push((d, eta));
    }
    if nodes.is_empty() {
        return Err(Error::Profile { line: 0, kind: ProfileErrorKind::Empty });
    }
    RamanEfficiencyProfile::from_nodes(nodes)
}

/// The quantum channel and the classical channels sharing the fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlan {
    quantum_wavelength: Wavelength,
    channels: Vec<ClassicalChannel>,
    grid_spacing_ghz: Option<f64>,
}

impl ChannelPlan {
    pub fn new(
        quantum_wavelength: Wavelength,
        channels: Vec<ClassicalChannel>,
        grid_spacing_ghz: Option<f64>,
        mode: Validation,
    ) -> Result<Self> {
        for (i, ch) in channels.iter().enumerate() {
            if ch.wavelength == quantum_wavelength {
                return Err(Error::ChannelOnQuantumWavelength {
                    wavelength_nm: ch.wavelength.value(),
                }
                .for_channel(i));
            }
            if channels[..i].iter().any(|o| o.wavelength == ch.wavelength) {
                return Err(Error::DuplicateChannel {
                    wavelength_nm: ch.wavelength.value(),
                }
                .for_channel(i));
            }
            if mode == Validation::CBand && !ch.wavelength.in_c_band() {
                return Err(Error::invalid("channel wavelength (nm)", ch.wavelength.value(), "outside C-band")
                    .for_channel(i));
            }
        }
        if mode == Validation::CBand && !quantum_wavelength.in_c_band() {
            return Err(Error::invalid(
                "quantum wavelength (nm)",
                quantum_wavelength.value(),
                "outside C-band",
            ));
        }
        Ok(Self {
            quantum_wavelength,
            channels,
            grid_spacing_ghz,
        })
    }

    pub fn quantum_wavelength(&self) -> Wavelength {
        self.quantum_wavelength
    }

    pub fn channels(&self) -> &[ClassicalChannel] {
        &self.channels
    }

    pub fn grid_spacing_ghz(&self) -> Option<f64> {
        self.grid_spacing_ghz
    }

    /// Same plan with every channel launched at `power`.
    pub fn with_uniform_power(&self, power: Power) -> Self {
        let mut plan = self.clone();
        for ch in &mut plan.channels {
            ch.launch_power = power;
        }
        plan
    }

    /// Same quantum channel, channels of `self` followed by those of `other`.
    pub fn merged(&self, other: &ChannelPlan, mode: Validation) -> Result<Self> {
        let mut channels = self.channels.clone();
        channels.extend_from_slice(&other.channels);
        Self::new(self.quantum_wavelength, channels, self.grid_spacing_ghz, mode)
    }

    /// Each channel as a direction-free noise source, η taken from `profile`.
    pub fn noise_sources(&self, profile: &RamanEfficiencyProfile) -> Result<Vec<NoiseSource>> {
        self.channels
            .iter()
            .enumerate()
            .map(|(i, ch)| {
                Ok(NoiseSource {
                    power: ch.launch_power,
                    eta: eta_lookup(profile, ch.wavelength, self.quantum_wavelength).map_err(|e| e.for_channel(i))?,
                    alpha_c: ch.alpha_c,
                })
            })
            .collect()
    }
}

/// Total ICSRS density in the quantum channel: forward noise from
/// co-propagating channels plus backward noise from counter-propagating ones.
pub fn aggregate_icsrs(
    plan: &ChannelPlan,
    link: &FiberLink,
    profile: &RamanEfficiencyProfile,
) -> Result<NoiseDensity> {
    let mut forward = NoiseDensity::ZERO;
    let mut backward = NoiseDensity::ZERO;
    for (i, ch) in plan.channels.iter().enumerate() {
        let eta = eta_lookup(profile, ch.wavelength, plan.quantum_wavelength).map_err(|e| e.for_channel(i))?;
        let l = match ch.alpha_c {
            Some(a) => link.with_alpha_c(a),
            None => *link,
        };
        match ch.direction {
            Direction::CoPropagating => forward = forward + forward_icsrs(&l, ch.launch_power, eta),
            Direction::CounterPropagating => {
                backward = backward + backward_icsrs(&l, ch.launch_power, eta).map_err(|e| e.for_channel(i))?
            }
        }
    }
    Ok(forward + backward)
}

/// Factored form `G·Σ ηⁿP₀ⁿ + F·Σ ηᵐP₀ᵐ`; requires a shared α_c.
pub fn aggregate_icsrs_factored(
    plan: &ChannelPlan,
    link: &FiberLink,
    profile: &RamanEfficiencyProfile,
) -> Result<NoiseDensity> {
    if plan.channels.iter().any(|c| c.alpha_c.is_some()) {
        return Err(Error::NonUniformAttenuation);
    }
    let mut co = 0.0;
    let mut counter = 0.0;
    for (i, ch) in plan.channels.iter().enumerate() {
        let eta = eta_lookup(profile, ch.wavelength, plan.quantum_wavelength).map_err(|e| e.for_channel(i))?;
        let weight = eta.value() * ch.launch_power.value();
        match ch.direction {
            Direction::CoPropagating => co += weight,
            Direction::CounterPropagating => counter += weight,
        }
    }
    let backward = if counter > 0.0 { f_factor(link)? * counter } else { 0.0 };
    NoiseDensity::mw_per_nm(g_factor(link) * co + backward)
}
