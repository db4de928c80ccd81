use alloc::boxed::Box;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors produced anywhere in the model.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("position z = {z} km outside span [0, {length}] km")]
    PositionOutOfRange { z: f64, length: f64 },

    #[error("quadrature did not converge on [{lo}, {hi}] after {depth} bisections")]
    QuadratureDiverged { lo: f64, hi: f64, depth: u32 },

    #[error("integrand is not finite at z = {z}")]
    NonFiniteIntegrand { z: f64 },

    #[error("link is dead: single-photon yield is zero")]
    DeadLink,

    #[error("no distance in (0, {bracket_km}] km yields a positive key rate")]
    NoSecureDistance { bracket_km: f64 },

    #[error("curve maximum lies on the search boundary at {location_km} km")]
    PeakAtBoundary { location_km: f64 },

    #[error("curve is flat; no peak to locate")]
    FlatCurve,

    #[error("curve is not unimodal (rises again near {location_km} km)")]
    NotUnimodal { location_km: f64 },

    #[error("forward ICSRS peak {icsrs_km} km is not beyond forward SRS peak {srs_km} km")]
    PeakOrdering { icsrs_km: f64, srs_km: f64 },

    #[error("line {line}: {kind}")]
    Profile { line: usize, kind: ProfileErrorKind },

    #[error("detuning {detuning_nm} nm outside Raman profile [{lo_nm}, {hi_nm}] nm")]
    DetuningOutOfRange {
        detuning_nm: f64,
        lo_nm: f64,
        hi_nm: f64,
    },

    #[error("duplicate classical wavelength {wavelength_nm} nm")]
    DuplicateChannel { wavelength_nm: f64 },

    #[error("classical channel sits on the quantum wavelength {wavelength_nm} nm")]
    ChannelOnQuantumWavelength { wavelength_nm: f64 },

    #[error("channels carry per-channel attenuation; factored aggregation needs a shared value")]
    NonUniformAttenuation,

    #[error("channel {index}: {source}")]
    Channel { index: usize, source: Box<Error> },

    #[error("sweep point {abscissa}: {source}")]
    SweepPoint { abscissa: f64, source: Box<Error> },
}

/// What went wrong on one line of a Raman profile table.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileErrorKind {
    #[error("table is empty")]
    Empty,
    #[error("expected two numeric columns")]
    Malformed,
    #[error("detuning not strictly increasing")]
    NotIncreasing,
    #[error("negative Raman efficiency")]
    NegativeEta,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    pub(crate) fn for_channel(self, index: usize) -> Self {
        Error::Channel {
            index,
            source: Box::new(self),
        }
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, value, "must be finite"))
    }
}

pub(crate) fn require_nonnegative(name: &'static str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, value, "must be nonnegative"))
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, value, "must be positive"))
    }
}

pub(crate) fn require_probability(name: &'static str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::invalid(name, value, "must lie in [0, 1]"))
    }
}
