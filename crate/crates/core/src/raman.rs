//! Intercore and single-core spontaneous Raman scattering noise.
//!
//! A classical signal in core *i* produces noise at the quantum wavelength in
//! the adjacent core *j* through two paths, each contributing half of the
//! total:
//!
//! 1. crosstalk first, then Raman scattering of the crosstalk in core *j*;
//! 2. Raman scattering first in core *i*, then crosstalk of the scattered light.
//!
//! Forward noise (co-propagating with the classical signal) is collected at
//! `z = L`, backward noise at `z = 0`. Both reduce to a distance factor times
//! `η·P₀`:
//!
//! ```text
//! P_fwd = η P₀ G(L),   G = ∫₀ᴸ (1 − e^{−2hz}) e^{−α_c z} e^{−α_q (L−z)} dz
//! P_bwd = η P₀ F(L),   F = ∫₀ᴸ (1 − e^{−2hz}) e^{−(α_c+α_q) z} dz
//! ```
//!
//! The closed forms are computed as divided differences of `x ↦ e^{xL}`
//! (`G = 2h·e[−α_c, −α_c−2h, −α_q]`, `F = 2h·e[0, −s, −s−2h]`), which is
//! algebraically the textbook expression but stays accurate at coinciding
//! attenuations and at vanishing coupling.
//!
//! [`quadrature_oracle`] integrates the pointwise per-segment expressions from
//! [`crate::fiber`] instead and is the reference every closed form is tested
//! against.

use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::fiber::{classical_power_at, icxt_power_at, icxt_transfer, FiberLink};
use crate::math::{exp, exp_dd1, exp_dd2, log10};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::units::{AttenuationCoeff, Power};

/// Raman efficiency η in (km·nm)⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RamanEfficiency(f64);

impl RamanEfficiency {
    pub const ZERO: RamanEfficiency = RamanEfficiency(0.0);

    pub fn per_km_nm(value: f64) -> Result<Self> {
        require_nonnegative("Raman efficiency", value).map(Self)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Noise power spectral density at the quantum wavelength, mW/nm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct NoiseDensity(f64);

impl NoiseDensity {
    pub const ZERO: NoiseDensity = NoiseDensity(0.0);

    pub fn mw_per_nm(value: f64) -> Result<Self> {
        require_nonnegative("noise density (mW/nm)", value).map(Self)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `10·log10` of the density in mW/nm; `-inf` for zero.
    pub fn dbm_per_nm(self) -> f64 {
        10.0 * log10(self.0)
    }
}

impl core::ops::Add for NoiseDensity {
    type Output = NoiseDensity;

    fn add(self, rhs: Self) -> Self {
        NoiseDensity(self.0 + rhs.0)
    }
}

impl core::iter::Sum for NoiseDensity {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(NoiseDensity::ZERO, |a, b| a + b)
    }
}

/// The four two-step ICSRS generation paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcsrsProcess {
    /// Crosstalk into core *j*, then forward Raman scattering there.
    IcxtThenForwardSrs,
    /// Forward Raman scattering in core *i*, then crosstalk into core *j*.
    ForwardSrsThenIcxt,
    /// Crosstalk into core *j*, then backward Raman scattering there.
    IcxtThenBackwardSrs,
    /// Backward Raman scattering in core *i*, then crosstalk into core *j*.
    BackwardSrsThenIcxt,
}

/// Anything the quadrature oracle can integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleProcess {
    Icsrs(IcsrsProcess),
    ForwardSrs,
    BackwardSrs,
}

pub(crate) fn g_over(alpha_c: f64, alpha_q: f64, h: f64, length: f64) -> f64 {
    if h == 0.0 || length == 0.0 {
        return 0.0;
    }
    2.0 * h * exp_dd2(-alpha_c, -alpha_c - 2.0 * h, -alpha_q, length)
}

pub(crate) fn f_over(alpha_c: f64, alpha_q: f64, h: f64, length: f64) -> f64 {
    if h == 0.0 || length == 0.0 {
        return 0.0;
    }
    let s = alpha_c + alpha_q;
    2.0 * h * exp_dd2(0.0, -s, -s - 2.0 * h, length)
}

pub(crate) fn forward_srs_over(alpha_c: f64, alpha_q: f64, length: f64) -> f64 {
    if length == 0.0 {
        return 0.0;
    }
    exp_dd1(-alpha_c, -alpha_q, length)
}

pub(crate) fn backward_srs_over(alpha_c: f64, alpha_q: f64, length: f64) -> f64 {
    if length == 0.0 {
        return 0.0;
    }
    exp_dd1(0.0, -(alpha_c + alpha_q), length)
}

/// Forward distance factor G in km.
///
/// `e^{−α_q L}·{[e^{(α_q−α_c)L} − 1]/(α_q−α_c) − [e^{(α_q−α_c−2h)L} − 1]/(α_q−α_c−2h)}`,
/// continuous through the removable singularities.
pub fn g_factor(link: &FiberLink) -> f64 {
    g_over(
        link.alpha_c().value(),
        link.alpha_q().value(),
        link.h_ij().value(),
        link.length_km(),
    )
}

/// Backward distance factor F in km.
///
/// `[e^{−(s+2h)L} − 1]/(s+2h) − [e^{−sL} − 1]/s` with `s = α_q + α_c`; bounded
/// above by `1/s − 1/(s+2h)`.
pub fn f_factor(link: &FiberLink) -> Result<f64> {
    let (ac, aq, h) = (link.alpha_c().value(), link.alpha_q().value(), link.h_ij().value());
    if ac + aq + 2.0 * h <= 0.0 {
        return Err(Error::invalid(
            "alpha_q + alpha_c + 2 h_ij",
            ac + aq + 2.0 * h,
            "must be positive for backward noise",
        ));
    }
    Ok(f_over(ac, aq, h, link.length_km()))
}

/// Large-L limit of [`f_factor`].
pub fn f_factor_saturation(link: &FiberLink) -> Result<f64> {
    let s = link.alpha_c().value() + link.alpha_q().value();
    let h = link.h_ij().value();
    if h == 0.0 {
        return Ok(0.0);
    }
    require_positive("alpha_q + alpha_c", s)?;
    Ok(2.0 * h / (s * (s + 2.0 * h)))
}

/// Total forward ICSRS density at the far end of core *j*.
pub fn forward_icsrs(link: &FiberLink, p0: Power, eta: RamanEfficiency) -> NoiseDensity {
    NoiseDensity(eta.value() * p0.value() * g_factor(link))
}

/// Total backward ICSRS density at the near end of core *j*.
pub fn backward_icsrs(link: &FiberLink, p0: Power, eta: RamanEfficiency) -> Result<NoiseDensity> {
    Ok(NoiseDensity(eta.value() * p0.value() * f_factor(link)?))
}

/// Closed-form contribution of one generation path (half the directional total).
pub fn process_power(
    process: IcsrsProcess,
    link: &FiberLink,
    p0: Power,
    eta: RamanEfficiency,
) -> Result<NoiseDensity> {
    let factor = match process {
        IcsrsProcess::IcxtThenForwardSrs | IcsrsProcess::ForwardSrsThenIcxt => g_factor(link),
        IcsrsProcess::IcxtThenBackwardSrs | IcsrsProcess::BackwardSrsThenIcxt => f_factor(link)?,
    };
    Ok(NoiseDensity(eta.value() * p0.value() * factor / 2.0))
}

/// Forward SRS in a single-core fiber where classical and quantum channels share the core.
///
/// `η P₀ [e^{−α_c L} − e^{−α_q L}] / (α_q − α_c)`, tending to `η P₀ L e^{−αL}`
/// as the attenuations meet.
pub fn forward_srs_singlecore(
    alpha_c: AttenuationCoeff,
    alpha_q: AttenuationCoeff,
    length_km: f64,
    p0: Power,
    eta: RamanEfficiency,
) -> Result<NoiseDensity> {
    require_positive("fiber length (km)", length_km)?;
    let factor = forward_srs_over(alpha_c.value(), alpha_q.value(), length_km);
    Ok(NoiseDensity(eta.value() * p0.value() * factor))
}

/// Backward SRS in a single-core fiber: `η P₀ [1 − e^{−(α_q+α_c)L}] / (α_q+α_c)`.
pub fn backward_srs_singlecore(
    alpha_c: AttenuationCoeff,
    alpha_q: AttenuationCoeff,
    length_km: f64,
    p0: Power,
    eta: RamanEfficiency,
) -> Result<NoiseDensity> {
    require_positive("fiber length (km)", length_km)?;
    require_positive("alpha_q + alpha_c", alpha_c.value() + alpha_q.value())?;
    let factor = backward_srs_over(alpha_c.value(), alpha_q.value(), length_km);
    Ok(NoiseDensity(eta.value() * p0.value() * factor))
}

/// Numerically integrate the per-segment noise generated along the span.
///
/// Integrands are built from the pointwise models in [`crate::fiber`]:
/// Raman scattering `η·P(z)·dz` of the relevant source power, times the
/// crosstalk transfer where the path needs it, times the quantum-channel loss
/// from the scattering point to the collection end.
pub fn quadrature_oracle(
    process: OracleProcess,
    link: &FiberLink,
    p0: Power,
    eta: RamanEfficiency,
    options: QuadratureOptions,
) -> Result<NoiseDensity> {
    let length = link.length_km();
    let alpha_q = link.alpha_q().value();
    let alpha_c = link.alpha_c().value();
    let eta = eta.value();
    let to_far_end = |z: f64| exp(-alpha_q * (length - z));
    let to_near_end = |z: f64| exp(-alpha_q * z);

    let integrand = |z: f64| -> Result<f64> {
        Ok(match process {
            OracleProcess::Icsrs(IcsrsProcess::IcxtThenForwardSrs) => {
                eta * icxt_power_at(link, p0, z)?.value() * to_far_end(z)
            }
            OracleProcess::Icsrs(IcsrsProcess::ForwardSrsThenIcxt) => {
                eta * classical_power_at(link, p0, z)?.value() * icxt_transfer(link, z)? * to_far_end(z)
            }
            OracleProcess::Icsrs(IcsrsProcess::IcxtThenBackwardSrs) => {
                eta * icxt_power_at(link, p0, z)?.value() * to_near_end(z)
            }
            OracleProcess::Icsrs(IcsrsProcess::BackwardSrsThenIcxt) => {
                eta * classical_power_at(link, p0, z)?.value() * icxt_transfer(link, z)? * to_near_end(z)
            }
            OracleProcess::ForwardSrs => eta * p0.value() * exp(-alpha_c * z) * to_far_end(z),
            OracleProcess::BackwardSrs => eta * p0.value() * exp(-alpha_c * z) * to_near_end(z),
        })
    };
    let value = integrate(integrand, 0.0, length, options)?;
    NoiseDensity::mw_per_nm(value.max(0.0))
}
