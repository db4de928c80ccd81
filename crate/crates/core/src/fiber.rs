//! Power evolution along one multicore-fiber span.
//!
//! A classical signal launched into core *i* with power `P₀` leaks into the
//! adjacent core *j* through the averaged coupled-power model:
//!
//! ```text
//! P_CS(z)   = P₀ e^{−h z} cosh(h z) e^{−α_c z}
//! P_ICXT(z) = P₀ e^{−h z} sinh(h z) e^{−α_c z}
//! ```
//!
//! Positions are validated against the span length, never clamped.

use crate::error::{require_positive, Error, Result};
use crate::math::{cosh, exp, sinh, tanh};
use crate::units::{AttenuationCoeff, CouplingCoeff, Power};

/// C-band sanity window for linear attenuation, km⁻¹.
pub const C_BAND_ATTENUATION: (f64, f64) = (0.03, 0.12);

/// How strictly physical parameters are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    /// Only the hard invariants (finite, nonnegative, positive length).
    #[default]
    Standard,
    /// Additionally require C-band attenuation values and wavelengths.
    CBand,
}

/// One MCF span and the interfering core pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberLink {
    length_km: f64,
    alpha_c: AttenuationCoeff,
    alpha_q: AttenuationCoeff,
    h_ij: CouplingCoeff,
}

impl FiberLink {
    pub fn new(
        length_km: f64,
        alpha_c: AttenuationCoeff,
        alpha_q: AttenuationCoeff,
        h_ij: CouplingCoeff,
    ) -> Result<Self> {
        require_positive("fiber length (km)", length_km)?;
        Ok(Self {
            length_km,
            alpha_c,
            alpha_q,
            h_ij,
        })
    }

    pub fn validate(&self, mode: Validation) -> Result<()> {
        if mode == Validation::CBand {
            let (lo, hi) = C_BAND_ATTENUATION;
            for (name, a) in [("alpha_c (km⁻¹)", self.alpha_c), ("alpha_q (km⁻¹)", self.alpha_q)] {
                if !(lo..=hi).contains(&a.value()) {
                    return Err(Error::invalid(name, a.value(), "outside C-band range [0.03, 0.12] km⁻¹"));
                }
            }
        }
        Ok(())
    }

    pub fn length_km(&self) -> f64 {
        self.length_km
    }

    pub fn alpha_c(&self) -> AttenuationCoeff {
        self.alpha_c
    }

    pub fn alpha_q(&self) -> AttenuationCoeff {
        self.alpha_q
    }

    pub fn h_ij(&self) -> CouplingCoeff {
        self.h_ij
    }

    pub fn with_length(self, length_km: f64) -> Result<Self> {
        Self::new(length_km, self.alpha_c, self.alpha_q, self.h_ij)
    }

    pub fn with_alpha_c(self, alpha_c: AttenuationCoeff) -> Self {
        Self { alpha_c, ..self }
    }

    pub fn with_alpha_q(self, alpha_q: AttenuationCoeff) -> Self {
        Self { alpha_q, ..self }
    }

    pub fn with_h_ij(self, h_ij: CouplingCoeff) -> Self {
        Self { h_ij, ..self }
    }

    fn check_position(&self, z: f64) -> Result<()> {
        if (0.0..=self.length_km).contains(&z) {
            Ok(())
        } else {
            Err(Error::PositionOutOfRange {
                z,
                length: self.length_km,
            })
        }
    }
}

/// Classical-signal power remaining in the launch core at `z`.
pub fn classical_power_at(link: &FiberLink, p0: Power, z: f64) -> Result<Power> {
    link.check_position(z)?;
    let hz = link.h_ij.value() * z;
    let value = p0.value() * exp(-hz) * cosh(hz) * exp(-link.alpha_c.value() * z);
    Power::mw(value)
}

/// Crosstalk power coupled into the adjacent core at `z`.
pub fn icxt_power_at(link: &FiberLink, p0: Power, z: f64) -> Result<Power> {
    link.check_position(z)?;
    let hz = link.h_ij.value() * z;
    let value = p0.value() * exp(-hz) * sinh(hz) * exp(-link.alpha_c.value() * z);
    Power::mw(value)
}

/// Fraction of power generated in core *i* at `z` that appears in core *j*: `tanh(h z)`.
pub fn icxt_transfer(link: &FiberLink, z: f64) -> Result<f64> {
    link.check_position(z)?;
    Ok(tanh(link.h_ij.value() * z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn link(alpha_c: f64, h: f64, length: f64) -> FiberLink {
        FiberLink::new(
            length,
            AttenuationCoeff::per_km(alpha_c).unwrap(),
            AttenuationCoeff::per_km(0.048).unwrap(),
            CouplingCoeff::per_km(h).unwrap(),
        )
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    const P1: Power = Power::ZERO;

    fn mw(v: f64) -> Power {
        Power::mw(v).unwrap()
    }

    #[test]
    fn classical_power_examples() {
        let l = link(0.050_657, 1e-3, 50.0);
        assert_eq!(classical_power_at(&l, mw(2.5), 0.0).unwrap().value(), 2.5);
        let v = classical_power_at(&l, mw(1.0), 50.0).unwrap().value();
        assert!(rel(v, 0.075_652_823_179_152_48) < 1e-13);

        let uncoupled = link(0.05, 0.0, 30.0);
        let v = classical_power_at(&uncoupled, mw(1.0), 30.0).unwrap().value();
        assert!(rel(v, exp(-0.05 * 30.0)) < 1e-15);
    }

    #[test]
    fn icxt_power_examples() {
        let l = link(0.050_657, 1e-3, 50.0);
        assert_eq!(icxt_power_at(&l, mw(1.0), 0.0).unwrap().value(), 0.0);
        let v = icxt_power_at(&l, mw(1.0), 50.0).unwrap().value();
        assert!(rel(v, 0.003_779_492_107_006_293) < 1e-13);
        let uncoupled = link(0.05, 0.0, 30.0);
        for z in [0.0, 1.0, 15.0, 30.0] {
            assert_eq!(icxt_power_at(&uncoupled, mw(1.0), z).unwrap().value(), 0.0);
        }
        assert_eq!(icxt_power_at(&l, P1, 10.0).unwrap().value(), 0.0);
    }

    #[test]
    fn transfer_examples() {
        let l = link(0.05, 1e-3, 50.0);
        assert_eq!(icxt_transfer(&l, 0.0).unwrap(), 0.0);
        assert!(rel(icxt_transfer(&l, 50.0).unwrap(), 0.049_958_374_957_879_97) < 1e-14);

        let strong = link(0.05, 1.0, 40.0);
        let mut prev = 0.0;
        for z in [1.0, 2.0, 5.0, 10.0, 18.0] {
            let t = icxt_transfer(&strong, z).unwrap();
            assert!(t > prev && t <= 1.0);
            prev = t;
        }
        assert!(1.0 - prev < 1e-14);
    }

    #[test]
    fn positions_outside_span_rejected() {
        let l = link(0.05, 1e-3, 10.0);
        assert!(matches!(classical_power_at(&l, mw(1.0), -1e-9), Err(Error::PositionOutOfRange { .. })));
        assert!(matches!(icxt_power_at(&l, mw(1.0), 10.0 + 1e-9), Err(Error::PositionOutOfRange { .. })));
        assert!(icxt_transfer(&l, f64::NAN).is_err());
    }

    #[test]
    fn link_validation() {
        assert!(FiberLink::new(0.0, AttenuationCoeff::per_km(0.05).unwrap(), AttenuationCoeff::per_km(0.05).unwrap(), CouplingCoeff::per_km(0.0).unwrap()).is_err());
        let l = link(0.2, 1e-3, 10.0);
        assert!(l.validate(Validation::Standard).is_ok());
        assert!(l.validate(Validation::CBand).is_err());
        assert!(link(0.05, 1e-3, 10.0).validate(Validation::CBand).is_ok());
    }

    #[test]
    fn icxt_grows_with_coupling_from_zero() {
        // finite-difference derivative in h at h = 0 is positive
        let dh = 1e-7;
        let base = icxt_power_at(&link(0.05, 0.0, 40.0), mw(1.0), 20.0).unwrap().value();
        let bumped = icxt_power_at(&link(0.05, dh, 40.0), mw(1.0), 20.0).unwrap().value();
        assert!((bumped - base) / dh > 0.0);
    }

    proptest! {
        #[test]
        fn energy_split(alpha in 0.0f64..0.3, h in 0.0f64..0.5, frac in 0.0f64..=1.0, len in 0.1f64..200.0) {
            let l = link(alpha, h, len);
            let z = frac * len;
            let cs = classical_power_at(&l, mw(1.0), z).unwrap().value();
            let xt = icxt_power_at(&l, mw(1.0), z).unwrap().value();
            let expect = exp(-alpha * z);
            prop_assert!(((cs + xt) - expect).abs() <= 1e-12 * expect);
            prop_assert!(xt <= cs * (1.0 + 1e-14));
            prop_assert!(cs <= 1.0);
        }

        #[test]
        fn decreasing_in_alpha(a in 0.0f64..0.2, da in 1e-4f64..0.1, h in 1e-6f64..0.1, z in 0.5f64..100.0) {
            let lo = link(a, h, 100.0);
            let hi = link(a + da, h, 100.0);
            prop_assert!(classical_power_at(&hi, mw(1.0), z).unwrap() < classical_power_at(&lo, mw(1.0), z).unwrap());
            prop_assert!(icxt_power_at(&hi, mw(1.0), z).unwrap() < icxt_power_at(&lo, mw(1.0), z).unwrap());
        }
    }
}
