//! Unit-safe physical quantities.
//!
//! Canonical internal units: km, km⁻¹ (linear, power), mW, nm. Per-meter and
//! dB-scale inputs are converted at construction.

use core::f64::consts::LN_10;

use crate::error::{require_finite, require_nonnegative, require_positive, Error, Result};
use crate::math::{log10, pow};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Planck constant, J·s (exact, SI 2019).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Accepted wavelength window in nm (O-band through U-band).
pub const WAVELENGTH_RANGE_NM: (f64, f64) = (1260.0, 1675.0);

/// C-band window in nm.
pub const C_BAND_NM: (f64, f64) = (1530.0, 1565.0);

/// Linear power attenuation coefficient in km⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AttenuationCoeff(f64);

impl AttenuationCoeff {
    pub fn per_km(value: f64) -> Result<Self> {
        require_nonnegative("attenuation (km⁻¹)", value).map(Self)
    }

    pub fn from_db_per_km(value: f64) -> Result<Self> {
        db_per_km_to_linear(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn db_per_km(self) -> f64 {
        self.0 * 10.0 / LN_10
    }
}

/// Convert a dB/km attenuation into linear km⁻¹: `a · ln(10) / 10`.
pub fn db_per_km_to_linear(db_per_km: f64) -> Result<AttenuationCoeff> {
    require_nonnegative("attenuation (dB/km)", db_per_km)?;
    Ok(AttenuationCoeff(db_per_km * LN_10 / 10.0))
}

/// Intercore power coupling coefficient h_ij in km⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CouplingCoeff(f64);

impl CouplingCoeff {
    pub fn per_km(value: f64) -> Result<Self> {
        require_nonnegative("coupling coefficient (km⁻¹)", value).map(Self)
    }

    /// Per-meter values (as usually quoted for MCF) are scaled by exactly 1000.
    pub fn per_meter(value: f64) -> Result<Self> {
        require_nonnegative("coupling coefficient (m⁻¹)", value)?;
        Ok(Self(value * 1000.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn per_meter_value(self) -> f64 {
        self.0 / 1000.0
    }
}

/// Optical power in mW.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Power(f64);

impl Power {
    pub const ZERO: Power = Power(0.0);

    pub fn mw(value: f64) -> Result<Self> {
        require_nonnegative("power (mW)", value).map(Self)
    }

    pub fn from_dbm(dbm: f64) -> Result<Self> {
        require_finite("power (dBm)", dbm)?;
        Ok(dbm_to_mw(dbm))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `10·log10(P / 1 mW)`; `-inf` for zero power.
    pub fn dbm(self) -> f64 {
        10.0 * log10(self.0)
    }
}

/// `10^(p/10)` mW. Non-finite input yields non-finite power; use
/// [`Power::from_dbm`] for checked construction.
pub fn dbm_to_mw(dbm: f64) -> Power {
    Power(pow(10.0, dbm / 10.0))
}

/// Vacuum wavelength in nm, restricted to [`WAVELENGTH_RANGE_NM`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn nm(value: f64) -> Result<Self> {
        require_finite("wavelength (nm)", value)?;
        let (lo, hi) = WAVELENGTH_RANGE_NM;
        if !(lo..=hi).contains(&value) {
            return Err(Error::invalid(
                "wavelength (nm)",
                value,
                "outside [1260, 1675] nm",
            ));
        }
        Ok(Self(value))
    }

    pub fn from_frequency_thz(thz: f64) -> Result<Self> {
        require_positive("frequency (THz)", thz)?;
        // c [m/s] / f [THz] = c / f · 1e-12 m = c / f · 1e-3 nm
        Self::nm(SPEED_OF_LIGHT / thz * 1e-3)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn frequency_thz(self) -> f64 {
        SPEED_OF_LIGHT / self.0 * 1e-3
    }

    pub fn in_c_band(self) -> bool {
        (C_BAND_NM.0..=C_BAND_NM.1).contains(&self.0)
    }

    /// Photon energy `h·c/λ` in joules.
    pub fn photon_energy_j(self) -> f64 {
        PLANCK * SPEED_OF_LIGHT / (self.0 * 1e-9)
    }
}

/// Width in nm of a `bandwidth_ghz` optical window centred on `center`: `λ²·B/c`.
pub fn bandwidth_ghz_to_nm(bandwidth_ghz: f64, center: Wavelength) -> Result<f64> {
    require_positive("bandwidth (GHz)", bandwidth_ghz)?;
    let lambda = center.value();
    // nm² · GHz / (m/s) → nm: GHz = 1e9 s⁻¹, m = 1e9 nm.
    Ok(lambda * lambda * bandwidth_ghz / SPEED_OF_LIGHT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn db_per_km_examples() {
        assert!((db_per_km_to_linear(0.2).unwrap().value() - 0.046).abs() < 6e-5);
        assert_eq!(db_per_km_to_linear(0.0).unwrap().value(), 0.0);
        assert!(rel(db_per_km_to_linear(0.21).unwrap().value(), 0.048_354_286_952_874_96) < 1e-15);
        assert!(db_per_km_to_linear(-0.1).is_err());
        assert!(db_per_km_to_linear(f64::NAN).is_err());
    }

    #[test]
    fn dbm_examples() {
        assert_eq!(dbm_to_mw(0.0).value(), 1.0);
        assert_eq!(dbm_to_mw(10.0).value(), 10.0);
        assert!(rel(dbm_to_mw(-60.0).value(), 1e-6) < 1e-15);
        assert_eq!(Power::ZERO.dbm(), f64::NEG_INFINITY);
        assert!(Power::from_dbm(f64::INFINITY).is_err());
        assert!(Power::mw(-1.0).is_err());
    }

    #[test]
    fn bandwidth_examples() {
        let c = Wavelength::nm(1550.0).unwrap();
        let b100 = bandwidth_ghz_to_nm(100.0, c).unwrap();
        let b200 = bandwidth_ghz_to_nm(200.0, c).unwrap();
        assert!(rel(b100, 0.801_387_738_713_560_3) < 1e-14);
        assert!(rel(b200, 1.602_775_477_427_120_6) < 1e-14);
        assert!(bandwidth_ghz_to_nm(1e-12, c).unwrap() < 1e-14);
        assert!(bandwidth_ghz_to_nm(0.0, c).is_err());
        assert!(bandwidth_ghz_to_nm(-5.0, c).is_err());
    }

    #[test]
    fn coupling_per_meter_scales_by_thousand() {
        assert_eq!(CouplingCoeff::per_meter(1e-6).unwrap().value(), 1e-6 * 1000.0);
        assert!(CouplingCoeff::per_meter(-1e-6).is_err());
    }

    #[test]
    fn wavelength_window() {
        assert!(Wavelength::nm(1259.9).is_err());
        assert!(Wavelength::nm(1675.1).is_err());
        let q = Wavelength::from_frequency_thz(193.5).unwrap();
        assert!((q.value() - 1549.315).abs() < 1e-3);
        assert!(q.in_c_band());
    }

    proptest! {
        #[test]
        fn attenuation_round_trip(db in 0.0f64..10.0) {
            let a = AttenuationCoeff::from_db_per_km(db).unwrap();
            prop_assert!((a.db_per_km() - db).abs() <= 1e-12 * db.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn power_round_trip(dbm in -90.0f64..40.0) {
            let p = Power::from_dbm(dbm).unwrap();
            let back = Power::mw(p.value()).unwrap().dbm();
            prop_assert!((back - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
        }

        #[test]
        fn frequency_round_trip(nm in 1260.0f64..1675.0) {
            let w = Wavelength::nm(nm).unwrap();
            let back = Wavelength::from_frequency_thz(w.frequency_thz()).unwrap();
            prop_assert!(rel(back.value(), nm) < 1e-9);
        }

        #[test]
        fn bandwidth_linear_in_width(b in 1.0f64..1000.0, nm in 1260.0f64..1675.0) {
            let c = Wavelength::nm(nm).unwrap();
            let one = bandwidth_ghz_to_nm(b, c).unwrap();
            let two = bandwidth_ghz_to_nm(2.0 * b, c).unwrap();
            prop_assert!(rel(two, 2.0 * one) < 1e-15);
        }
    }
}
