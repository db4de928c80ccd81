//! Decoy-state BB84 key rate with a Raman-noise vacuum yield.
//!
//! Asymptotic lower bound, per gate:
//!
//! ```text
//! R  = q { −Q_μ f H₂(E_μ) + Q₁ [1 − H₂(e₁)] }
//! Y₁ = Y₀ + t_l        Q₁ = Y₁ μ e^{−μ}        e₁ = (Y₀/2 + e_d t_l) / Y₁
//! Q_μ = Y₀ + 1 − e^{−t_l μ}                     E_μ Q_μ = Y₀/2 + e_d (1 − e^{−t_l μ})
//! Y₀ = p_dark + p_noise
//! ```
//!
//! `t_l` is the end-to-end transmissivity including detector efficiency.

use log::warn;

use crate::error::{require_nonnegative, require_positive, require_probability, Error, Result};
use crate::fiber::FiberLink;
use crate::math::{exp, log2};
use crate::raman::{backward_icsrs, forward_icsrs, NoiseDensity, RamanEfficiency};
use crate::units::{bandwidth_ghz_to_nm, AttenuationCoeff, Power, Wavelength};

/// Click probabilities above this are outside the mean-photon-number regime.
pub const CLICK_PROBABILITY_WARNING: f64 = 0.1;

/// How receiver-side noise density becomes a per-gate click probability.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ClickModel {
    /// Photons collected in the receiver's optical window during one gate,
    /// times detector efficiency.
    #[default]
    BandwidthWindow,
    /// Fixed calibration: clicks per gate per (mW/nm) of noise density.
    Calibrated { clicks_per_mw_per_nm: f64 },
}

/// Detector, receiver filter and protocol settings on Bob's side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumReceiver {
    pub det_efficiency: f64,
    pub dark_count_prob: f64,
    /// Effective gate width, seconds.
    pub gate_width_s: f64,
    /// Optical receiving bandwidth, GHz.
    pub rx_bandwidth_ghz: f64,
    pub wavelength: Wavelength,
    /// Misalignment error e_d.
    pub misalignment_error: f64,
    /// Mean photon number μ of the signal state.
    pub mean_photon_number: f64,
    /// Error-correction inefficiency f(E_μ).
    pub ec_efficiency: f64,
    /// Sifting factor q (1/2 for BB84).
    pub protocol_factor: f64,
    pub click_model: ClickModel,
}

impl QuantumReceiver {
    /// 10 % detector, 1e-6 dark counts, 1 ns gate, 100 GHz filter; e_d = 0.015,
    /// μ = 0.5, f = 1.15, q = 1/2.
    pub fn with_defaults(wavelength: Wavelength) -> Self {
        Self {
            det_efficiency: 0.10,
            dark_count_prob: 1e-6,
            gate_width_s: 1e-9,
            rx_bandwidth_ghz: 100.0,
            wavelength,
            misalignment_error: 0.015,
            mean_photon_number: 0.5,
            ec_efficiency: 1.15,
            protocol_factor: 0.5,
            click_model: ClickModel::BandwidthWindow,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_probability("det_efficiency", self.det_efficiency)?;
        require_probability("dark_count_prob", self.dark_count_prob)?;
        require_positive("gate_width (s)", self.gate_width_s)?;
        require_positive("rx_bandwidth (GHz)", self.rx_bandwidth_ghz)?;
        require_probability("misalignment_error", self.misalignment_error)?;
        if self.misalignment_error > 0.5 {
            return Err(Error::invalid("misalignment_error", self.misalignment_error, "must not exceed 0.5"));
        }
        require_positive("mean_photon_number", self.mean_photon_number)?;
        if !(self.ec_efficiency >= 1.0 && self.ec_efficiency.is_finite()) {
            return Err(Error::invalid("ec_efficiency", self.ec_efficiency, "must be at least 1"));
        }
        require_positive("protocol_factor", self.protocol_factor)?;
        if self.protocol_factor > 1.0 {
            return Err(Error::invalid("protocol_factor", self.protocol_factor, "must not exceed 1"));
        }
        if let ClickModel::Calibrated { clicks_per_mw_per_nm } = self.click_model {
            require_nonnegative("clicks_per_mw_per_nm", clicks_per_mw_per_nm)?;
        }
        Ok(())
    }
}

/// Binary Shannon entropy in bits, with `H₂(0) = H₂(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    require_probability("binary entropy argument", x)?;
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * log2(x) - (1.0 - x) * log2(1.0 - x))
}

/// Per-gate noise click probability caused by a noise density at the receiver.
pub fn noise_to_click_prob(density: NoiseDensity, rx: &QuantumReceiver) -> Result<f64> {
    let p = match rx.click_model {
        ClickModel::BandwidthWindow => {
            let window_nm = bandwidth_ghz_to_nm(rx.rx_bandwidth_ghz, rx.wavelength)?;
            let watts = density.value() * 1e-3 * window_nm;
            watts * rx.gate_width_s / rx.wavelength.photon_energy_j() * rx.det_efficiency
        }
        ClickModel::Calibrated { clicks_per_mw_per_nm } => density.value() * clicks_per_mw_per_nm,
    };
    if p > CLICK_PROBABILITY_WARNING {
        warn!("noise click probability {p:.3e} per gate exceeds {CLICK_PROBABILITY_WARNING}; mean-photon-number approximation is stretched");
    }
    Ok(p)
}

/// `Y₀ = p_dark + p_noise`.
pub fn vacuum_yield(p_noise: f64, rx: &QuantumReceiver) -> Result<f64> {
    require_nonnegative("noise click probability", p_noise)?;
    Ok(rx.dark_count_prob + p_noise)
}

/// Channel transmissivity and vacuum yield for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    t_l: f64,
    y0: f64,
}

impl LinkBudget {
    pub fn new(t_l: f64, y0: f64, rx: &QuantumReceiver) -> Result<Self> {
        require_probability("t_l", t_l)?;
        require_nonnegative("y0", y0)?;
        if y0 < rx.dark_count_prob {
            return Err(Error::invalid("y0", y0, "must be at least the dark-count probability"));
        }
        Ok(Self { t_l, y0 })
    }

    /// `t_l = e^{−α_q L}·η_det`, `Y₀ = p_dark + p_noise`.
    pub fn for_span(alpha_q: AttenuationCoeff, length_km: f64, p_noise: f64, rx: &QuantumReceiver) -> Result<Self> {
        require_nonnegative("fiber length (km)", length_km)?;
        let t_l = exp(-alpha_q.value() * length_km) * rx.det_efficiency;
        Self::new(t_l, vacuum_yield(p_noise, rx)?, rx)
    }

    pub fn t_l(&self) -> f64 {
        self.t_l
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }
}

/// Key-rate evaluation and its intermediate quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRate {
    /// Secure bits per gate, floored at zero.
    pub rate: f64,
    /// The bound before flooring; may be negative.
    pub raw_rate: f64,
    /// Overall QBER E_μ.
    pub qber: f64,
    /// Overall gain Q_μ.
    pub gain: f64,
    pub single_photon_gain: f64,
    pub single_photon_error: f64,
}

impl KeyRate {
    pub fn per_second(&self, clock_hz: f64) -> f64 {
        self.rate * clock_hz
    }
}

pub fn secure_key_rate(budget: &LinkBudget, rx: &QuantumReceiver) -> Result<KeyRate> {
    let (t, y0) = (budget.t_l, budget.y0);
    let mu = rx.mean_photon_number;
    let e_d = rx.misalignment_error;

    let y1 = y0 + t;
    if y1 <= 0.0 {
        return Err(Error::DeadLink);
    }
    let q1 = y1 * mu * exp(-mu);
    let e1 = (y0 / 2.0 + e_d * t) / y1;

    let signal_clicks = -crate::math::expm1(-t * mu);
    let gain = y0 + signal_clicks;
    let qber = (y0 / 2.0 + e_d * signal_clicks) / gain;

    let raw_rate = rx.protocol_factor
        * (-gain * rx.ec_efficiency * binary_entropy(qber.min(1.0))?
            + q1 * (1.0 - binary_entropy(e1.min(1.0))?));
    Ok(KeyRate {
        rate: raw_rate.max(0.0),
        raw_rate,
        qber,
        gain,
        single_photon_gain: q1,
        single_photon_error: e1,
    })
}

/// One classical source seen from the quantum channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSource {
    pub power: Power,
    pub eta: RamanEfficiency,
    /// Overrides the link's α_c for this source.
    pub alpha_c: Option<AttenuationCoeff>,
}

/// Which Raman noise reaches the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    None,
    /// Every source co-propagates with the quantum signal.
    Forward,
    /// Every source counter-propagates.
    Backward,
    /// Every source contributes both directions.
    Both,
}

/// Summed noise density at the receiver for a span of `link`'s parameters.
pub fn noise_density(link: &FiberLink, sources: &[NoiseSource], mode: NoiseMode) -> Result<NoiseDensity> {
    let mut total = NoiseDensity::ZERO;
    if mode == NoiseMode::None {
        return Ok(total);
    }
    for (index, src) in sources.iter().enumerate() {
        let l = match src.alpha_c {
            Some(a) => link.with_alpha_c(a),
            None => *link,
        };
        if matches!(mode, NoiseMode::Forward | NoiseMode::Both) {
            total = total + forward_icsrs(&l, src.power, src.eta);
        }
        if matches!(mode, NoiseMode::Backward | NoiseMode::Both) {
            total = total + backward_icsrs(&l, src.power, src.eta).map_err(|e| e.for_channel(index))?;
        }
    }
    Ok(total)
}

/// Key rate after `length_km` of `link`'s fiber with the given noise.
pub fn key_rate_at(
    link: &FiberLink,
    length_km: f64,
    rx: &QuantumReceiver,
    sources: &[NoiseSource],
    mode: NoiseMode,
) -> Result<KeyRate> {
    let span = link.with_length(length_km)?;
    let p_noise = noise_to_click_prob(noise_density(&span, sources, mode)?, rx)?;
    secure_key_rate(&LinkBudget::for_span(span.alpha_q(), length_km, p_noise, rx)?, rx)
}

/// Search settings for [`max_secure_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSearch {
    pub bracket_km: f64,
    pub scan_step_km: f64,
    pub resolution_km: f64,
}

impl Default for DistanceSearch {
    fn default() -> Self {
        Self {
            bracket_km: 500.0,
            scan_step_km: 1.0,
            resolution_km: 0.1,
        }
    }
}

/// Result of [`max_secure_distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxDistance {
    pub distance_km: f64,
    /// The key rate was still positive at the bracket edge.
    pub bracket_limited: bool,
}

/// Largest span length with a positive key rate.
///
/// Scans the bracket on a coarse grid to find the last positive point, then
/// bisects the following cell down to `resolution_km`. The returned distance
/// always has R > 0.
pub fn max_secure_distance(
    link: &FiberLink,
    rx: &QuantumReceiver,
    sources: &[NoiseSource],
    mode: NoiseMode,
    search: DistanceSearch,
) -> Result<MaxDistance> {
    let positive = |l: f64| -> Result<bool> { Ok(key_rate_at(link, l, rx, sources, mode)?.rate > 0.0) };

    let mut grid = alloc::vec![search.resolution_km];
    let cells = libm::ceil(search.bracket_km / search.scan_step_km) as usize;
    grid.extend((1..=cells).map(|k| (k as f64 * search.scan_step_km).min(search.bracket_km)));

    let mut last_positive = None;
    for (i, &l) in grid.iter().enumerate() {
        if positive(l)? {
            last_positive = Some(i);
        }
    }
    let Some(i) = last_positive else {
        return Err(Error::NoSecureDistance {
            bracket_km: search.bracket_km,
        });
    };
    if i == grid.len() - 1 {
        return Ok(MaxDistance {
            distance_km: grid[i],
            bracket_limited: true,
        });
    }

    let (mut lo, mut hi) = (grid[i], grid[i + 1]);
    while hi - lo > search.resolution_km {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MaxDistance {
        distance_km: lo,
        bracket_limited: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::CouplingCoeff;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn rx() -> QuantumReceiver {
        QuantumReceiver::with_defaults(Wavelength::nm(1550.0).unwrap())
    }

    fn fig5_link() -> FiberLink {
        FiberLink::new(
            50.0,
            AttenuationCoeff::from_db_per_km(0.22).unwrap(),
            AttenuationCoeff::from_db_per_km(0.21).unwrap(),
            CouplingCoeff::per_meter(1e-6).unwrap(),
        )
        .unwrap()
    }

    fn source(dbm: f64) -> NoiseSource {
        NoiseSource {
            power: Power::from_dbm(dbm).unwrap(),
            eta: RamanEfficiency::per_km_nm(6e-9).unwrap(),
            alpha_c: None,
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!(rel(binary_entropy(0.11).unwrap(), 0.499_915_958_164_528) < 1e-13);
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
    }

    #[test]
    fn click_probability_examples() {
        let r = rx();
        assert_eq!(noise_to_click_prob(NoiseDensity::ZERO, &r).unwrap(), 0.0);
        let d = NoiseDensity::mw_per_nm(1.2e-9).unwrap();
        let p = noise_to_click_prob(d, &r).unwrap();
        assert!(rel(p, 7.503_759_484_019_351e-4) < 1e-13);
        let wide = QuantumReceiver { rx_bandwidth_ghz: 200.0, ..r };
        assert!(rel(noise_to_click_prob(d, &wide).unwrap(), 2.0 * p) < 1e-15);
        let cal = QuantumReceiver { click_model: ClickModel::Calibrated { clicks_per_mw_per_nm: 1e3 }, ..r };
        assert!(rel(noise_to_click_prob(d, &cal).unwrap(), 1.2e-6) < 1e-15);
    }

    #[test]
    fn vacuum_yield_examples() {
        let r = rx();
        assert_eq!(vacuum_yield(0.0, &r).unwrap(), 1e-6);
        assert!(rel(vacuum_yield(1e-6, &r).unwrap(), 2e-6) < 1e-15);
        assert!(rel(vacuum_yield(7.5e-4, &r).unwrap(), 7.51e-4) < 1e-15);
        assert!(vacuum_yield(-1e-9, &r).is_err());
    }

    #[test]
    fn golden_noiseless_key_rate_at_50_km() {
        let r = rx();
        let b = LinkBudget::for_span(AttenuationCoeff::from_db_per_km(0.21).unwrap(), 50.0, 0.0, &r).unwrap();
        assert!(rel(b.t_l(), 0.008_912_509_381_337_455) < 1e-13);
        let k = secure_key_rate(&b, &r).unwrap();
        assert!(rel(k.qber, 0.015_109_053_943_499_298) < 1e-12);
        assert!(rel(k.rate, 9.102_577_572_803_685e-4) < 1e-12);
        assert_eq!(k.per_second(1e9), k.rate * 1e9);
    }

    #[test]
    fn dead_link_and_saturation() {
        let r = QuantumReceiver { dark_count_prob: 0.0, ..rx() };
        let dead = LinkBudget::new(0.0, 0.0, &r).unwrap();
        assert_eq!(secure_key_rate(&dead, &r), Err(Error::DeadLink));
        let noisy = LinkBudget::new(0.01, 0.5, &r).unwrap();
        let k = secure_key_rate(&noisy, &r).unwrap();
        assert_eq!(k.rate, 0.0);
        assert!(k.raw_rate < 0.0);
    }

    #[test]
    fn budget_validation() {
        let r = rx();
        assert!(LinkBudget::new(1.5, 1e-6, &r).is_err());
        assert!(LinkBudget::new(0.5, 1e-7, &r).is_err());
        assert!(QuantumReceiver { misalignment_error: 0.6, ..r }.validate().is_err());
        assert!(QuantumReceiver { ec_efficiency: 0.9, ..r }.validate().is_err());
        assert!(r.validate().is_ok());
    }

    #[test]
    fn qber_tends_to_half_without_signal() {
        let r = rx();
        let k = secure_key_rate(&LinkBudget::new(1e-15, 1e-6, &r).unwrap(), &r).unwrap();
        assert!((k.qber - 0.5).abs() < 1e-6);
    }

    #[test]
    fn noise_free_equals_zero_efficiency() {
        let link = fig5_link();
        let r = rx();
        let silent = NoiseSource { eta: RamanEfficiency::ZERO, ..source(10.0) };
        for l in [5.0, 50.0, 120.0] {
            let none = key_rate_at(&link, l, &r, &[source(10.0)], NoiseMode::None).unwrap();
            let zero = key_rate_at(&link, l, &r, &[silent], NoiseMode::Both).unwrap();
            assert_eq!(none, zero);
        }
    }

    #[test]
    fn noiseless_distance_without_dark_counts_hits_bracket() {
        let r = QuantumReceiver { dark_count_prob: 0.0, ..rx() };
        let d = max_secure_distance(&fig5_link(), &r, &[], NoiseMode::None, DistanceSearch::default()).unwrap();
        assert!(d.bracket_limited);
        assert_eq!(d.distance_km, 500.0);
    }

    #[test]
    fn noise_shortens_distance() {
        let r = rx();
        let s = DistanceSearch::default();
        let none = max_secure_distance(&fig5_link(), &r, &[source(-20.0)], NoiseMode::None, s).unwrap();
        let fwd = max_secure_distance(&fig5_link(), &r, &[source(-20.0)], NoiseMode::Forward, s).unwrap();
        let bwd = max_secure_distance(&fig5_link(), &r, &[source(-20.0)], NoiseMode::Backward, s).unwrap();
        assert!(!none.bracket_limited);
        assert!(bwd.distance_km < fwd.distance_km && fwd.distance_km < none.distance_km);
        // resolution: the next 0.1 km step is no longer secure
        let next = key_rate_at(&fig5_link(), none.distance_km + 0.1, &r, &[], NoiseMode::None).unwrap();
        assert_eq!(next.rate, 0.0);
    }

    #[test]
    fn no_secure_distance_is_distinct() {
        let r = QuantumReceiver { misalignment_error: 0.3, ..rx() };
        let e = max_secure_distance(&fig5_link(), &r, &[], NoiseMode::None, DistanceSearch::default());
        assert!(matches!(e, Err(Error::NoSecureDistance { .. })));
    }

    proptest! {
        #[test]
        fn rate_nonincreasing_in_vacuum_yield(t in 1e-6f64..0.1, y0 in 1e-6f64..0.05, dy in 0.0f64..0.05) {
            let r = rx();
            let a = secure_key_rate(&LinkBudget::new(t, y0, &r).unwrap(), &r).unwrap();
            let b = secure_key_rate(&LinkBudget::new(t, y0 + dy, &r).unwrap(), &r).unwrap();
            prop_assert!(b.rate <= a.rate);
            prop_assert!(a.rate >= 0.0);
            prop_assert!((0.0..=0.5).contains(&a.qber));
        }

        #[test]
        fn raw_rate_continuous_in_length(l in 1.0f64..300.0) {
            let link = fig5_link();
            let r = rx();
            let a = key_rate_at(&link, l, &r, &[source(0.0)], NoiseMode::Both).unwrap().raw_rate;
            let b = key_rate_at(&link, l + 1e-7, &r, &[source(0.0)], NoiseMode::Both).unwrap().raw_rate;
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn pointwise_noise_dominance_orders_distances(dbm in -30.0f64..-10.0) {
            // Whenever one noise mode is at least the other at every length,
            // its secure distance cannot be longer.
            let link = fig5_link();
            let r = rx();
            let s = DistanceSearch::default();
            let src = [source(dbm)];
            let none = max_secure_distance(&link, &r, &src, NoiseMode::None, s).unwrap();
            let fwd = max_secure_distance(&link, &r, &src, NoiseMode::Forward, s).unwrap();
            let both = max_secure_distance(&link, &r, &src, NoiseMode::Both, s).unwrap();
            prop_assert!(both.distance_km <= fwd.distance_km);
            prop_assert!(fwd.distance_km <= none.distance_km);
        }
    }
}
