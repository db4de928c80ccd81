//! Parameter sweeps and peak searches over the noise and key-rate models.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::dwdm::{aggregate_icsrs, ChannelPlan, RamanEfficiencyProfile};
use crate::error::{require_positive, Error, Result};
use crate::fiber::FiberLink;
use crate::math::{exp, log, log1p};
use crate::qkd::{noise_density, noise_to_click_prob, secure_key_rate, KeyRate, LinkBudget, NoiseMode, NoiseSource, QuantumReceiver};
use crate::raman::{backward_srs_over, forward_srs_over, g_over, NoiseDensity, RamanEfficiency};
use crate::units::{AttenuationCoeff, CouplingCoeff, Power};

/// Everything needed to evaluate one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub link: FiberLink,
    pub plan: ChannelPlan,
    pub receiver: QuantumReceiver,
    pub profile: RamanEfficiencyProfile,
}

/// The swept quantity, in canonical units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Span length, km.
    Length,
    /// Coupling coefficient h_ij, km⁻¹.
    CouplingCoeff,
    /// Classical-channel attenuation, km⁻¹.
    AlphaC,
    /// Quantum-channel attenuation, km⁻¹.
    AlphaQ,
    /// Per-channel launch power applied to every channel, mW.
    LaunchPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub scenario: Scenario,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(Error::invalid("sweep range", self.lo, "requires finite lo < hi"));
        }
        if self.points < 2 {
            return Err(Error::invalid("sweep points", self.points as f64, "at least 2 points required"));
        }
        if self.spacing == Spacing::Logarithmic && self.lo <= 0.0 {
            return Err(Error::invalid("sweep range", self.lo, "logarithmic spacing requires lo > 0"));
        }
        Ok(())
    }

    /// Strictly increasing abscissae; endpoints are exact.
    pub fn abscissae(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|k| {
                if k == 0 {
                    return self.lo;
                }
                if k == n - 1 {
                    return self.hi;
                }
                let t = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.lo + t * (self.hi - self.lo),
                    Spacing::Logarithmic => exp(log(self.lo) + t * (log(self.hi) - log(self.lo))),
                }
            })
            .collect()
    }
}

/// All quantities at one abscissa.
///
/// `forward_*` / `backward_*` treat every plan channel as co- / counter-
/// propagating; `plan_icsrs` and `key` follow the plan's actual directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub abscissa: f64,
    pub forward_icsrs: NoiseDensity,
    pub backward_icsrs: NoiseDensity,
    pub forward_srs: NoiseDensity,
    pub backward_srs: NoiseDensity,
    pub plan_icsrs: NoiseDensity,
    pub key: KeyRate,
    pub key_forward: KeyRate,
    pub key_backward: KeyRate,
    pub key_noiseless: KeyRate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Apply `value` of `variable` to a copy of `base`.
pub fn scenario_at(base: &Scenario, variable: SweepVariable, value: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match variable {
        SweepVariable::Length => s.link = s.link.with_length(value)?,
        SweepVariable::CouplingCoeff => s.link = s.link.with_h_ij(CouplingCoeff::per_km(value)?),
        SweepVariable::AlphaC => s.link = s.link.with_alpha_c(AttenuationCoeff::per_km(value)?),
        SweepVariable::AlphaQ => s.link = s.link.with_alpha_q(AttenuationCoeff::per_km(value)?),
        SweepVariable::LaunchPower => s.plan = s.plan.with_uniform_power(Power::mw(value)?),
    }
    Ok(s)
}

fn key_for(s: &Scenario, density: NoiseDensity) -> Result<KeyRate> {
    let p_noise = noise_to_click_prob(density, &s.receiver)?;
    let budget = LinkBudget::for_span(s.link.alpha_q(), s.link.length_km(), p_noise, &s.receiver)?;
    secure_key_rate(&budget, &s.receiver)
}

fn srs_sum(link: &FiberLink, sources: &[NoiseSource], forward: bool) -> NoiseDensity {
    let mut total = 0.0;
    for src in sources {
        let ac = src.alpha_c.unwrap_or(link.alpha_c()).value();
        let aq = link.alpha_q().value();
        let factor = if forward {
            forward_srs_over(ac, aq, link.length_km())
        } else {
            backward_srs_over(ac, aq, link.length_km())
        };
        total += src.eta.value() * src.power.value() * factor;
    }
    NoiseDensity::mw_per_nm(total).unwrap_or(NoiseDensity::ZERO)
}

/// Evaluate every output column for one scenario.
pub fn evaluate(s: &Scenario, abscissa: f64) -> Result<SweepRow> {
    let sources = s.plan.noise_sources(&s.profile)?;
    let forward_icsrs = noise_density(&s.link, &sources, NoiseMode::Forward)?;
    let backward_icsrs = noise_density(&s.link, &sources, NoiseMode::Backward)?;
    let plan_icsrs = aggregate_icsrs(&s.plan, &s.link, &s.profile)?;
    Ok(SweepRow {
        abscissa,
        forward_icsrs,
        backward_icsrs,
        forward_srs: srs_sum(&s.link, &sources, true),
        backward_srs: srs_sum(&s.link, &sources, false),
        plan_icsrs,
        key: key_for(s, plan_icsrs)?,
        key_forward: key_for(s, forward_icsrs)?,
        key_backward: key_for(s, backward_icsrs)?,
        key_noiseless: key_for(s, NoiseDensity::ZERO)?,
    })
}

/// Evaluate the scenario at every abscissa of `spec`.
///
/// Points are independent; the result is ordered by abscissa and identical
/// for identical specs.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows = spec
        .abscissae()
        .into_iter()
        .map(|x| {
            scenario_at(&spec.scenario, spec.variable, x)
                .and_then(|s| evaluate(&s, x))
                .map_err(|e| Error::SweepPoint {
                    abscissa: x,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

/// Grid traversal settings for peak searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakSearch {
    pub step_km: f64,
    pub lo_km: f64,
    pub hi_km: f64,
    /// Final width of the refinement interval.
    pub tolerance_km: f64,
}

impl Default for PeakSearch {
    fn default() -> Self {
        Self {
            step_km: 0.01,
            lo_km: 0.0,
            hi_km: 200.0,
            tolerance_km: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub location_km: f64,
    pub value: f64,
}

/// Locate the maximum of a unimodal curve on `[lo_km, hi_km]`.
///
/// Traverses the grid (ties resolved toward smaller L), checks that the
/// samples rise to the maximum and fall after it, then narrows the bracketing
/// grid cells by golden-section search.
pub fn find_peak<F: Fn(f64) -> f64>(curve: F, search: PeakSearch) -> Result<Peak> {
    require_positive("peak search step (km)", search.step_km)?;
    require_positive("peak search tolerance (km)", search.tolerance_km)?;
    if search.hi_km <= search.lo_km {
        return Err(Error::invalid("peak search range", search.lo_km, "requires lo < hi"));
    }
    let cells = libm::round((search.hi_km - search.lo_km) / search.step_km) as usize;
    let x = |k: usize| search.lo_km + k as f64 * search.step_km;
    let values: Vec<f64> = (0..=cells).map(|k| curve(x(k))).collect();

    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    let max = values[best];
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if max.is_nan() || max <= min {
        return Err(Error::FlatCurve);
    }
    if best == 0 || best == cells {
        return Err(Error::PeakAtBoundary { location_km: x(best) });
    }
    let slack = 1e-12 * max.abs();
    if let Some(k) = (1..=best).find(|&k| values[k] + slack < values[k - 1]) {
        return Err(Error::NotUnimodal { location_km: x(k) });
    }
    if let Some(k) = (best + 1..=cells).find(|&k| values[k] > values[k - 1] + slack) {
        return Err(Error::NotUnimodal { location_km: x(k) });
    }

    // Golden-section on [x(best-1), x(best+1)].
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (x(best - 1), x(best + 1));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (curve(c), curve(d));
    while b - a > search.tolerance_km {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = curve(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = curve(d);
        }
    }
    let location_km = 0.5 * (a + b);
    let value = curve(location_km).max(max);
    Ok(Peak { location_km, value })
}

/// Length at which forward ICSRS peaks for `link`'s attenuation and coupling.
pub fn find_forward_peak(link: &FiberLink, p0: Power, eta: RamanEfficiency, search: PeakSearch) -> Result<Peak> {
    let (ac, aq, h) = (link.alpha_c().value(), link.alpha_q().value(), link.h_ij().value());
    let scale = eta.value() * p0.value();
    find_peak(|l| scale * g_over(ac, aq, h, l), search)
}

/// Numerically located peak of single-core forward SRS.
pub fn find_forward_srs_peak(alpha_c: AttenuationCoeff, alpha_q: AttenuationCoeff, search: PeakSearch) -> Result<Peak> {
    let (ac, aq) = (alpha_c.value(), alpha_q.value());
    find_peak(|l| forward_srs_over(ac, aq, l), search)
}

/// `ln(α_q/α_c) / (α_q − α_c)`, or `1/α` when the attenuations coincide.
pub fn forward_srs_peak_closed_form(alpha_c: AttenuationCoeff, alpha_q: AttenuationCoeff) -> Result<f64> {
    let ac = require_positive("alpha_c (km⁻¹)", alpha_c.value())?;
    let aq = require_positive("alpha_q (km⁻¹)", alpha_q.value())?;
    // ln(1 + d) / (α_c d) with d = (α_q − α_c)/α_c
    let d = (aq - ac) / ac;
    let ratio = if d.abs() < 1e-9 { 1.0 - d / 2.0 } else { log1p(d) / d };
    Ok(ratio / ac)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub length_km: f64,
    pub forward_icsrs: f64,
    pub backward_icsrs: f64,
    pub forward_srs: f64,
    pub backward_srs: f64,
}

/// ICSRS in the multicore span next to SRS in an equivalent single-core span.
#[derive(Debug, Clone, PartialEq)]
pub struct SrsComparison {
    pub rows: Vec<ComparisonRow>,
    /// Forward ICSRS peak (numerical traversal).
    pub icsrs_peak_km: f64,
    /// Forward SRS peak (closed form).
    pub srs_peak_km: f64,
}

/// Paired noise curves over `lengths_km` and both forward-peak locations.
///
/// Peak locations depend only on attenuation and coupling, so they are found
/// on the unit-power shape and reported even when η or P₀ is zero. Fails with
/// [`Error::PeakOrdering`] if the ICSRS peak is not beyond the SRS peak.
pub fn compare_srs_icsrs(
    link: &FiberLink,
    p0: Power,
    eta: RamanEfficiency,
    lengths_km: &[f64],
    search: PeakSearch,
) -> Result<SrsComparison> {
    let (ac, aq, h) = (link.alpha_c().value(), link.alpha_q().value(), link.h_ij().value());
    let scale = eta.value() * p0.value();
    let rows = lengths_km
        .iter()
        .map(|&l| {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::invalid("comparison length (km)", l, "must be finite and nonnegative"));
            }
            Ok(ComparisonRow {
                length_km: l,
                forward_icsrs: scale * g_over(ac, aq, h, l),
                backward_icsrs: scale * crate::raman::f_over(ac, aq, h, l),
                forward_srs: scale * forward_srs_over(ac, aq, l),
                backward_srs: scale * backward_srs_over(ac, aq, l),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let icsrs_peak_km = find_forward_peak(link, Power::mw(1.0)?, RamanEfficiency::per_km_nm(1.0)?, search)?.location_km;
    let srs_peak_km = forward_srs_peak_closed_form(link.alpha_c(), link.alpha_q())?;
    if icsrs_peak_km < srs_peak_km {
        return Err(Error::PeakOrdering {
            icsrs_km: icsrs_peak_km,
            srs_km: srs_peak_km,
        });
    }
    Ok(SrsComparison {
        rows,
        icsrs_peak_km,
        srs_peak_km,
    })
}
