//! Adaptive Gauss–Kronrod (7/15) integration on a finite interval.
//!
//! Used as the independent numerical reference for the closed-form noise
//! expressions, so it deliberately knows nothing about them.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// Integration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Target relative error of the whole integral.
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_depth: 60,
        }
    }
}

// Kronrod abscissae on [0, 1); odd indices are shared with the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One K15 panel: (Kronrod estimate, |Kronrod − Gauss|).
fn kronrod_panel<F>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { z: x })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Integrate `f` over `[lo, hi]` to `options.rel_tol` of the total.
///
/// Each subinterval must meet its share of the error budget, proportional to
/// its width; a subinterval that still fails after `max_depth` bisections is
/// reported as [`Error::QuadratureDiverged`].
pub fn integrate<F>(f: F, lo: f64, hi: f64, options: QuadratureOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(0.0);
    }
    let (whole, err) = kronrod_panel(&f, lo, hi)?;
    let budget = options.rel_tol * whole.abs();
    if err <= budget {
        return Ok(whole);
    }
    let total_width = hi - lo;
    refine(&f, lo, hi, budget / total_width, 0, options.max_depth)
}

fn refine<F>(
    f: &F,
    lo: f64,
    hi: f64,
    budget_per_width: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if depth >= max_depth {
        return Err(Error::QuadratureDiverged { lo, hi, depth });
    }
    let mid = 0.5 * (lo + hi);
    let (left, left_err) = kronrod_panel(f, lo, mid)?;
    let (right, right_err) = kronrod_panel(f, mid, hi)?;
    let allowed = budget_per_width * (hi - lo);
    if left_err + right_err <= allowed {
        return Ok(left + right);
    }
    let left = if left_err <= 0.5 * allowed {
        left
    } else {
        refine(f, lo, mid, budget_per_width, depth + 1, max_depth)?
    };
    let right = if right_err <= 0.5 * allowed {
        right
    } else {
        refine(f, mid, hi, budget_per_width, depth + 1, max_depth)?
    };
    Ok(left + right)
}
