//! Scalar helpers over `libm`, plus divided differences of `x ↦ exp(x·L)`.
//!
//! Every closed-form noise expression in [`crate::raman`] is a first or
//! second divided difference of the exponential at a few attenuation-like
//! nodes. Evaluating them in that form keeps full relative precision when
//! nodes coincide or nearly coincide (α_q ≈ α_c, h_ij → 0, L → 0), where the
//! textbook two-term differences cancel catastrophically.

pub(crate) use libm::{cosh, exp, expm1, log, log10, log1p, log2, pow, sinh, tanh};

/// Below this |t| the series for [`exprel`] is used.
const EXPREL_SERIES_BELOW: f64 = 1e-9;

/// Node spread (times L) below which the second difference uses its Taylor series.
const DD2_SERIES_BELOW: f64 = 1e-2;

/// `(e^t − 1) / t`, continuous through `t = 0`.
pub(crate) fn exprel(t: f64) -> f64 {
    if t.abs() < EXPREL_SERIES_BELOW {
        1.0 + t / 2.0 + t * t / 6.0
    } else {
        expm1(t) / t
    }
}

/// First divided difference of `x ↦ e^{xL}`: `(e^{xL} − e^{yL}) / (x − y)`.
pub(crate) fn exp_dd1(x: f64, y: f64, length: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    exp(lo * length) * length * exprel((hi - lo) * length)
}

/// Second divided difference of `x ↦ e^{xL}` at three nodes (any order).
///
/// Always nonnegative; equals `L²/2 · e^{xL}` when the nodes coincide.
pub(crate) fn exp_dd2(a: f64, b: f64, c: f64, length: f64) -> f64 {
    let mut nodes = [a, b, c];
    nodes.sort_by(|u, v| u.total_cmp(v));
    let [lo, mid, hi] = nodes;
    let spread = (hi - lo) * length;

    if spread >= DD2_SERIES_BELOW {
        return (exp_dd1(hi, mid, length) - exp_dd1(mid, lo, length)) / (hi - lo);
    }

    // Expand around the middle node: Σ_k L^{k+2} h_k(d_hi, d_lo) / (k+2)!,
    // with h_k the complete homogeneous symmetric polynomial.
    let up = (hi - mid) * length;
    let down = (lo - mid) * length;
    let mut sum = 0.0;
    let mut factorial = 2.0;
    let mut up_pow = 1.0;
    // h_k(u, d) = u^k + d·h_{k-1}(u, d)
    let mut h_k = 1.0;
    for k in 0..10 {
        if k > 0 {
            up_pow *= up;
            h_k = up_pow + down * h_k;
            factorial *= (k + 2) as f64;
        }
        sum += h_k / factorial;
    }
    exp(mid * length) * length * length * sum
}
