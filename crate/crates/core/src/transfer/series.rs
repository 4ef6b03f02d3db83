//! Power-series evaluation of the transfer coefficients.
//!
//! Starting from the target site (`a_0 = 1`, the rest 0), the recurrence
//! `v_n = M v_{n−1}` walks the Heisenberg-evolved operator back along the
//! chain; coefficient `k` is `Σ_n (−1)^{⌊n/2⌋} v_n[k] t^n / n!`, which for each
//! site keeps whichever of `Re f`, `−Im f` is nonzero (bipartite hopping puts
//! every site's amplitude on a single real or imaginary axis).
//!
//! Individual terms reach ~1e25 near Jt = 30 while the sum stays below 1, so
//! the sum is carried in exact binary fixed point with [`FRAC_BITS`]
//! fractional bits.

use num_bigint::BigInt;
use num_traits::{Float, ToPrimitive, Zero};

use crate::error::{FluxError, Result};

use super::CouplingProfile;

/// Bound on the neglected tail required by [`series_flux`].
pub const SERIES_TOLERANCE: f64 = 1e-10;

const FRAC_BITS: i64 = 320;

fn to_fixed(x: f64) -> BigInt {
    let (mantissa, exponent, sign) = Float::integer_decode(x);
    let m = BigInt::from(mantissa) * i64::from(sign);
    let shift = i64::from(exponent) + FRAC_BITS;
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn from_fixed(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(FRAC_BITS as i32))
}

fn mul_fixed(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b) >> FRAC_BITS as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    /// `coefficients[0]` belongs to the last (target) site and
    /// `coefficients[N−1]` to the first (input) site; the latter is the
    /// end-to-end flux (`I^{XX}` for odd `N`, `I^{XY}` for even `N`).
    pub coefficients: Vec<f64>,
    pub order: usize,
    /// Bound on the magnitude of the neglected tail.
    pub truncation_bound: f64,
}

/// `Σ_{m > order} x^m / m!` bounded by the first neglected term over
/// `1 − x/(order + 2)`, with `x = ‖M‖ |t|`; infinite when that ratio is ≥ 1.
pub fn series_truncation_bound(profile: &CouplingProfile, t: f64, order: usize) -> f64 {
    let x = profile.norm_bound() * t.abs();
    if x == 0.0 {
        return 0.0;
    }
    let ratio = x / (order as f64 + 2.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let mut term = 1.0;
    for m in 1..=order + 1 {
        term *= x / m as f64;
    }
    term / (1.0 - ratio)
}

/// Sums the series through `t^order`. Fails with
/// [`FluxError::TruncationInsufficient`] unless the tail bound is below
/// [`SERIES_TOLERANCE`].
pub fn series_flux(profile: &CouplingProfile, t: f64, order: usize) -> Result<SeriesResult> {
    if !t.is_finite() {
        return Err(FluxError::InvalidArgument(format!("non-finite time {t}")));
    }
    let bound = series_truncation_bound(profile, t, order);
    if !(bound < SERIES_TOLERANCE) {
        return Err(FluxError::TruncationInsufficient {
            order,
            bound,
            tolerance: SERIES_TOLERANCE,
        });
    }
    let n = profile.n_qubits();
    // hopping seen from the target end
    let j: Vec<BigInt> = profile
        .couplings()
        .iter()
        .rev()
        .map(|&c| to_fixed(c))
        .collect();
    let tf = to_fixed(t);

    let mut v = vec![BigInt::zero(); n];
    v[0] = BigInt::from(1) << FRAC_BITS as usize;
    let mut acc = v.clone();
    for step in 1..=order {
        let mut next = vec![BigInt::zero(); n];
        for k in 0..n {
            let mut s = BigInt::zero();
            if k > 0 {
                s += mul_fixed(&j[k - 1], &v[k - 1]);
            }
            if k + 1 < n {
                s += mul_fixed(&j[k], &v[k + 1]);
            }
            next[k] = mul_fixed(&s, &tf) / BigInt::from(step);
        }
        v = next;
        let negative = (step / 2) % 2 == 1;
        for (a, x) in acc.iter_mut().zip(&v) {
            if negative {
                *a -= x;
            } else {
                *a += x;
            }
        }
    }
    Ok(SeriesResult {
        coefficients: acc.iter().map(from_fixed).collect(),
        order,
        truncation_bound: bound,
    })
}

/// Smallest order whose tail bound meets [`SERIES_TOLERANCE`].
pub fn required_order(profile: &CouplingProfile, t: f64) -> usize {
    let mut order = 0;
    while !(series_truncation_bound(profile, t, order) < SERIES_TOLERANCE) {
        order += 1;
    }
    order
}
