//! Integer-order Bessel functions of the first kind.
//!
//! Miller's backward recurrence from an order well above both `n` and `x`,
//! normalized with `J_0 + 2 Σ_k J_2k = 1`. One pass yields every order up to
//! the requested one, which is what comb construction needs.

use crate::error::{Error, Result};

pub const MAX_ORDER: i64 = 200;
pub const MAX_ARG: f64 = 50.0;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// Starting order for the backward recurrence.
fn start_order(top: usize, x: f64) -> usize {
    let scale = (top as f64).max(x);
    let m = scale + 40.0 + (40.0 * scale).sqrt();
    // even start keeps the normalization sum aligned with J_2k
    (m.ceil() as usize + 1) & !1
}

/// `J_0(x) .. J_top(x)` for `x >= 0`.
pub(crate) fn sequence_nonneg(x: f64, top: usize) -> Vec<f64> {
    debug_assert!(x >= 0.0);
    let mut out = vec![0.0; top + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let m = start_order(top, x);
    let mut vals = vec![0.0; m + 2];
    vals[m] = 1e-30;
    let two_over_x = 2.0 / x;
    for k in (1..=m).rev() {
        let prev = k as f64 * two_over_x * vals[k] - vals[k + 1];
        vals[k - 1] = prev;
        if prev.abs() > RESCALE_ABOVE {
            for v in vals[k - 1..].iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / norm;
    }
    out
}

/// `J_0(x) .. J_top(x)` for any real `x`, using `J_n(-x) = (-1)^n J_n(x)`.
pub fn bessel_j_sequence(x: f64, top: usize) -> Result<Vec<f64>> {
    if !(x.abs() <= MAX_ARG) || top as i64 > MAX_ORDER {
        return Err(Error::BesselDomain { n: top as i64, x });
    }
    let mut seq = sequence_nonneg(x.abs(), top);
    if x < 0.0 {
        seq.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
    }
    Ok(seq)
}

/// `J_n(x)` for `|n| <= 200`, `|x| <= 50`.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    if n.abs() > MAX_ORDER || !(x.abs() <= MAX_ARG) {
        return Err(Error::BesselDomain { n, x });
    }
    let order = n.unsigned_abs() as usize;
    let j = bessel_j_sequence(x, order)?[order];
    Ok(if n < 0 && order % 2 == 1 { -j } else { j })
}
