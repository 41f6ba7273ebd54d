#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// `J_0(t)` from its power series `sum (-1)^m (t/2)^{2m} / (m!)^2`, summed in
/// exact fixed-point big-integer arithmetic. The working precision grows with
/// `t` so that the cancellation between terms of size `e^t` is resolved, and
/// terms are added until they vanish at that precision (never fewer than
/// `min_terms`).
pub fn j0_reference(t: f64, min_terms: usize) -> f64 {
    assert!(t.is_finite());
    let t = t.abs();
    if t == 0.0 {
        return 1.0;
    }
    let frac_bits = (t * std::f64::consts::LOG2_E).ceil() as u64 + 128;
    // t = mant * 2^exp exactly, so (t/2)^2 = mant^2 * 2^(2 exp - 2)
    let (mant, exp) = decompose(t);
    let mant2 = BigInt::from(mant) * BigInt::from(mant);
    let shift = 2 * exp - 2;

    let one = BigInt::from(1) << frac_bits;
    let mut term = one.clone();
    let mut sum = one;
    let mut m: u64 = 1;
    loop {
        term *= &mant2;
        if shift >= 0 {
            term <<= shift as u64;
        } else {
            term >>= (-shift) as u64;
        }
        term /= BigInt::from(m) * BigInt::from(m);
        term = -term;
        sum += &term;
        if term.is_zero() && m as usize >= min_terms {
            break;
        }
        // past the peak and below one unit of the last place
        if m as f64 > t && term.abs() < BigInt::from(1) && m as usize >= min_terms {
            break;
        }
        m += 1;
    }
    to_f64(&sum, frac_bits)
}

fn decompose(t: f64) -> (u64, i64) {
    let bits = t.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

fn to_f64(x: &BigInt, frac_bits: u64) -> f64 {
    // keep 64 fractional bits, then scale
    let keep = 64;
    let y = if frac_bits > keep { x >> (frac_bits - keep) } else { x.clone() };
    y.to_f64().expect("finite") / 2f64.powi(keep as i32)
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
