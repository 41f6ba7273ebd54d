//! Special functions for the random wave model: the zero-order Bessel
//! function of the first kind, probabilists' Hermite polynomials and the
//! isotropic covariance kernel built from them.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Accuracy contract of [`bessel_j0`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselAccuracy {
    pub abs_tolerance: f64,
    /// Arguments with `|t|` at or below this value use the power series;
    /// larger arguments use the Hankel expansion.
    pub series_cutoff: f64,
}

impl BesselAccuracy {
    pub const DEFAULT: BesselAccuracy = BesselAccuracy {
        abs_tolerance: 1e-10,
        series_cutoff: SERIES_CUTOFF,
    };

    pub fn new(abs_tolerance: f64, series_cutoff: f64) -> Result<Self> {
        if !(abs_tolerance > 0.0) || !(series_cutoff > 0.0) {
            return Err(Error::domain(format!(
                "bessel accuracy needs positive tolerance and cutoff, got {abs_tolerance}, {series_cutoff}"
            )));
        }
        Ok(Self {
            abs_tolerance,
            series_cutoff,
        })
    }
}

impl Default for BesselAccuracy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

const SERIES_CUTOFF: f64 = 12.0;

/// `J_0(t)` with the [`BesselAccuracy::DEFAULT`] contract.
pub fn bessel_j0(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::domain(format!("bessel_j0 of non-finite argument {t}")));
    }
    Ok(j0(t))
}

/// Unchecked `J_0`; propagates NaN. Used on hot paths where the argument is
/// known to be finite.
pub fn j0(t: f64) -> f64 {
    let x = t.abs();
    if x <= SERIES_CUTOFF {
        j0_series(x)
    } else {
        j0_hankel(x)
    }
}

// sum_m (-1)^m (x/2)^{2m} / (m!)^2, terms generated by ratio.
fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    loop {
        term *= -q / (m * m);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && m > q.sqrt() {
            break;
        }
        m += 1.0;
    }
    sum
}

// Hankel expansion J0(x) = sqrt(2/(pi x)) (P cos w - Q sin w), w = x - pi/4,
// summed until the terms stop decreasing.
fn j0_hankel(x: f64) -> f64 {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut u = 1.0_f64;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let next = u * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if next >= u || next < 1e-18 {
            break;
        }
        u = next;
        // even k contributes to P with sign (-1)^{k/2}; odd k to Q with
        // sign -(-1)^{(k-1)/2}
        match k % 4 {
            0 => p += u,
            1 => q -= u,
            2 => p -= u,
            _ => q += u,
        }
        k += 1;
    }
    let (s, c) = x.sin_cos();
    let cos_w = (c + s) * FRAC_1_SQRT_2;
    let sin_w = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_w - q * sin_w)
}

/// Leading large-argument term `J_0(2 pi r) ~ cos(2 pi r - pi/4) / (pi sqrt r)`.
///
/// Validation only; the sampler never calls it.
pub fn bessel_j0_asymptotic(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("asymptotic J0 needs r > 0, got {r}")));
    }
    let (s, c) = (2.0 * PI * r).sin_cos();
    Ok((c + s) * FRAC_1_SQRT_2 / (PI * r.sqrt()))
}

/// Probabilists' Hermite polynomial `He_n(u)`.
pub fn hermite(n: i32, u: f64) -> Result<f64> {
    match n {
        n if n < 0 => Err(Error::domain(format!("hermite order must be >= 0, got {n}"))),
        0 => Ok(1.0),
        1 => Ok(u),
        2 => Ok(h2(u)),
        3 => Ok(u * (u * u - 3.0)),
        4 => Ok(h4(u)),
        n => {
            let (mut prev, mut cur) = (h3(u), h4(u));
            for k in 4..n {
                let next = u * cur - k as f64 * prev;
                prev = cur;
                cur = next;
            }
            Ok(cur)
        }
    }
}

#[inline]
pub fn h2(u: f64) -> f64 {
    u * u - 1.0
}

#[inline]
fn h3(u: f64) -> f64 {
    u * (u * u - 3.0)
}

#[inline]
pub fn h4(u: f64) -> f64 {
    let u2 = u * u;
    u2 * u2 - 6.0 * u2 + 3.0
}

/// Wavenumber `k = 2 pi sqrt(E)` of the random wave at energy `E`, so that
/// `Var(d_j B) = k^2/2 = 2 pi^2 E` and the Helmholtz eigenvalue is `k^2`.
pub fn wavenumber(energy: f64) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::domain(format!("energy must be positive, got {energy}")));
    }
    Ok(2.0 * PI * energy.sqrt())
}

/// Covariance `E[B(x) B(y)] = J_0(k |x - y|)` at distance `r`.
pub fn covariance(energy: f64, r: f64) -> Result<f64> {
    let k = wavenumber(energy)?;
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("distance must be >= 0, got {r}")));
    }
    Ok(j0(k * r))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIRST_ZERO: f64 = 2.404825557695773;

    #[test]
    fn j0_at_origin_and_parity() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        for t in [0.3, 5.0, 11.99, 12.01, 40.0, 987.6] {
            assert_eq!(j0(t), j0(-t));
        }
    }

    #[test]
    fn j0_first_zero() {
        assert!(bessel_j0(FIRST_ZERO).unwrap().abs() < 1e-10);
    }

    #[test]
    fn j0_regimes_agree_near_cutoff() {
        for t in [11.5, 11.9, 12.0] {
            assert!((j0_series(t) - j0_hankel(t)).abs() < 5e-11, "t = {t}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(bessel_j0(f64::NAN), Err(Error::Domain(_))));
        assert!(bessel_j0(f64::INFINITY).is_err());
        assert!(bessel_j0_asymptotic(0.0).is_err());
        assert!(bessel_j0_asymptotic(-1.0).is_err());
    }

    #[test]
    fn asymptotic_is_bounded_by_envelope() {
        let v = bessel_j0_asymptotic(10.0).unwrap();
        assert!(v.abs() <= 1.0 / (PI * 10f64.sqrt()));
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite(4, 0.0).unwrap(), 3.0);
        assert_eq!(hermite(4, 1.0).unwrap(), -2.0);
        let h2s: Vec<f64> = [0.0, 1.0, 2.0].iter().map(|&u| hermite(2, u).unwrap()).collect();
        assert_eq!(h2s, vec![-1.0, 0.0, 3.0]);
        assert!(hermite(-1, 0.5).is_err());
        // He_5 = u^5 - 10u^3 + 15u
        let u = 1.7;
        assert!((hermite(5, u).unwrap() - (u.powi(5) - 10.0 * u.powi(3) + 15.0 * u)).abs() < 1e-12);
    }

    #[test]
    fn covariance_contract() {
        assert_eq!(covariance(3.0, 0.0).unwrap(), 1.0);
        let r = FIRST_ZERO / wavenumber(1.0).unwrap();
        assert!(covariance(1.0, r).unwrap().abs() < 1e-9);
        for i in 0..50 {
            let r = i as f64 * 0.013;
            assert_eq!(covariance(4.0, r).unwrap(), covariance(1.0, 2.0 * r).unwrap());
        }
        assert!(covariance(0.0, 1.0).is_err());
        assert!(covariance(-2.0, 1.0).is_err());
    }
}
