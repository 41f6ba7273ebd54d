//! Deterministic second-moment oracles.
//!
//! Double integrals of isotropic kernels over `D x D` are reduced to a 1-D
//! radial integral against the pair-distance measure of the square, then
//! evaluated with adaptive Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::randomwave::Domain;
use crate::specfun::{j0, wavenumber};

/// `int int_{D^2} |J_0(k |x - y|)|^p dx dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelIntegral {
    pub energy: f64,
    pub power: u32,
    pub value: f64,
    pub est_error: f64,
}

const REL_TOL: f64 = 1e-10;
const ABS_TOL: f64 = 1e-14;
const MAX_INTERVALS: usize = 200_000;

/// Density of the distance between two independent uniform points of the
/// unit square (square line picking), supported on `[0, sqrt 2]`.
pub fn unit_square_pair_density(s: f64) -> f64 {
    if !(0.0..=SQRT_2).contains(&s) {
        0.0
    } else if s <= 1.0 {
        2.0 * s * (s * s - 4.0 * s + PI)
    } else {
        let root = (s * s - 1.0).max(0.0).sqrt();
        let arcsec = (1.0 / s).acos();
        2.0 * s * (4.0 * root - (s * s + 2.0 - PI) - 4.0 * arcsec)
    }
}

/// `gamma_D(r)`: pair-distance measure of the square of side `L`, normalized
/// so that its total mass is `area(D)^2`.
pub fn pair_distance_measure(domain: &Domain, r: f64) -> f64 {
    let l = domain.side();
    l.powi(3) * unit_square_pair_density(r / l)
}

/// `int int_{D^2} kernel(|x - y|) dx dy` as a radial integral. Panels are at
/// most `max_panel` wide, so oscillatory kernels should pass a fraction of
/// their period.
pub fn radial_pair_integral(
    domain: &Domain,
    kernel: impl Fn(f64) -> f64,
    max_panel: f64,
) -> Result<(f64, f64)> {
    let l = domain.side();
    let integrand = |r: f64| kernel(r) * pair_distance_measure(domain, r);
    let mut panels = Vec::new();
    for (a, b) in [(0.0, l), (l, domain.diameter())] {
        let count = ((b - a) / max_panel).ceil().max(1.0) as usize;
        let w = (b - a) / count as f64;
        panels.extend((0..count).map(|i| (a + i as f64 * w, if i + 1 == count { b } else { a + (i + 1) as f64 * w })));
    }
    adaptive_gauss_kronrod(integrand, &panels, REL_TOL, ABS_TOL)
}

/// Kernel integral of `|J_0(k r)|^p` over the square, `p` in `{2, 3, 4}`.
pub fn pair_kernel_integral(energy: f64, power: u32, domain: &Domain) -> Result<KernelIntegral> {
    if !(2..=4).contains(&power) {
        return Err(Error::domain(format!("kernel power must be 2, 3 or 4, got {power}")));
    }
    let k = wavenumber(energy)?;
    // quarter period of the J0 oscillation
    let panel = (0.5 * PI / k).min(domain.side() / 8.0);
    let (value, est_error) = radial_pair_integral(domain, |r| j0(k * r).abs().powi(power as i32), panel)?;
    Ok(KernelIntegral {
        energy,
        power,
        value,
        est_error,
    })
}

/// Exact finite-`E` variance of `M_E`:
/// `(2 pi^2 E / 96^2) * 24 * int int J_0(k|x-y|)^4`, from
/// `E[H4(X) H4(Y)] = 4! rho^4` for standard Gaussians with correlation `rho`.
pub fn var_m_oracle(energy: f64, domain: &Domain) -> Result<f64> {
    let integral = pair_kernel_integral(energy, 4, domain)?;
    Ok(2.0 * PI * PI * energy / (96.0 * 96.0) * 24.0 * integral.value)
}

/// Exact finite-`E` covariance of the fourth chaotic projection with `M_E`,
/// which is also `Cov(L_E, M_E)` by orthogonality of the chaoses. With
/// `E[d_i(x) B(y)] = sqrt2 J_1(k r) u_i` the diagram formula reduces it to the
/// radial kernel `8 J_0^4 - 4 J_1^4 - 16 J_0^2 J_1^2` times
/// `-(2 pi^2 E) 24 / (96 * 128)`.
pub fn cov_l4_m_oracle(energy: f64, domain: &Domain) -> Result<f64> {
    let k = wavenumber(energy)?;
    let panel = (0.5 * PI / k).min(domain.side() / 8.0);
    let kernel = |r: f64| {
        let (a, b) = (j0(k * r), libm::j1(k * r));
        let (a2, b2) = (a * a, b * b);
        8.0 * a2 * a2 - 4.0 * b2 * b2 - 16.0 * a2 * b2
    };
    let (value, _) = radial_pair_integral(domain, kernel, panel)?;
    Ok(-2.0 * PI * PI * energy * 24.0 / (96.0 * 128.0) * value)
}

/// Leading log-law `area(D) / (512 pi) * log E`.
pub fn log_law(energy: f64, domain: &Domain) -> f64 {
    domain.area() / (512.0 * PI) * energy.ln()
}

/// Ordinary least squares of `values` against `ln(energies)`; returns
/// `(slope, intercept)`.
pub fn slope_fit(energies: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if energies.len() != values.len() {
        return Err(Error::domain(format!(
            "{} energies but {} values",
            energies.len(),
            values.len()
        )));
    }
    if energies.len() < 3 {
        return Err(Error::domain(format!("slope fit needs at least 3 energies, got {}", energies.len())));
    }
    if energies.iter().any(|&e| !(e > 0.0)) || energies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("energies must be positive and strictly increasing"));
    }
    let xs: Vec<f64> = energies.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::domain("degenerate design in slope fit"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod over an initial partition: bisect the
/// interval with the largest error estimate until the summed estimate meets
/// `rel_tol * |value| + abs_tol`. Returns `(value, error estimate)`.
fn adaptive_gauss_kronrod(
    f: impl Fn(f64) -> f64,
    panels: &[(f64, f64)],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    let mut heap = BinaryHeap::with_capacity(2 * panels.len());
    let (mut value, mut error) = (0.0, 0.0);
    for &(a, b) in panels {
        let (v, e) = gk15(&f, a, b);
        value += v;
        error += e;
        heap.push(Interval { a, b, value: v, error: e });
    }
    while error > rel_tol * value.abs() + abs_tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Domain(format!(
                "quadrature did not converge: value {value:e}, error estimate {error:e}"
            )));
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        value += lv + rv - worst.value;
        error += le + re - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Interval { a: mid, b: worst.b, value: rv, error: re });
    }
    // re-sum in a fixed order to shed the running-update rounding
    let mut parts: Vec<Interval> = heap.into_vec();
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = parts.iter().map(|p| p.value).sum();
    let error = parts.iter().map(|p| p.error).sum();
    Ok((value, error))
}

/// One row of the oracle table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    #[serde(rename = "E")]
    pub energy: f64,
    pub var_m_oracle: f64,
    pub mean_length_formula: f64,
    pub log_law: f64,
    /// `var_m_oracle / log_law`
    pub ratio: f64,
    pub fit_slope: Option<f64>,
    pub fit_intercept: Option<f64>,
    pub reference_slope: f64,
}

/// Oracle table over an energy sweep; the fit columns are filled when at
/// least three energies are given.
pub fn oracle_table(energies: &[f64], domain: &Domain) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::with_capacity(energies.len());
    for &e in energies {
        let v = var_m_oracle(e, domain)?;
        let law = log_law(e, domain);
        rows.push(OracleRow {
            energy: e,
            var_m_oracle: v,
            mean_length_formula: crate::nodal::mean_length_formula(e, domain)?,
            log_law: law,
            ratio: v / law,
            fit_slope: None,
            fit_intercept: None,
            reference_slope: domain.area() / (512.0 * PI),
        });
    }
    if energies.len() >= 3 {
        let values: Vec<f64> = rows.iter().map(|r| r.var_m_oracle).collect();
        let (slope, intercept) = slope_fit(energies, &values)?;
        for r in &mut rows {
            r.fit_slope = Some(slope);
            r.fit_intercept = Some(intercept);
        }
    }
    Ok(rows)
}
