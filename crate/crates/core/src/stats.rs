//! Sample statistics used by the ensemble harness.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Center and scale by the population standard deviation, so the result has
/// mean 0 and `mean(z^2) = 1`.
pub fn standardize(xs: &[f64]) -> Vec<f64> {
    let m = mean(xs);
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    xs.iter().map(|x| (x - m) / sd).collect()
}

/// Fourth k-statistic, the unbiased estimator of the fourth cumulant.
pub fn k4(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let (mut s2, mut s4) = (0.0, 0.0);
    for x in xs {
        let d2 = (x - m).powi(2);
        s2 += d2;
        s4 += d2 * d2;
    }
    let (m2, m4) = (s2 / n, s4 / n);
    n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Kolmogorov-Smirnov distance `sup |F_n - Phi|`.
pub fn ks_statistic(xs: &[f64]) -> f64 {
    let v = sorted(xs);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = normal_cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Asymptotic p-value of the one-sample KS test with Stephens' finite-`n`
/// correction of the statistic.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Order-1 Wasserstein distance between the empirical law of `xs` and
/// `N(0, 1)`, i.e. `int |F_n(x) - Phi(x)| dx`, integrated exactly piece by
/// piece.
pub fn wasserstein1_normal(xs: &[f64]) -> f64 {
    let v = sorted(xs);
    let n = v.len();
    // antiderivatives: int Phi = x Phi + phi, int (1 - Phi) = -(x (1 - Phi) - phi)
    let g = |x: f64| x * normal_cdf(x) + normal_pdf(x);
    let upper_tail = |x: f64| normal_pdf(x) - x * 0.5 * libm::erfc(x * FRAC_1_SQRT_2);
    let mut total = g(v[0]) + upper_tail(v[n - 1]);
    for i in 1..n {
        let (a, b) = (v[i - 1], v[i]);
        if b <= a {
            continue;
        }
        let c = i as f64 / n as f64;
        // int_a^b |c - Phi|
        let signed = |lo: f64, hi: f64| c * (hi - lo) - (g(hi) - g(lo));
        let (fa, fb) = (normal_cdf(a), normal_cdf(b));
        total += if fb <= c {
            signed(a, b)
        } else if fa >= c {
            -signed(a, b)
        } else {
            let root = bisect(|x| normal_cdf(x) - c, a, b);
            signed(a, root) - signed(root, b)
        };
    }
    total
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Nonparametric bootstrap standard errors of several statistics that share
/// the same resampled index sets. `stat` receives the resampled indices and
/// returns one value per statistic.
pub fn bootstrap_se<R: Rng + ?Sized>(
    n: usize,
    resamples: usize,
    rng: &mut R,
    mut stat: impl FnMut(&[usize]) -> Vec<f64>,
) -> Vec<f64> {
    let mut idx = vec![0usize; n];
    let mut sums: Vec<f64> = Vec::new();
    let mut sums2: Vec<f64> = Vec::new();
    for _ in 0..resamples {
        for slot in idx.iter_mut() {
            *slot = rng.random_range(0..n);
        }
        let values = stat(&idx);
        if sums.is_empty() {
            sums = vec![0.0; values.len()];
            sums2 = vec![0.0; values.len()];
        }
        for ((s, s2), v) in sums.iter_mut().zip(sums2.iter_mut()).zip(values) {
            *s += v;
            *s2 += v * v;
        }
    }
    let b = resamples as f64;
    sums.iter()
        .zip(&sums2)
        .map(|(s, s2)| ((s2 - s * s / b) / (b - 1.0)).max(0.0).sqrt())
        .collect()
}

/// Gather `xs[idx]`.
pub fn pick(xs: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| xs[i]).collect()
}
