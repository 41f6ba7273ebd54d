//! Independent checks of the deterministic covariance-integral oracle.

use nodal_lab::harness::{run_energy, ExperimentPlan};
use nodal_lab::oracle::{cov_l4_m_oracle, pair_kernel_integral};
use nodal_lab::randomwave::Domain;
use nodal_lab::rng::{stream, Purpose};
use nodal_lab::specfun::{j0, wavenumber};
use nodal_lab::stats;
use rand::Rng;

/// Randomly shifted Kronecker lattice in four dimensions (generalized golden
/// ratio), averaged over independent shifts.
fn qmc_pair_integral(kernel: impl Fn(f64) -> f64, points: usize, shifts: usize) -> (f64, f64) {
    // phi solves x^5 = x + 1
    let mut phi = 1.5f64;
    for _ in 0..100 {
        phi = (1.0 + phi).powf(0.2);
    }
    let alpha: [f64; 4] = std::array::from_fn(|i| phi.powi(-(i as i32 + 1)));
    let mut rng = stream(5, 0.0, Purpose::Validation, 0);
    let per_shift = points / shifts;
    let estimates: Vec<f64> = (0..shifts)
        .map(|_| {
            let shift: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
            let mut acc = 0.0;
            for n in 0..per_shift {
                let p: [f64; 4] = std::array::from_fn(|i| (shift[i] + n as f64 * alpha[i]).fract());
                acc += kernel((p[0] - p[2]).hypot(p[1] - p[3]));
            }
            acc / per_shift as f64
        })
        .collect();
    (stats::mean(&estimates), (stats::variance(&estimates) / shifts as f64).sqrt())
}

#[test]
fn fourth_power_kernel_against_quasi_monte_carlo() {
    let energy = 100.0;
    let k = wavenumber(energy).unwrap();
    let oracle = pair_kernel_integral(energy, 4, &Domain::unit()).unwrap();
    let (qmc, se) = qmc_pair_integral(|r| j0(k * r).powi(4), 10_000_000, 20);
    assert!(oracle.est_error < 1e-9, "{}", oracle.est_error);
    assert!((qmc - oracle.value).abs() <= 3.0 * se, "qmc {qmc} +/- {se} vs {}", oracle.value);
    assert!(se / oracle.value < 2e-3, "qmc too coarse: {se}");
}

#[test]
fn second_power_kernel_against_quasi_monte_carlo() {
    let energy = 9.0;
    let k = wavenumber(energy).unwrap();
    let oracle = pair_kernel_integral(energy, 2, &Domain::unit()).unwrap();
    let (qmc, se) = qmc_pair_integral(|r| j0(k * r).powi(2), 2_000_000, 20);
    assert!((qmc - oracle.value).abs() <= 3.0 * se, "qmc {qmc} +/- {se} vs {}", oracle.value);
}

#[test]
fn covariance_of_nodal_length_with_trispectrum_matches_oracle() {
    for (energy, reps) in [(25.0, 2000), (100.0, 1000)] {
        let plan = ExperimentPlan::new(vec![energy], reps, 2);
        let recs = run_energy(&plan, energy).unwrap();
        let col = |f: fn(&nodal_lab::chaos::ChaosRecord) -> f64| recs.iter().map(f).collect::<Vec<_>>();
        let (len, l4, m) = (col(|r| r.nodal_len), col(|r| r.l4), col(|r| r.m_stat));
        let cov = |a: &[f64], b: &[f64]| stats::pearson(a, b) * (stats::variance(a) * stats::variance(b)).sqrt();
        let mut rng = stream(2, energy, Purpose::Bootstrap, 9);
        let se = stats::bootstrap_se(reps, 200, &mut rng, |idx| {
            let p = |xs: &[f64]| stats::pick(xs, idx);
            vec![cov(&p(&len), &p(&m)), cov(&p(&l4), &p(&m))]
        });
        let want = cov_l4_m_oracle(energy, &Domain::unit()).unwrap();
        let (c_len, c_l4) = (cov(&len, &m), cov(&l4, &m));
        assert!((c_len - want).abs() <= 3.0 * se[0], "E = {energy}: Cov(L, M) = {c_len} +/- {} vs {want}", se[0]);
        assert!((c_l4 - want).abs() <= 3.0 * se[1], "E = {energy}: Cov(l4, M) = {c_l4} +/- {} vs {want}", se[1]);
    }
}
