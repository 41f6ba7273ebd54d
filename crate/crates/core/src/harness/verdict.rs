//! Pass/fail judgements on ensemble statistics.

use serde::{Deserialize, Serialize};

use super::{Estimate, EnergySummary};
use crate::rng::{stream, Purpose};
use crate::stats;

/// Significance level of the normality test.
pub const CLT_ALPHA: f64 = 0.01;
pub const CLT_MIN_REPLICATIONS: usize = 100;
pub const TREND_MIN_REPLICATIONS: usize = 2000;
pub const REDUCTION_MIN_REPLICATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn is_fail(self) -> bool {
        self == Outcome::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltVerdict {
    #[serde(rename = "E")]
    pub energy: f64,
    pub replications: usize,
    pub ks_stat: f64,
    pub ks_pvalue: f64,
    pub w1_stat: f64,
    pub outcome: Outcome,
}

/// Normality of the standardized nodal lengths at one energy.
pub fn clt_verdict(summary: &EnergySummary) -> CltVerdict {
    CltVerdict {
        energy: summary.energy,
        replications: summary.replications,
        ks_stat: summary.ks_stat,
        ks_pvalue: summary.ks_pvalue,
        w1_stat: summary.w1_stat.value,
        outcome: clt_outcome(summary.replications, summary.ks_pvalue),
    }
}

/// The same verdict on an arbitrary sample, standardized first.
pub fn clt_verdict_sample(energy: f64, sample: &[f64]) -> CltVerdict {
    let z = stats::standardize(sample);
    let ks = stats::ks_statistic(&z);
    let p = stats::ks_pvalue(ks, z.len());
    CltVerdict {
        energy,
        replications: z.len(),
        ks_stat: ks,
        ks_pvalue: p,
        w1_stat: stats::wasserstein1_normal(&z),
        outcome: clt_outcome(z.len(), p),
    }
}

fn clt_outcome(n: usize, p: f64) -> Outcome {
    if n < CLT_MIN_REPLICATIONS {
        Outcome::Inconclusive
    } else if p >= CLT_ALPHA {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantTrend {
    pub energies: Vec<f64>,
    pub k4: Vec<Estimate>,
    pub outcome: Outcome,
}

/// Fourth cumulant of the standardized `m_stat` across energies. Passes when
/// the point estimate at the largest energy does not exceed the one at the
/// smallest, or when both are within two standard errors of zero.
pub fn cumulant_trend(summaries: &[EnergySummary]) -> CumulantTrend {
    let energies: Vec<f64> = summaries.iter().map(|s| s.energy).collect();
    let k4: Vec<Estimate> = summaries.iter().map(|s| s.k4).collect();
    let min_r = summaries.iter().map(|s| s.replications).min().unwrap_or(0);
    trend(energies, k4, min_r)
}

/// Trend on raw samples, one per energy; bootstrap SEs come from the
/// `(seed, energy)` bootstrap stream.
pub fn cumulant_trend_samples(samples: &[(f64, Vec<f64>)], seed: u64, bootstrap: usize) -> CumulantTrend {
    let mut energies = Vec::new();
    let mut k4 = Vec::new();
    for (e, xs) in samples {
        let z = stats::standardize(xs);
        let mut rng = stream(seed, *e, Purpose::Bootstrap, 1);
        let se = stats::bootstrap_se(z.len(), bootstrap, &mut rng, |idx| vec![stats::k4(&stats::standardize(&stats::pick(&z, idx)))]);
        energies.push(*e);
        k4.push(Estimate {
            value: stats::k4(&z),
            se: se[0],
        });
    }
    let min_r = samples.iter().map(|(_, xs)| xs.len()).min().unwrap_or(0);
    trend(energies, k4, min_r)
}

fn trend(energies: Vec<f64>, k4: Vec<Estimate>, min_r: usize) -> CumulantTrend {
    let outcome = if k4.len() < 2 || min_r < TREND_MIN_REPLICATIONS {
        Outcome::Inconclusive
    } else {
        let (first, last) = (k4[0], k4[k4.len() - 1]);
        let near_zero = |k: Estimate| k.value.abs() <= 2.0 * k.se;
        if last.value <= first.value || (near_zero(first) && near_zero(last)) {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    };
    CumulantTrend { energies, k4, outcome }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionVerdict {
    pub energies: Vec<f64>,
    pub corr_lm: Vec<f64>,
    pub sq_diff: Vec<f64>,
    /// `corr_residual / se` per energy.
    pub residual_z: Vec<f64>,
    pub outcome: Outcome,
}

/// Correlation of nodal length and rescaled trispectrum grows from the
/// smallest to the largest energy, stays positive, and the mean squared
/// distance of the standardized pair shrinks.
pub fn reduction_verdict(summaries: &[EnergySummary]) -> ReductionVerdict {
    let energies = summaries.iter().map(|s| s.energy).collect();
    let corr_lm: Vec<f64> = summaries.iter().map(|s| s.corr_lm.value).collect();
    let sq_diff: Vec<f64> = summaries.iter().map(|s| s.sq_diff.value).collect();
    let residual_z = summaries.iter().map(|s| s.corr_residual.value / s.corr_residual.se).collect();
    let min_r = summaries.iter().map(|s| s.replications).min().unwrap_or(0);
    let outcome = if summaries.len() < 2 || min_r < REDUCTION_MIN_REPLICATIONS {
        Outcome::Inconclusive
    } else {
        let n = summaries.len() - 1;
        if corr_lm[n] > corr_lm[0] && corr_lm[0] > 0.0 && sq_diff[n] < sq_diff[0] {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    };
    ReductionVerdict {
        energies,
        corr_lm,
        sq_diff,
        residual_z,
        outcome,
    }
}
