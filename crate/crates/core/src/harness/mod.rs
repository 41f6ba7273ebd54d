//! Ensemble experiments: sample many replications per energy, reduce them to
//! per-energy statistics, and judge the reduction principle and the CLT.

mod io;
mod report;
mod verdict;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos::ChaosRecord;
use crate::error::{Error, Result};
use crate::nodal::{mean_length_formula, nodal_length_value};
use crate::oracle::{cov_l4_m_oracle, var_m_oracle};
use crate::randomwave::{sample_replication, Domain, GridRule, ModeRule, WaveConfig};
use crate::rng::{stream, Purpose};
use crate::stats;

pub use io::{read_records, write_records, write_summary, RecordWriter, RECORDS_HEADER};
pub use report::{build_report, dat_tables, report, Report, SlopeReport};
pub use verdict::{
    clt_verdict, clt_verdict_sample, cumulant_trend, cumulant_trend_samples, reduction_verdict, CltVerdict,
    CumulantTrend, Outcome, ReductionVerdict, CLT_ALPHA, CLT_MIN_REPLICATIONS, REDUCTION_MIN_REPLICATIONS,
    TREND_MIN_REPLICATIONS,
};

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_BOOTSTRAP: usize = 200;
/// Smaller ensembles are run and persisted but not summarized.
pub const MIN_SUMMARY_REPLICATIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub energies: Vec<f64>,
    pub replications: usize,
    pub base_seed: u64,
    pub grid: GridRule,
    pub modes: ModeRule,
    pub domain: Domain,
    /// Per-replication CSV; the JSON summary goes next to it.
    pub output_path: Option<PathBuf>,
    pub bootstrap: usize,
}

impl ExperimentPlan {
    pub fn new(energies: Vec<f64>, replications: usize, base_seed: u64) -> Self {
        Self {
            energies,
            replications,
            base_seed,
            grid: GridRule::default(),
            modes: ModeRule::default(),
            domain: Domain::unit(),
            output_path: None,
            bootstrap: DEFAULT_BOOTSTRAP,
        }
    }

    /// Check the plan, starting with the largest energy, before any sampling.
    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::config(format!("need at least 2 replications, got {}", self.replications)));
        }
        if self.energies.is_empty() {
            return Err(Error::config("no energies given"));
        }
        if self.energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::config("energies must be strictly increasing"));
        }
        if self.bootstrap < 2 {
            return Err(Error::config("need at least 2 bootstrap resamples"));
        }
        for &e in self.energies.iter().rev() {
            self.config(e, 0).map_err(|err| match err {
                Error::Domain(m) => Error::Config(m),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn config(&self, energy: f64, replication_index: u64) -> Result<WaveConfig> {
        WaveConfig::from_rules(energy, self.domain, self.grid, self.modes, self.base_seed, replication_index)
    }
}

/// Mean and variance of one observable with bootstrap standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
}

/// A point estimate with its bootstrap standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Aggregated statistics at one energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    #[serde(rename = "E")]
    pub energy: f64,
    pub replications: usize,
    pub nodal_len: Moments,
    pub m_stat: Moments,
    pub l4: Moments,
    pub h4: Moments,
    /// Pearson correlation of `(nodal_len, m_stat)`.
    pub corr_lm: Estimate,
    /// Sample `Cov(nodal_len, m_stat)`.
    pub cov_lm: Estimate,
    /// Exact `Cov(L, M)` of the model, see [`cov_l4_m_oracle`].
    pub cov_lm_oracle: f64,
    /// Correlation of `(nodal_len - l4, m_stat)`.
    pub corr_residual: Estimate,
    /// Mean of `(L~ - M~)^2` over standardized pairs; equals `2 (1 - corr_lm)`.
    pub sq_diff: Estimate,
    /// `Var(nodal_len) / Var(l4)`.
    pub var_ratio: Estimate,
    pub ks_stat: f64,
    pub ks_pvalue: f64,
    pub w1_stat: Estimate,
    /// Fourth k-statistic of standardized `m_stat`.
    pub k4: Estimate,
    pub var_m_oracle: f64,
    pub mean_length_formula: f64,
    /// Standardized nodal lengths.
    #[serde(skip)]
    pub std_nodal: Vec<f64>,
    /// Standardized `m_stat`.
    #[serde(skip)]
    pub std_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub schema_version: u32,
    pub plan: ExperimentPlan,
    pub energies: Vec<EnergySummary>,
    #[serde(skip)]
    pub records: Vec<ChaosRecord>,
}

impl EnsembleResult {
    pub fn summary(&self, energy: f64) -> Option<&EnergySummary> {
        self.energies.iter().find(|s| s.energy == energy)
    }
}

/// Sample one replication and compute its record.
pub fn simulate_replication(config: &WaveConfig) -> Result<ChaosRecord> {
    let grid = sample_replication(config)?;
    let nodal_len = nodal_length_value(&grid)?;
    ChaosRecord::from_grid(&grid, config.replication_index, nodal_len)
}

/// All replications at one energy, in replication order. Runs on the current
/// rayon pool; the output does not depend on its size.
pub fn run_energy(plan: &ExperimentPlan, energy: f64) -> Result<Vec<ChaosRecord>> {
    (0..plan.replications as u64)
        .into_par_iter()
        .map(|rep| simulate_replication(&plan.config(energy, rep)?))
        .collect()
}

/// Run every energy of the plan. When `plan.output_path` is set, records are
/// appended energy by energy (so a failure keeps what was finished) and the
/// JSON summary is written at the end.
pub fn run_ensemble(plan: &ExperimentPlan) -> Result<EnsembleResult> {
    plan.validate()?;
    let mut writer = match &plan.output_path {
        Some(path) => Some(RecordWriter::create(path)?),
        None => None,
    };
    let mut records = Vec::new();
    let mut energies = Vec::new();
    for &e in &plan.energies {
        let recs = run_energy(plan, e)?;
        if let Some(w) = writer.as_mut() {
            w.append(&recs)?;
        }
        if recs.len() >= MIN_SUMMARY_REPLICATIONS {
            energies.push(summarize(&recs, &plan.domain, plan.base_seed, plan.bootstrap)?);
        }
        records.extend(recs);
    }
    let result = EnsembleResult {
        schema_version: SUMMARY_SCHEMA_VERSION,
        plan: plan.clone(),
        energies,
        records,
    };
    if let Some(path) = &plan.output_path {
        write_summary(&result, &path.with_extension("json"))?;
    }
    Ok(result)
}

/// Run on a dedicated pool of `threads` workers.
pub fn run_ensemble_with_threads(plan: &ExperimentPlan, threads: usize) -> Result<EnsembleResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    pool.install(|| run_ensemble(plan))
}

/// Reduce the records of one energy. Bootstrap resampling draws from the
/// `(seed, energy)` bootstrap stream.
pub fn summarize(records: &[ChaosRecord], domain: &Domain, seed: u64, bootstrap: usize) -> Result<EnergySummary> {
    let n = records.len();
    if n < MIN_SUMMARY_REPLICATIONS {
        return Err(Error::Data(format!("need at least {MIN_SUMMARY_REPLICATIONS} records to summarize, got {n}")));
    }
    let energy = records[0].energy;
    if records.iter().any(|r| r.energy != energy) {
        return Err(Error::Data("records of mixed energies".into()));
    }
    let col = |f: fn(&ChaosRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    let len = col(|r| r.nodal_len);
    let m = col(|r| r.m_stat);
    let l4 = col(|r| r.l4);
    let h4 = col(|r| r.h4);
    let resid: Vec<f64> = len.iter().zip(&l4).map(|(a, b)| a - b).collect();

    let point = |len: &[f64], m: &[f64], l4: &[f64], h4: &[f64], resid: &[f64]| -> Vec<f64> {
        let (zl, zm) = (stats::standardize(len), stats::standardize(m));
        let sq = zl.iter().zip(&zm).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / zl.len() as f64;
        vec![
            stats::mean(len),
            stats::variance(len),
            stats::mean(m),
            stats::variance(m),
            stats::mean(l4),
            stats::variance(l4),
            stats::mean(h4),
            stats::variance(h4),
            stats::pearson(len, m),
            stats::pearson(resid, m),
            sq,
            stats::variance(len) / stats::variance(l4),
            stats::wasserstein1_normal(&zl),
            stats::k4(&zm),
            stats::pearson(len, m) * (stats::variance(len) * stats::variance(m)).sqrt(),
        ]
    };
    let est = point(&len, &m, &l4, &h4, &resid);
    let mut rng = stream(seed, energy, Purpose::Bootstrap, 0);
    let se = stats::bootstrap_se(n, bootstrap, &mut rng, |idx| {
        let p = |xs: &[f64]| stats::pick(xs, idx);
        point(&p(&len), &p(&m), &p(&l4), &p(&h4), &p(&resid))
    });
    let moments = |i: usize| Moments {
        mean: est[i],
        mean_se: se[i],
        variance: est[i + 1],
        variance_se: se[i + 1],
    };
    let at = |i: usize| Estimate {
        value: est[i],
        se: se[i],
    };
    let std_nodal = stats::standardize(&len);
    let ks = stats::ks_statistic(&std_nodal);
    Ok(EnergySummary {
        energy,
        replications: n,
        nodal_len: moments(0),
        m_stat: moments(2),
        l4: moments(4),
        h4: moments(6),
        corr_lm: at(8),
        cov_lm: at(14),
        cov_lm_oracle: cov_l4_m_oracle(energy, domain)?,
        corr_residual: at(9),
        sq_diff: at(10),
        var_ratio: at(11),
        ks_stat: ks,
        ks_pvalue: stats::ks_pvalue(ks, n),
        w1_stat: at(12),
        k4: at(13),
        var_m_oracle: var_m_oracle(energy, domain)?,
        mean_length_formula: mean_length_formula(energy, domain)?,
        std_nodal,
        std_m: stats::standardize(&m),
    })
}

/// Group records by energy (in first-seen order) and summarize each group.
pub fn summarize_records(records: &[ChaosRecord], domain: &Domain, seed: u64, bootstrap: usize) -> Result<Vec<EnergySummary>> {
    let mut energies: Vec<f64> = Vec::new();
    for r in records {
        if !energies.contains(&r.energy) {
            energies.push(r.energy);
        }
    }
    energies
        .iter()
        .map(|&e| {
            let group: Vec<ChaosRecord> = records.iter().filter(|r| r.energy == e).copied().collect();
            summarize(&group, domain, seed, bootstrap)
        })
        .collect()
}
