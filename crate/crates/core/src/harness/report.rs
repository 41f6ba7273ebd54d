//! Summaries of persisted record files: a JSON report and gnuplot tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::io::{read_records, write_summary};
use super::verdict::{clt_verdict, cumulant_trend, reduction_verdict, CltVerdict, CumulantTrend, ReductionVerdict};
use super::{summarize_records, EnergySummary, SUMMARY_SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::oracle::slope_fit;
use crate::randomwave::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    /// OLS slope of sample `Var(m_stat)` against `ln E`.
    pub slope: f64,
    pub intercept: f64,
    /// The same fit applied to the oracle variances.
    pub oracle_slope: f64,
    /// `area / (512 pi)`.
    pub reference_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub side: f64,
    pub inputs: Vec<PathBuf>,
    pub energies: Vec<EnergySummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub var_m_fit: Option<SlopeReport>,
    pub clt: Vec<CltVerdict>,
    pub reduction: ReductionVerdict,
    pub cumulant: CumulantTrend,
}

impl Report {
    pub fn any_failed(&self) -> bool {
        self.clt.iter().any(|v| v.outcome.is_fail()) || self.reduction.outcome.is_fail() || self.cumulant.outcome.is_fail()
    }
}

/// Build the report from record files and write it to `out_dir`.
pub fn report(inputs: &[PathBuf], domain: &Domain, out_dir: &Path, seed: u64, bootstrap: usize) -> Result<Report> {
    let rep = build_report(inputs, domain, seed, bootstrap)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_summary(&rep, &out_dir.join("report.json"))?;
    for (name, text) in dat_tables(&rep) {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(rep)
}

pub fn build_report(inputs: &[PathBuf], domain: &Domain, seed: u64, bootstrap: usize) -> Result<Report> {
    if inputs.is_empty() {
        return Err(Error::Parse {
            file: PathBuf::new(),
            row: 0,
            message: "no input files".into(),
        });
    }
    let mut records = Vec::new();
    for path in inputs {
        records.extend(read_records(path)?);
    }
    records.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.replication_index.cmp(&b.replication_index)));
    if let Some(w) = records
        .windows(2)
        .find(|w| w[0].energy == w[1].energy && w[0].replication_index == w[1].replication_index)
    {
        return Err(Error::Data(format!(
            "replication {} at E = {} appears twice",
            w[0].replication_index, w[0].energy
        )));
    }
    let energies = summarize_records(&records, domain, seed, bootstrap)?;
    let var_m_fit = if energies.len() >= 3 {
        let es: Vec<f64> = energies.iter().map(|s| s.energy).collect();
        let sample: Vec<f64> = energies.iter().map(|s| s.m_stat.variance).collect();
        let oracle: Vec<f64> = energies.iter().map(|s| s.var_m_oracle).collect();
        let (slope, intercept) = slope_fit(&es, &sample)?;
        let (oracle_slope, _) = slope_fit(&es, &oracle)?;
        Some(SlopeReport {
            slope,
            intercept,
            oracle_slope,
            reference_slope: domain.area() / (512.0 * std::f64::consts::PI),
        })
    } else {
        None
    };
    Ok(Report {
        schema_version: SUMMARY_SCHEMA_VERSION,
        side: domain.side(),
        inputs: inputs.to_vec(),
        clt: energies.iter().map(clt_verdict).collect(),
        reduction: reduction_verdict(&energies),
        cumulant: cumulant_trend(&energies),
        energies,
        var_m_fit,
    })
}

/// Whitespace-separated tables, one row per energy.
pub fn dat_tables(rep: &Report) -> Vec<(&'static str, String)> {
    let mut corr = String::from("# E corr_LM se corr_residual se sq_diff se cov_LM se cov_LM_oracle\n");
    let mut var = String::from("# logE var_m se var_m_oracle var_L se var_l4 se\n");
    let mut norm = String::from("# E ks_stat ks_pvalue w1 se k4 se\n");
    for s in &rep.energies {
        let _ = writeln!(
            corr,
            "{} {} {} {} {} {} {} {} {} {}",
            s.energy,
            s.corr_lm.value,
            s.corr_lm.se,
            s.corr_residual.value,
            s.corr_residual.se,
            s.sq_diff.value,
            s.sq_diff.se,
            s.cov_lm.value,
            s.cov_lm.se,
            s.cov_lm_oracle
        );
        let _ = writeln!(
            var,
            "{} {} {} {} {} {} {} {}",
            s.energy.ln(),
            s.m_stat.variance,
            s.m_stat.variance_se,
            s.var_m_oracle,
            s.nodal_len.variance,
            s.nodal_len.variance_se,
            s.l4.variance,
            s.l4.variance_se
        );
        let _ = writeln!(
            norm,
            "{} {} {} {} {} {} {}",
            s.energy, s.ks_stat, s.ks_pvalue, s.w1_stat.value, s.w1_stat.se, s.k4.value, s.k4.se
        );
    }
    vec![("corr_vs_E.dat", corr), ("var_vs_logE.dat", var), ("normality_vs_E.dat", norm)]
}
