//! Flat CSV row shapes.

use anyhow::Context;
use nppqo::experiment::{AggregateRow, EfficiencyRow, MinDepthRow, RunRecord, SpectraRecord};
use nppqo::Algorithm;
use serde::{Deserialize, Serialize};

fn join(params: &[f64]) -> String {
    params.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunCsv {
    pub algorithm: String,
    pub n: usize,
    pub instance_seed: u64,
    pub p: Option<usize>,
    pub energy: f64,
    pub epsilon: f64,
    pub p_success: f64,
    pub duration: f64,
    pub n_eval: u64,
    pub i_eff: f64,
    pub wall_time: f64,
    pub code_version: String,
    /// Space-separated optimized parameters.
    pub params: String,
    pub error: String,
}

impl From<&RunRecord> for RunCsv {
    fn from(r: &RunRecord) -> Self {
        RunCsv {
            algorithm: r.algorithm.tag().to_string(),
            n: r.n,
            instance_seed: r.instance_seed,
            p: r.p,
            energy: r.energy,
            epsilon: r.epsilon,
            p_success: r.p_success,
            duration: r.duration,
            n_eval: r.n_eval,
            i_eff: r.efficiency(),
            wall_time: r.wall_time,
            code_version: r.code_version.clone(),
            params: join(&r.params),
            error: r.error.clone().unwrap_or_default(),
        }
    }
}

impl RunCsv {
    pub fn into_record(self) -> anyhow::Result<RunRecord> {
        let params = self
            .params
            .split_whitespace()
            .map(|s| s.parse::<f64>().with_context(|| format!("bad parameter `{s}`")))
            .collect::<anyhow::Result<_>>()?;
        Ok(RunRecord {
            algorithm: self.algorithm.parse::<Algorithm>()?,
            n: self.n,
            instance_seed: self.instance_seed,
            p: self.p,
            energy: self.energy,
            epsilon: self.epsilon,
            p_success: self.p_success,
            duration: self.duration,
            n_eval: self.n_eval,
            wall_time: self.wall_time,
            code_version: self.code_version,
            params,
            error: Some(self.error).filter(|e| !e.is_empty()),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct AggregateCsv {
    pub algorithm: &'static str,
    pub n: usize,
    pub p: Option<usize>,
    pub count: usize,
    pub failures: usize,
    pub mean_epsilon: f64,
    pub mean_p_success: f64,
    pub mean_duration: f64,
    pub mean_n_eval: f64,
}

impl From<&AggregateRow> for AggregateCsv {
    fn from(a: &AggregateRow) -> Self {
        AggregateCsv {
            algorithm: a.algorithm.tag(),
            n: a.n,
            p: a.p,
            count: a.count,
            failures: a.failures,
            mean_epsilon: a.mean_epsilon,
            mean_p_success: a.mean_p_success,
            mean_duration: a.mean_duration,
            mean_n_eval: a.mean_n_eval,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MinDepthCsv {
    pub algorithm: &'static str,
    pub n: usize,
    pub p_min: Option<usize>,
    pub mean_duration_at_p_min: f64,
}

impl From<&MinDepthRow> for MinDepthCsv {
    fn from(m: &MinDepthRow) -> Self {
        MinDepthCsv { algorithm: m.algorithm.tag(), n: m.n, p_min: m.p_min, mean_duration_at_p_min: m.mean_duration }
    }
}

#[derive(Debug, Serialize)]
pub struct EfficiencyCsv {
    pub n: usize,
    pub p: usize,
    pub pairs: usize,
    pub mean_i_eff_standard: f64,
    pub mean_i_eff_adaptive: f64,
    pub r_eff: f64,
    pub baseline: f64,
}

impl From<&EfficiencyRow> for EfficiencyCsv {
    fn from(e: &EfficiencyRow) -> Self {
        EfficiencyCsv {
            n: e.n,
            p: e.p,
            pairs: e.pairs,
            mean_i_eff_standard: e.mean_i_eff_standard,
            mean_i_eff_adaptive: e.mean_i_eff_adaptive,
            r_eff: e.r_eff,
            baseline: e.baseline,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectraCsv {
    pub n: usize,
    pub instance_seed: u64,
    pub setting: &'static str,
    pub relevant_gap: f64,
    pub argmin_lambda: f64,
    pub problem_gap: f64,
    pub bound_holds: bool,
    pub degeneracy: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta: f64,
    pub n_quasi: usize,
    pub n_quasi_levels: usize,
    pub error: String,
}

impl From<&SpectraRecord> for SpectraCsv {
    fn from(s: &SpectraRecord) -> Self {
        SpectraCsv {
            n: s.n,
            instance_seed: s.instance_seed,
            setting: s.setting.tag(),
            relevant_gap: s.relevant_gap,
            argmin_lambda: s.argmin_lambda,
            problem_gap: s.problem_gap,
            bound_holds: s.bound_holds(),
            degeneracy: s.degeneracy,
            lambda_min: s.lambda_min,
            lambda_max: s.lambda_max,
            delta: s.delta,
            n_quasi: s.n_quasi,
            n_quasi_levels: s.n_quasi_levels,
            error: s.error.clone().unwrap_or_default(),
        }
    }
}

/// Success probability against both hardness measures.
#[derive(Debug, Serialize)]
pub struct ScatterCsv {
    pub n: usize,
    pub instance_seed: u64,
    pub setting: &'static str,
    pub p_success: f64,
    pub relevant_gap: f64,
    pub n_quasi: usize,
}

impl From<&SpectraRecord> for ScatterCsv {
    fn from(s: &SpectraRecord) -> Self {
        ScatterCsv {
            n: s.n,
            instance_seed: s.instance_seed,
            setting: s.setting.tag(),
            p_success: s.p_success,
            relevant_gap: s.relevant_gap,
            n_quasi: s.n_quasi,
        }
    }
}
