//! The JSON report of `cvbdm compare`.
//!
//! Non-finite diagnostics (a Geweke score of a constant chain, say) are
//! written as `null` so that every report parses back.

use cvbdm::{BdmResult, ChainReport, UnimodalityReport};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: &str = "1.0";
pub const TRACE_FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Software {
    pub name: String,
    pub version: String,
}

impl Software {
    pub fn current() -> Self {
        Self {
            name: "cvbdm".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub coordinate_names: Vec<String>,
    pub n_retained: usize,
    pub acceptance_rate: f64,
    pub ess: Vec<Option<f64>>,
    pub geweke_z: Vec<Option<f64>>,
    /// Lag-1 autocorrelation per coordinate.
    pub acf_lag1: Vec<Option<f64>>,
    pub step_scales: Vec<f64>,
    pub converged: bool,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl From<&ChainReport> for ChainDiagnostics {
    fn from(r: &ChainReport) -> Self {
        Self {
            coordinate_names: r.coordinate_names.clone(),
            n_retained: r.n_retained,
            acceptance_rate: r.acceptance_rate,
            ess: r.ess.iter().copied().map(finite).collect(),
            geweke_z: r.geweke_z.iter().copied().map(finite).collect(),
            acf_lag1: r.acf.iter().map(|a| a.get(1).copied().and_then(finite)).collect(),
            step_scales: r.step_scales.clone(),
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationReport {
    pub source: String,
    pub n: usize,
    pub mean: f64,
    /// Standard deviation with divisor `n`.
    pub sd: f64,
    pub cv_estimate: Option<f64>,
    pub posterior_cv_mean: f64,
    pub cv_draws: usize,
    /// Posterior draws dropped because their CV was undefined.
    pub rejected_draws: usize,
    pub chain: Option<ChainDiagnostics>,
    pub trace_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: String,
    pub software: Software,
    /// Seconds since the Unix epoch; absent when timestamps are disabled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub config: RunConfig,
    pub result: BdmResult,
    pub populations: Vec<PopulationReport>,
    /// Unimodality of the paired CV differences; `None` with too few draws.
    pub unimodality: Option<UnimodalityReport>,
    pub converged: bool,
}

impl ComparisonReport {
    pub fn csv_header() -> [&'static str; 12] {
        [
            "model",
            "n1",
            "n2",
            "cv1",
            "cv2",
            "delta_h",
            "mc_se",
            "p_a",
            "p_b",
            "external_side",
            "unimodal",
            "converged",
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        let side = serde_json::to_value(self.result.external_side)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        vec![
            self.config.model.to_string(),
            self.populations[0].n.to_string(),
            self.populations[1].n.to_string(),
            self.populations[0].posterior_cv_mean.to_string(),
            self.populations[1].posterior_cv_mean.to_string(),
            self.result.delta_h.to_string(),
            self.result.mc_se.to_string(),
            self.result.p_a.to_string(),
            self.result.p_b.to_string(),
            side,
            self.unimodality
                .as_ref()
                .map(|u| u.passed.to_string())
                .unwrap_or_default(),
            self.converged.to_string(),
        ]
    }
}
