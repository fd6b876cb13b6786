//! Markov chain samplers and single-chain diagnostics.

mod diagnostics;
mod gibbs;
mod metropolis;
pub mod trace;

pub use diagnostics::{
    autocorrelation, convergence_gate, effective_sample_size, geweke_z, GateThresholds, DEFAULT_ACF_LAGS,
};
pub use gibbs::{gibbs_skewnormal, gibbs_skewnormal_with, sample_truncated_normal_positive};
pub use metropolis::{rw_metropolis, ChainOutput, RandomWalk};

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Run length, burn-in, thinning and proposal settings of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Starting point in the sampler's coordinates; empty means "let the
    /// model choose".
    #[serde(default)]
    pub initial_point: Vec<f64>,
    /// Per-coordinate proposal standard deviations; empty means "let the
    /// model choose".
    #[serde(default)]
    pub step_scales: Vec<f64>,
    #[serde(default = "default_adapt")]
    pub adapt: bool,
    #[serde(default = "default_target_acceptance")]
    pub target_acceptance: f64,
}

fn default_adapt() -> bool {
    true
}

fn default_target_acceptance() -> f64 {
    SamplerConfig::DEFAULT_TARGET_ACCEPTANCE
}

impl SamplerConfig {
    pub const MIN_RETAINED: usize = 1000;
    pub const DEFAULT_TARGET_ACCEPTANCE: f64 = 0.234;

    pub fn new(n_iterations: usize, burn_in: usize, thin: usize) -> Self {
        Self {
            n_iterations,
            burn_in,
            thin,
            initial_point: Vec::new(),
            step_scales: Vec::new(),
            adapt: true,
            target_acceptance: Self::DEFAULT_TARGET_ACCEPTANCE,
        }
    }

    /// Independent draws with no burn-in or thinning (conjugate models).
    pub fn direct(n_draws: usize) -> Self {
        Self::new(n_draws, 0, 1)
    }

    pub fn with_initial_point(mut self, point: Vec<f64>) -> Self {
        self.initial_point = point;
        self
    }

    pub fn with_step_scales(mut self, scales: Vec<f64>) -> Self {
        self.step_scales = scales;
        self
    }

    pub fn with_adapt(mut self, adapt: bool) -> Self {
        self.adapt = adapt;
        self
    }

    /// `⌊(n_iterations − burn_in)/thin⌋`.
    pub fn retained(&self) -> usize {
        if self.thin == 0 {
            return 0;
        }
        self.n_iterations.saturating_sub(self.burn_in) / self.thin
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be positive".into()));
        }
        if self.burn_in >= self.n_iterations {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} must be smaller than the {} iterations",
                self.burn_in, self.n_iterations
            )));
        }
        if self.retained() < Self::MIN_RETAINED {
            return Err(Error::InvalidConfig(format!(
                "only {} draws would be retained; at least {} are required",
                self.retained(),
                Self::MIN_RETAINED
            )));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::InvalidConfig("target acceptance must lie in (0, 1)".into()));
        }
        if self.step_scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidConfig("step scales must be positive".into()));
        }
        if self.initial_point.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("initial point must be finite".into()));
        }
        Ok(())
    }

    pub(crate) fn check_dimension(&self, dim: usize) -> Result<()> {
        for (what, len) in [
            ("initial point", self.initial_point.len()),
            ("step scales", self.step_scales.len()),
        ] {
            if len != 0 && len != dim {
                return Err(Error::InvalidConfig(format!(
                    "{what} has {len} entries, expected {dim}"
                )));
            }
        }
        Ok(())
    }
}

/// Retained draws, one row per draw and one named column per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawMatrix {
    names: Vec<String>,
    data: Vec<f64>,
}

impl DrawMatrix {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            data: Vec::new(),
        }
    }

    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let mut m = Self::new(names);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::InvalidConfig(format!(
                "row has {} entries, expected {}",
                row.len(),
                self.names.len()
            )));
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn n_rows(&self) -> usize {
        if self.names.is_empty() {
            0
        } else {
            self.data.len() / self.names.len()
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.n_cols();
        &self.data[i * k..(i + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols().max(1))
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Applies `f` to every value of column `j`.
    pub fn map_column(&mut self, j: usize, f: impl Fn(f64) -> f64) {
        let k = self.n_cols();
        for r in self.data.chunks_exact_mut(k) {
            r[j] = f(r[j]);
        }
    }
}

/// Acceptance, autocorrelation and convergence summary of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub coordinate_names: Vec<String>,
    pub n_retained: usize,
    pub acceptance_rate: f64,
    /// Effective sample size per coordinate; 0 for a constant coordinate.
    pub ess: Vec<f64>,
    /// Autocorrelations per coordinate at lags `0..=DEFAULT_ACF_LAGS`.
    pub acf: Vec<Vec<f64>>,
    pub geweke_z: Vec<f64>,
    /// Proposal scales used after burn-in.
    pub step_scales: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<PathBuf>,
    pub converged: bool,
}

impl ChainReport {
    /// Computes the diagnostics of `draws` and applies the default gate.
    pub fn from_draws(draws: &DrawMatrix, acceptance_rate: f64, step_scales: Vec<f64>) -> Self {
        let mut ess = Vec::with_capacity(draws.n_cols());
        let mut acf = Vec::with_capacity(draws.n_cols());
        let mut geweke = Vec::with_capacity(draws.n_cols());
        for j in 0..draws.n_cols() {
            let col = draws.column(j);
            ess.push(effective_sample_size(&col).unwrap_or(0.0));
            acf.push(autocorrelation(&col, DEFAULT_ACF_LAGS));
            geweke.push(geweke_z(&col));
        }
        let mut report = Self {
            coordinate_names: draws.names().to_vec(),
            n_retained: draws.n_rows(),
            acceptance_rate,
            ess,
            acf,
            geweke_z: geweke,
            step_scales,
            trace_path: None,
            converged: false,
        };
        report.converged = convergence_gate(&report, &GateThresholds::default());
        report
    }

    pub fn min_ess(&self) -> f64 {
        self.ess.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
