//! Study grids (read from TOML) and their results.

use std::path::Path;

use cvbdm::{ModelSpec, SamplerConfig, SkewNormalDraw};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Which replication study a grid describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StudyKind {
    /// Rate of `δ_H > threshold` under equal CVs.
    Fncr,
    /// `δ_H` under distinct CVs as the sample size grows.
    Consistency,
    /// Kolmogorov–Smirnov check of `δ_H` against Unif(0, 1).
    Uniformity,
    /// Rate of bootstrap p-values below each level under equal CVs.
    Bootstrap,
}

/// Data-generating parameters of one population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TrueParams {
    SkewNormal { mu: f64, sigma: f64, lambda: f64 },
    Normal { mu: f64, sd: f64 },
    InverseGaussian { mu: f64, lambda: f64 },
    NegativeBinomial { alpha: f64, beta: f64 },
}

impl TrueParams {
    pub fn model(&self) -> ModelSpec {
        match self {
            TrueParams::Normal { .. } => ModelSpec::Normal,
            TrueParams::InverseGaussian { .. } => ModelSpec::InverseGaussian,
            TrueParams::SkewNormal { .. } => ModelSpec::SkewNormal,
            TrueParams::NegativeBinomial { .. } => ModelSpec::NegativeBinomial,
        }
    }

    pub fn true_cv(&self) -> f64 {
        match *self {
            TrueParams::Normal { mu, sd } => sd / mu.abs(),
            TrueParams::InverseGaussian { mu, lambda } => (mu / lambda).sqrt(),
            TrueParams::SkewNormal { mu, sigma, lambda } => {
                cvbdm::cv_skewnormal(&SkewNormalDraw::new(mu, sigma, lambda)).unwrap_or(f64::INFINITY)
            }
            TrueParams::NegativeBinomial { alpha, beta } => ((beta + 1.0) / alpha).sqrt(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TrueParams::Normal { mu, sd } => mu != 0.0 && sd > 0.0,
            TrueParams::InverseGaussian { mu, lambda } => mu > 0.0 && lambda > 0.0,
            TrueParams::SkewNormal { sigma, .. } => sigma > 0.0 && self.true_cv().is_finite(),
            TrueParams::NegativeBinomial { alpha, beta } => alpha > 0.0 && beta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::Precondition(format!(
                "invalid population parameters {self:?}"
            )))
        }
    }
}

/// A published value to compare one cell against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub n1: usize,
    pub n2: usize,
    pub threshold: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyGrid {
    pub study: StudyKind,
    pub model: ModelSpec,
    /// Exactly two populations.
    pub population: Vec<TrueParams>,
    pub sample_sizes: Vec<(usize, usize)>,
    /// `δ_H` thresholds, or significance levels for bootstrap studies.
    #[serde(default)]
    pub thresholds: Vec<f64>,
    pub n_replications: usize,
    /// CV draws per population for the Normal model.
    #[serde(default = "default_posterior_draws")]
    pub n_posterior_draws: usize,
    /// Sampler settings for the MCMC models; the model default when absent.
    #[serde(default)]
    pub sampler: Option<SamplerConfig>,
    #[serde(default = "default_n_boot")]
    pub n_boot: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub full_scale_replications: Option<usize>,
    #[serde(default)]
    pub full_scale_posterior_draws: Option<usize>,
    /// Retain every replication's `δ_H` (or p-value) in the result.
    #[serde(default)]
    pub keep_raw: bool,
    #[serde(default)]
    pub reference: Vec<Reference>,
}

fn default_posterior_draws() -> usize {
    2000
}

fn default_n_boot() -> usize {
    500
}

impl StudyGrid {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let grid: StudyGrid = toml::from_str(text)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            SimError::Toml(t) => SimError::Malformed {
                path: path.to_path_buf(),
                message: t.to_string(),
            },
            other => other,
        })
    }

    /// The same grid at the full published replication and draw counts.
    pub fn at_full_scale(&self) -> Self {
        let mut g = self.clone();
        if let Some(r) = self.full_scale_replications {
            g.n_replications = r;
        }
        if let Some(d) = self.full_scale_posterior_draws {
            g.n_posterior_draws = d;
        }
        g
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(SimError::Precondition(m));
        if self.population.len() != 2 {
            return fail(format!(
                "exactly two populations are required, got {}",
                self.population.len()
            ));
        }
        for p in &self.population {
            p.validate()?;
            if p.model() != self.model {
                return fail(format!("population {p:?} does not match model {}", self.model));
            }
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&(a, b)| a < 2 || b < 2) {
            return fail("sample sizes must be nonempty with every n ≥ 2".into());
        }
        if self.thresholds.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return fail("thresholds must lie strictly between 0 and 1".into());
        }
        if matches!(self.study, StudyKind::Fncr | StudyKind::Bootstrap) && self.thresholds.is_empty() {
            return fail("this study needs at least one threshold".into());
        }
        if self.n_replications == 0 || self.n_posterior_draws == 0 || self.n_boot == 0 {
            return fail("replication, draw and resampling counts must be positive".into());
        }
        if self.study == StudyKind::Bootstrap && self.model != ModelSpec::Normal {
            return fail("bootstrap studies simulate Normal data".into());
        }
        self.sampler_config().validate()?;
        Ok(())
    }

    /// Sampler settings used for every posterior in the study.
    pub fn sampler_config(&self) -> SamplerConfig {
        match (&self.sampler, self.model) {
            (Some(c), _) => c.clone(),
            (None, ModelSpec::Normal) => SamplerConfig::direct(self.n_posterior_draws),
            (None, m) => m.default_config(),
        }
    }

    pub fn cvs_equal(&self) -> bool {
        let (a, b) = (self.population[0].true_cv(), self.population[1].true_cv());
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
    }

    pub fn reference_for(&self, n1: usize, n2: usize, threshold: f64) -> Option<f64> {
        self.reference
            .iter()
            .find(|r| r.n1 == n1 && r.n2 == n2 && (r.threshold - threshold).abs() < 1e-12)
            .map(|r| r.value)
    }
}

/// Convergence bookkeeping over the chains of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ChainSummary {
    pub total: usize,
    /// Chains with acceptance rate in the default band.
    pub acceptance_ok: usize,
    /// Chains whose smallest ESS reaches the default floor.
    pub ess_ok: usize,
    /// Chains passing the full gate, Geweke included.
    pub converged: usize,
    pub min_ess: f64,
    pub min_acceptance: f64,
    pub max_acceptance: f64,
}

impl ChainSummary {
    pub(crate) fn empty() -> Self {
        Self {
            min_ess: f64::INFINITY,
            min_acceptance: f64::INFINITY,
            max_acceptance: f64::NEG_INFINITY,
            ..Self::default()
        }
    }

    pub(crate) fn add(&mut self, report: &cvbdm::ChainReport) {
        let gate = cvbdm::GateThresholds::default();
        let (lo, hi) = gate.acceptance_band;
        self.total += 1;
        self.acceptance_ok += usize::from((lo..=hi).contains(&report.acceptance_rate));
        self.ess_ok += usize::from(report.min_ess() >= gate.min_ess);
        self.converged += usize::from(report.converged);
        self.min_ess = self.min_ess.min(report.min_ess());
        self.min_acceptance = self.min_acceptance.min(report.acceptance_rate);
        self.max_acceptance = self.max_acceptance.max(report.acceptance_rate);
    }

    pub(crate) fn merge(mut self, other: &Self) -> Self {
        self.total += other.total;
        self.acceptance_ok += other.acceptance_ok;
        self.ess_ok += other.ess_ok;
        self.converged += other.converged;
        self.min_ess = self.min_ess.min(other.min_ess);
        self.min_acceptance = self.min_acceptance.min(other.min_acceptance);
        self.max_acceptance = self.max_acceptance.max(other.max_acceptance);
        self
    }

    /// Every chain in band with enough effective draws.
    pub fn all_mixing(&self) -> bool {
        self.acceptance_ok == self.total && self.ess_ok == self.total
    }
}

/// One (sample-size pair, threshold) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub n1: usize,
    pub n2: usize,
    pub threshold: f64,
    pub replications: usize,
    pub exceedances: usize,
    pub rate: f64,
    /// 95% Wilson interval for `rate`.
    pub ci_low: f64,
    pub ci_high: f64,
    pub median: f64,
    pub reference: Option<f64>,
    /// `|rate − reference| ≤ 3·√(reference·(1 − reference)/replications)`.
    pub within_3se: Option<bool>,
}

/// Raw per-replication statistics of one sample-size pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSeries {
    pub n1: usize,
    pub n2: usize,
    pub values: Vec<f64>,
    pub chains: Option<ChainSummary>,
    /// Simulated samples that had to be redrawn because the posterior was
    /// undefined for them.
    pub redrawn_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub study: StudyKind,
    pub model: ModelSpec,
    pub n_replications: usize,
    pub master_seed: u64,
    pub cells: Vec<CellResult>,
    /// Present when the grid asks for raw values, and always for
    /// consistency studies.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SizeSeries>,
    /// Per sample-size pair, for MCMC models.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chains: Vec<ChainSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub uniformity: Vec<crate::study::UniformityResult>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: &str = r#"
study = "fncr"
model = "normal"
sample_sizes = [[10, 10], [10, 50]]
thresholds = [0.9, 0.95]
n_replications = 100
master_seed = 7

[[population]]
mu = 3.0
sd = 1.0

[[population]]
mu = 3.0
sd = 1.0

[[reference]]
n1 = 10
n2 = 10
threshold = 0.9
value = 0.096
"#;

    #[test]
    fn parses_and_validates() {
        let g = StudyGrid::from_toml_str(GRID).unwrap();
        assert_eq!(g.population[0], TrueParams::Normal { mu: 3.0, sd: 1.0 });
        assert_eq!(g.n_posterior_draws, 2000);
        assert!(g.cvs_equal());
        assert_eq!(g.reference_for(10, 10, 0.9), Some(0.096));
        assert_eq!(g.reference_for(10, 50, 0.9), None);
        assert_eq!(g.sampler_config().retained(), 2000);
    }

    #[test]
    fn population_variants() {
        let p: TrueParams = toml::from_str("mu = 1.0\nsigma = 2.0\nlambda = 3.0").unwrap();
        assert_eq!(p.model(), ModelSpec::SkewNormal);
        let p: TrueParams = toml::from_str("mu = 1.0\nlambda = 4.0").unwrap();
        assert_eq!(p.model(), ModelSpec::InverseGaussian);
        assert!((p.true_cv() - 0.5).abs() < 1e-15);
        let p: TrueParams = toml::from_str("alpha = 2.0\nbeta = 1.0").unwrap();
        assert_eq!(p.true_cv(), 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        let bad = GRID.replace("thresholds = [0.9, 0.95]", "thresholds = [0.9, 1.5]");
        assert!(matches!(StudyGrid::from_toml_str(&bad), Err(SimError::Precondition(_))));
        let wrong_model = GRID.replace("model = \"normal\"", "model = \"negbin\"");
        assert!(StudyGrid::from_toml_str(&wrong_model).is_err());
        let syntax = GRID.replace("master_seed = 7", "master_seed = ");
        let err = StudyGrid::from_toml_str(&syntax).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }
}
