//! Run configuration: an optional TOML file merged under command-line flags.

use std::path::Path;

use cvbdm::{ModelSpec, SamplerConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_CV_DRAWS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Sampler fields that may be overridden; unset fields keep the model's
/// defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerOverrides {
    pub n_iterations: Option<usize>,
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
    pub initial_point: Option<Vec<f64>>,
    pub step_scales: Option<Vec<f64>>,
    pub adapt: Option<bool>,
    pub target_acceptance: Option<f64>,
}

impl SamplerOverrides {
    /// Fields set in `other` win.
    pub fn merged(mut self, other: SamplerOverrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            n_iterations,
            burn_in,
            thin,
            initial_point,
            step_scales,
            adapt,
            target_acceptance
        );
        self
    }

    pub fn apply(&self, mut config: SamplerConfig) -> SamplerConfig {
        if let Some(v) = self.n_iterations {
            config.n_iterations = v;
        }
        if let Some(v) = self.burn_in {
            config.burn_in = v;
        }
        if let Some(v) = self.thin {
            config.thin = v;
        }
        if let Some(v) = &self.initial_point {
            config.initial_point = v.clone();
        }
        if let Some(v) = &self.step_scales {
            config.step_scales = v.clone();
        }
        if let Some(v) = self.adapt {
            config.adapt = v;
        }
        if let Some(v) = self.target_acceptance {
            config.target_acceptance = v;
        }
        config
    }

    pub fn is_empty(&self) -> bool {
        *self == SamplerOverrides::default()
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<ModelSpec>,
    pub seed: Option<u64>,
    pub n_cv_draws: Option<usize>,
    pub output_format: Option<OutputFormat>,
    pub emit_traces: Option<bool>,
    #[serde(default)]
    pub sampler: SamplerOverrides,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// Values set in `flags` win.
    pub fn merged(self, flags: ConfigFile) -> Self {
        ConfigFile {
            model: flags.model.or(self.model),
            seed: flags.seed.or(self.seed),
            n_cv_draws: flags.n_cv_draws.or(self.n_cv_draws),
            output_format: flags.output_format.or(self.output_format),
            emit_traces: flags.emit_traces.or(self.emit_traces),
            sampler: self.sampler.merged(flags.sampler),
        }
    }

    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let model = self.model.unwrap_or(ModelSpec::Normal);
        let n_cv_draws = self.n_cv_draws.unwrap_or(DEFAULT_CV_DRAWS);
        let base = if model.uses_mcmc() {
            model.default_config()
        } else {
            SamplerConfig::direct(n_cv_draws)
        };
        let sampler = self.sampler.apply(base);
        sampler.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(RunConfig {
            model,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            n_cv_draws: sampler.retained(),
            sampler,
            output_format: self.output_format.unwrap_or(OutputFormat::Json),
            emit_traces: self.emit_traces.unwrap_or(false),
        })
    }
}

/// Fully resolved settings of one comparison, echoed in its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub seed: u64,
    /// CV draws per population before undefined ones are dropped.
    pub n_cv_draws: usize,
    pub sampler: SamplerConfig,
    pub output_format: OutputFormat,
    pub emit_traces: bool,
}
