//! The four population models and a uniform "coefficient-of-variation draws
//! from data" entry point.

pub mod invgauss;
pub mod negbin;
pub mod normal;
pub mod skewnormal;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bdm::ScalarDraws;
use crate::error::{Error, Result};
use crate::mcmc::{gibbs_skewnormal, ChainReport, DrawMatrix, RandomWalk, SamplerConfig};
use crate::rng;
use crate::sample::Sample;

use invgauss::{cv_invgauss, InvGaussDraw, InvGaussPosterior};
use negbin::{cv_negbin, NegBinDraw, NegBinPosterior};
use normal::{cv_normal, normal_posterior_params, sample_normal_gamma, NormalDraw};
use skewnormal::{cv_skewnormal, SkewNormalDraw, SkewNormalPosterior};

/// Fraction of undefined-CV draws above which a warning is logged.
pub const REJECTION_WARNING_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSpec {
    Normal,
    #[serde(rename = "invgauss")]
    InverseGaussian,
    #[serde(rename = "skewnormal")]
    SkewNormal,
    #[serde(rename = "negbin")]
    NegativeBinomial,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 4] = [
        ModelSpec::Normal,
        ModelSpec::InverseGaussian,
        ModelSpec::SkewNormal,
        ModelSpec::NegativeBinomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelSpec::Normal => "normal",
            ModelSpec::InverseGaussian => "invgauss",
            ModelSpec::SkewNormal => "skewnormal",
            ModelSpec::NegativeBinomial => "negbin",
        }
    }

    /// Names of the parameter block, in `DrawMatrix` column order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelSpec::Normal => &["mu", "phi"],
            ModelSpec::InverseGaussian => &["mu", "lambda"],
            ModelSpec::SkewNormal => &["mu", "sigma", "lambda"],
            ModelSpec::NegativeBinomial => &["alpha", "beta"],
        }
    }

    pub fn uses_mcmc(self) -> bool {
        self != ModelSpec::Normal
    }

    /// Run sizes used when the caller supplies none.
    pub fn default_config(self) -> SamplerConfig {
        match self {
            ModelSpec::Normal => SamplerConfig::direct(100_000),
            ModelSpec::InverseGaussian => SamplerConfig::new(200_000, 10_000, 5),
            ModelSpec::SkewNormal => SamplerConfig::new(600_000, 60_000, 18),
            ModelSpec::NegativeBinomial => SamplerConfig::new(130_000, 30_000, 1),
        }
    }

    /// Checks that `sample` carries what this model's posterior needs.
    pub fn validate(self, sample: &Sample) -> Result<()> {
        match self {
            ModelSpec::Normal => normal_posterior_params(sample).map(|_| ()),
            ModelSpec::InverseGaussian => InvGaussPosterior::new(sample).map(|_| ()),
            ModelSpec::SkewNormal => SkewNormalPosterior::new(sample).map(|_| ()),
            ModelSpec::NegativeBinomial => NegBinPosterior::new(sample).map(|_| ()),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelSpec::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown model '{s}' (expected normal, invgauss, skewnormal or negbin)"
                ))
            })
    }
}

/// Posterior CV draws of one population.
#[derive(Debug, Clone)]
pub struct CvDraws {
    pub draws: ScalarDraws,
    /// Parameter draws whose CV was undefined and were dropped.
    pub rejected: usize,
    /// Parameter draws in natural coordinates, including rejected ones.
    pub params: DrawMatrix,
    /// Chain diagnostics; `None` for the conjugate Normal model.
    pub chain: Option<ChainReport>,
}

/// Draws the posterior of `model`'s parameters given `sample` and maps each
/// draw to its coefficient of variation.
///
/// For the Normal model `config.retained()` independent draws are taken.
/// The Inverse Gaussian and Negative Binomial models run random-walk
/// Metropolis on the log of their (positive) parameters; there
/// `initial_point` is given in natural parameters and `step_scales` on the
/// log scale. The Skew-Normal model uses the Gibbs sampler.
pub fn cv_draws(model: ModelSpec, sample: &Sample, config: &SamplerConfig, seed: u64) -> Result<CvDraws> {
    config.validate()?;
    let (params, chain) = match model {
        ModelSpec::Normal => {
            let p = normal_posterior_params(sample)?;
            let draws = sample_normal_gamma(&p, config.retained(), seed)?;
            let rows: Vec<Vec<f64>> = draws.iter().map(|d| vec![d.mu, d.phi]).collect();
            (DrawMatrix::from_rows(names(model), &rows)?, None)
        }
        ModelSpec::InverseGaussian => {
            let post = InvGaussPosterior::new(sample)?;
            let start = post.mle().unwrap_or(InvGaussDraw {
                mu: sample.mean(),
                lambda: 1e3 * sample.mean(),
            });
            let n = post.n();
            let scales = [(start.mu / (n * start.lambda)).sqrt().max(1e-3), (2.0 / n).sqrt()];
            let target = |u: &[f64]| {
                post.log_density(&InvGaussDraw {
                    mu: u[0].exp(),
                    lambda: u[1].exp(),
                }) + u[0]
                    + u[1]
            };
            let chain = PositiveChain {
                start: [start.mu, start.lambda],
                scales,
                forward: |p: [f64; 2]| p,
                back: |p: [f64; 2]| p,
            };
            chain.run(model, target, config, seed)?
        }
        ModelSpec::NegativeBinomial => {
            let post = NegBinPosterior::new(sample)?;
            let start = post.moment_estimate();
            let scale = (2.0 / post.n()).sqrt();
            // coordinates (ln α, ln(α/β)): the mean α/β is pinned by the data,
            // so this pair is close to orthogonal where (ln α, ln β) is not
            let target = |u: &[f64]| {
                let ln_beta = u[0] - u[1];
                post.log_density(&NegBinDraw {
                    alpha: u[0].exp(),
                    beta: ln_beta.exp(),
                }) + u[0]
                    + ln_beta
            };
            let chain = PositiveChain {
                start: [start.alpha, start.beta],
                scales: [scale, scale],
                forward: |[a, b]: [f64; 2]| [a, a / b],
                back: |[a, m]: [f64; 2]| [a, a / m],
            };
            chain.run(model, target, config, seed)?
        }
        ModelSpec::SkewNormal => {
            let (draws, report) = gibbs_skewnormal(sample, config, seed)?;
            (draws, Some(report))
        }
    };

    let mut values = Vec::with_capacity(params.n_rows());
    let mut rejected = 0usize;
    for row in params.rows() {
        let cv = match model {
            ModelSpec::Normal => cv_normal(&NormalDraw {
                mu: row[0],
                phi: row[1],
            }),
            ModelSpec::InverseGaussian => cv_invgauss(&InvGaussDraw {
                mu: row[0],
                lambda: row[1],
            }),
            ModelSpec::SkewNormal => cv_skewnormal(&SkewNormalDraw::new(row[0], row[1], row[2])),
            ModelSpec::NegativeBinomial => cv_negbin(&NegBinDraw {
                alpha: row[0],
                beta: row[1],
            }),
        };
        match cv {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) | Err(Error::UndefinedCv) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    if values.is_empty() {
        return Err(Error::AllCvUndefined);
    }
    let fraction = rejected as f64 / params.n_rows() as f64;
    if fraction > REJECTION_WARNING_FRACTION {
        log::warn!(
            "{model}: {rejected} of {} posterior draws had an undefined CV; the population mean is close to zero",
            params.n_rows()
        );
    }
    Ok(CvDraws {
        draws: ScalarDraws::new(values)?,
        rejected,
        params,
        chain,
    })
}

fn names(model: ModelSpec) -> Vec<String> {
    model.param_names().iter().map(|s| s.to_string()).collect()
}

/// Random-walk Metropolis over the logs of a positive parameter pair
/// `forward(θ)`, reported in natural parameters `θ = back(·)`.
struct PositiveChain<F, B> {
    start: [f64; 2],
    scales: [f64; 2],
    forward: F,
    back: B,
}

impl<F: Fn([f64; 2]) -> [f64; 2], B: Fn([f64; 2]) -> [f64; 2]> PositiveChain<F, B> {
    fn run<T: Fn(&[f64]) -> f64>(
        self,
        model: ModelSpec,
        target: T,
        config: &SamplerConfig,
        seed: u64,
    ) -> Result<(DrawMatrix, Option<ChainReport>)> {
        config.check_dimension(2)?;
        let start = match config.initial_point.as_slice() {
            [] => self.start,
            &[a, b] => [a, b],
            _ => unreachable!("dimension checked"),
        };
        if start.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "{model} initial point must be positive, got {start:?}"
            )));
        }
        let mut cfg = config
            .clone()
            .with_initial_point((self.forward)(start).iter().map(|v| v.ln()).collect());
        if cfg.step_scales.is_empty() {
            cfg.step_scales = self.scales.to_vec();
        }
        let out = RandomWalk::new(target, 2).run(&cfg, &mut rng::stream(seed, &[]))?;
        let rows: Vec<Vec<f64>> = out
            .draws
            .rows()
            .map(|r| (self.back)([r[0].exp(), r[1].exp()]).to_vec())
            .collect();
        let draws = DrawMatrix::from_rows(names(model), &rows)?;
        let report = ChainReport::from_draws(&draws, out.acceptance_rate, out.step_scales);
        Ok((draws, Some(report)))
    }
}
