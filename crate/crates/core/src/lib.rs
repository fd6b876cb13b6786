//! Bayesian discrepancy measure for the hypothesis that two independent
//! populations share the same coefficient of variation.
//!
//! The measure `δ_H = 1 − 2·min{P(ξ < 0 | x), P(ξ > 0 | x)}` is estimated
//! from paired posterior draws `ξ = φ₁ − φ₂` of the two populations' CVs.
//! Posterior draws come from one of four models:
//!
//! | model | parameters | sampler |
//! |---|---|---|
//! | Normal | `(μ, φ)` | conjugate Normal–Gamma |
//! | Inverse Gaussian | `(μ, λ)` | random-walk Metropolis on the log scale |
//! | Skew-Normal | `(μ, σ, λ)` | data-augmentation Gibbs |
//! | Negative Binomial | `(α, β)` | random-walk Metropolis on the log scale |
//!
//! The measure, the log posteriors and the CV maps are generic over the
//! floating-point type through [`Real`]; the samplers work in `f64`.
//!
//! ```
//! use cvbdm::{bdm_two_populations, cv_draws, rng, ModelSpec, Sample};
//!
//! let men = Sample::from_summary(140, 67.22, 8.46)?;
//! let women = Sample::from_summary(123, 57.0, 8.0)?;
//! let model = ModelSpec::Normal;
//! let config = cvbdm::SamplerConfig::direct(20_000);
//! let a = cv_draws(model, &men, &config, rng::derive_seed(7, &[1]))?;
//! let b = cv_draws(model, &women, &config, rng::derive_seed(7, &[2]))?;
//! let result = bdm_two_populations(&a.draws, &b.draws)?;
//! assert!((0.0..=1.0).contains(&result.delta_h));
//! # Ok::<(), cvbdm::Error>(())
//! ```

// `!(x > 0)` deliberately treats NaN as out of range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bdm;
pub mod error;
pub mod mcmc;
pub mod models;
pub mod rng;
pub mod sample;
pub mod scalar;
pub mod special;
pub mod stats;
pub mod unimodality;

pub use bdm::{
    bdm_from_scalar_draws, bdm_two_populations, bdm_with_median, paired_differences, BdmResult, ExternalSide,
    PartitionCounts, ScalarDraws,
};
pub use error::{Error, Result};
pub use mcmc::{
    convergence_gate, effective_sample_size, gibbs_skewnormal, rw_metropolis, ChainReport, DrawMatrix, GateThresholds,
    SamplerConfig,
};
pub use models::invgauss::{cv_invgauss, invgauss_log_posterior, InvGaussDraw};
pub use models::negbin::{cv_negbin, negbin_log_posterior, NegBinDraw};
pub use models::normal::{
    cv_normal, normal_log_posterior, normal_log_posterior_gradient, normal_posterior_params, sample_normal_gamma,
    NormalDraw, NormalGammaParams,
};
pub use models::skewnormal::{cv_skewnormal, skewnormal_log_posterior, SkewNormalDraw};
pub use models::{cv_draws, CvDraws, ModelSpec};
pub use sample::Sample;
pub use scalar::Real;
pub use unimodality::{check_unimodality, UnimodalityReport};

pub type ScalarDrawsF64 = ScalarDraws<f64>;
pub type ScalarDrawsF32 = ScalarDraws<f32>;
pub type BdmResultF64 = BdmResult<f64>;
pub type BdmResultF32 = BdmResult<f32>;
pub type SampleF64 = Sample<f64>;
pub type SampleF32 = Sample<f32>;
pub type UnimodalityReportF64 = UnimodalityReport<f64>;
pub type UnimodalityReportF32 = UnimodalityReport<f32>;
