//! Normal populations: conjugate Normal–Gamma posterior under the prior
//! `g₀(μ, φ) ∝ 1/φ`, with `φ` the precision.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::sample::Sample;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalGammaParams<T = f64> {
    pub eta: T,
    pub nu: T,
    pub alpha: T,
    pub beta: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalDraw<T = f64> {
    pub mu: T,
    /// Precision, `1/σ²`.
    pub phi: T,
}

/// `(η, ν, α, β) = (x̄, n, (n − 1)/2, n·s²/2)`.
pub fn normal_posterior_params<T: Real>(sample: &Sample<T>) -> Result<NormalGammaParams<T>> {
    if !(sample.sd() > T::zero()) {
        return Err(Error::DegenerateData(
            "zero standard deviation; the precision posterior is improper".into(),
        ));
    }
    let n = T::from_count(sample.n());
    let half = T::lit(0.5);
    Ok(NormalGammaParams {
        eta: sample.mean(),
        nu: n,
        alpha: half * (n - T::one()),
        beta: half * n * sample.sd() * sample.sd(),
    })
}

/// Unnormalised log density of the Normal–Gamma posterior:
/// `(α − ½)·ln φ − β·φ − ν·φ·(μ − η)²/2`.
pub fn normal_log_posterior<T: Real>(draw: &NormalDraw<T>, params: &NormalGammaParams<T>) -> T {
    let half = T::lit(0.5);
    let d = draw.mu - params.eta;
    (params.alpha - half) * draw.phi.ln() - params.beta * draw.phi - half * params.nu * draw.phi * d * d
}

/// `(∂/∂μ, ∂/∂φ)` of [`normal_log_posterior`].
pub fn normal_log_posterior_gradient<T: Real>(draw: &NormalDraw<T>, params: &NormalGammaParams<T>) -> [T; 2] {
    let half = T::lit(0.5);
    let d = draw.mu - params.eta;
    [
        -params.nu * draw.phi * d,
        (params.alpha - half) / draw.phi - params.beta - half * params.nu * d * d,
    ]
}

/// Direct conjugate draws: `φ ~ Gamma(α, rate β)`, `μ | φ ~ N(η, 1/(ν·φ))`.
pub fn sample_normal_gamma(params: &NormalGammaParams<f64>, n_draws: usize, seed: u64) -> Result<Vec<NormalDraw>> {
    sample_normal_gamma_with(params, n_draws, &mut rng::stream(seed, &[]))
}

pub fn sample_normal_gamma_with<R: Rng + ?Sized>(
    params: &NormalGammaParams<f64>,
    n_draws: usize,
    rng: &mut R,
) -> Result<Vec<NormalDraw>> {
    if n_draws == 0 {
        return Err(Error::InvalidConfig("n_draws must be at least 1".into()));
    }
    if !(params.nu > 0.0 && params.alpha > 0.0 && params.beta > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "Normal-Gamma parameters must be positive: {params:?}"
        )));
    }
    let gamma = Gamma::new(params.alpha, params.beta.recip()).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok((0..n_draws)
        .map(|_| {
            // Gamma draws can underflow to 0 for tiny shapes; such a draw
            // would have infinite variance and is nudged to the smallest
            // positive precision.
            let phi = gamma.sample(rng).max(f64::MIN_POSITIVE);
            let z: f64 = StandardNormal.sample(rng);
            NormalDraw {
                mu: params.eta + z / (params.nu * phi).sqrt(),
                phi,
            }
        })
        .collect())
}

/// `1/(|μ|·√φ)`.
pub fn cv_normal<T: Real>(draw: &NormalDraw<T>) -> Result<T> {
    if draw.mu == T::zero() {
        return Err(Error::UndefinedCv);
    }
    Ok((draw.mu.abs() * draw.phi.sqrt()).recip())
}
