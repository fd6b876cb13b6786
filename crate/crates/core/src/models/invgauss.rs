//! Inverse Gaussian populations under the prior `g₀(μ, λ) ∝ 1/√(μ³λ)`.
//!
//! The posterior depends on the data only through `n`, the arithmetic mean
//! `x̄` and the harmonic mean `a`:
//! `ln g₁ = ((n−1)/2)·ln λ − (3/2)·ln μ − (nλ/2)·(x̄/μ² − 2/μ + 1/a)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvGaussDraw<T = f64> {
    pub mu: T,
    pub lambda: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGaussPosterior<T = f64> {
    n: T,
    mean: T,
    inv_harmonic: T,
}

impl<T: Real> InvGaussPosterior<T> {
    pub fn new(sample: &Sample<T>) -> Result<Self> {
        sample.require_positive()?;
        let a = sample.harmonic_mean().expect("checked by require_positive");
        Ok(Self {
            n: T::from_count(sample.n()),
            mean: sample.mean(),
            inv_harmonic: a.recip(),
        })
    }

    fn quadratic(&self, mu: T) -> T {
        self.mean / (mu * mu) - T::lit(2.0) / mu + self.inv_harmonic
    }

    /// Unnormalised log posterior; `-∞` outside the positive quadrant.
    pub fn log_density(&self, draw: &InvGaussDraw<T>) -> T {
        if !(draw.mu > T::zero() && draw.lambda > T::zero()) {
            return T::neg_infinity();
        }
        let half = T::lit(0.5);
        half * (self.n - T::one()) * draw.lambda.ln()
            - T::lit(1.5) * draw.mu.ln()
            - half * self.n * draw.lambda * self.quadratic(draw.mu)
    }

    /// `(∂/∂μ, ∂/∂λ)` of [`Self::log_density`].
    pub fn gradient(&self, draw: &InvGaussDraw<T>) -> [T; 2] {
        let (mu, lambda) = (draw.mu, draw.lambda);
        let half = T::lit(0.5);
        let d_mu = T::lit(-1.5) / mu + self.n * lambda * (self.mean / (mu * mu * mu) - (mu * mu).recip());
        let d_lambda = half * (self.n - T::one()) / lambda - half * self.n * self.quadratic(mu);
        [d_mu, d_lambda]
    }

    /// Maximum-likelihood point `(x̄, 1/(1/a − 1/x̄))`, used to start chains.
    /// `None` when all observations coincide.
    pub fn mle(&self) -> Option<InvGaussDraw<T>> {
        let excess = self.inv_harmonic - self.mean.recip();
        (excess > T::zero()).then(|| InvGaussDraw {
            mu: self.mean,
            lambda: excess.recip(),
        })
    }

    pub fn n(&self) -> T {
        self.n
    }
}

pub fn invgauss_log_posterior<T: Real>(draw: &InvGaussDraw<T>, sample: &Sample<T>) -> Result<T> {
    Ok(InvGaussPosterior::new(sample)?.log_density(draw))
}

/// `√(μ/λ)`.
pub fn cv_invgauss<T: Real>(draw: &InvGaussDraw<T>) -> Result<T> {
    if !(draw.mu > T::zero() && draw.lambda > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "inverse Gaussian parameters must be positive: {draw:?}"
        )));
    }
    Ok((draw.mu / draw.lambda).sqrt())
}

/// Skewness of the inverse Gaussian law, `3√(μ/λ)`.
pub fn invgauss_skewness<T: Real>(draw: &InvGaussDraw<T>) -> T {
    T::lit(3.0) * (draw.mu / draw.lambda).sqrt()
}
