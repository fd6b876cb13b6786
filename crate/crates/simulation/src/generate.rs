//! Synthetic data for the replication studies.

use cvbdm::{ModelSpec, Sample};
use rand::Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, Normal, Poisson, StandardNormal};

use crate::error::{Result, SimError};
use crate::grid::TrueParams;

/// Redraw budget for samples on which the posterior is undefined.
pub const MAX_REDRAWS: usize = 1000;

/// `n` observations from the population described by `params`.
pub fn simulate_values<R: Rng + ?Sized>(params: &TrueParams, n: usize, rng: &mut R) -> Vec<f64> {
    match *params {
        TrueParams::Normal { mu, sd } => {
            let d = Normal::new(mu, sd).expect("validated parameters");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        TrueParams::InverseGaussian { mu, lambda } => {
            let d = InverseGaussian::new(mu, lambda).expect("validated parameters");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        TrueParams::SkewNormal { mu, sigma, lambda } => {
            let delta = lambda / (1.0 + lambda * lambda).sqrt();
            let rest = (1.0 - delta * delta).sqrt();
            (0..n)
                .map(|_| {
                    let u: f64 = StandardNormal.sample(rng);
                    let e: f64 = StandardNormal.sample(rng);
                    mu + sigma * (delta * u.abs() + rest * e)
                })
                .collect()
        }
        TrueParams::NegativeBinomial { alpha, beta } => {
            // Poisson–Gamma mixture with Gamma rate β
            let g = Gamma::new(alpha, beta.recip()).expect("validated parameters");
            (0..n)
                .map(|_| {
                    let rate: f64 = g.sample(rng);
                    Poisson::new(rate).map_or(0.0, |p| p.sample(rng))
                })
                .collect()
        }
    }
}

/// A sample on which `model`'s posterior is defined, plus the number of
/// draws discarded on the way (e.g. all-zero counts).
pub fn simulate_sample<R: Rng + ?Sized>(
    model: ModelSpec,
    params: &TrueParams,
    n: usize,
    rng: &mut R,
) -> Result<(Sample, usize)> {
    for redraws in 0..=MAX_REDRAWS {
        let sample = Sample::from_values(simulate_values(params, n, rng))?;
        if model.validate(&sample).is_ok() {
            return Ok((sample, redraws));
        }
    }
    Err(SimError::Precondition(format!(
        "no usable {model} sample of size {n} in {MAX_REDRAWS} attempts for {params:?}"
    )))
}
