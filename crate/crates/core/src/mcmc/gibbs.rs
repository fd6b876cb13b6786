//! Data-augmentation Gibbs sampler for the skew-normal posterior.
//!
//! Writing `x = μ + ψ·t + τ·ε` with `t ~ N⁺(0, 1)`, `ε ~ N(0, 1)`,
//! `ψ = σδ` and `τ = σ/√(1 + λ²)`, each sweep draws
//!
//! 1. the latent `tᵢ` from their truncated-normal full conditionals;
//! 2. `μ` from its Normal full conditional;
//! 3. `(ψ, τ²)` by an independence Metropolis step whose proposal is the
//!    conjugate Normal–inverse-Gamma conditional, corrected by the shape prior;
//! 4. `λ` given `(μ, σ)` with the latents integrated out, by an adaptive
//!    random-walk Metropolis step.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};

use super::{ChainOutput, ChainReport, DrawMatrix, SamplerConfig};
use crate::error::{Error, Result};
use crate::models::skewnormal::{GeneralizedT, SkewNormalPosterior};
use crate::rng;
use crate::sample::Sample;

const DEFAULT_LAMBDA_STEP: f64 = 0.5;
const NAIVE_CUTOFF: f64 = 0.3;

/// `N(mean, sd²)` conditioned on being positive.
pub fn sample_truncated_normal_positive<R: Rng + ?Sized>(mean: f64, sd: f64, rng: &mut R) -> f64 {
    let a = -mean / sd;
    mean + sd * standard_normal_above(a, rng)
}

fn standard_normal_above<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a < NAIVE_CUTOFF {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            if z > a {
                return z;
            }
        }
    }
    // exponential proposal with the optimal rate
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    let exp = Exp::new(rate).expect("positive rate");
    loop {
        let z = a + exp.sample(rng);
        let d = z - rate;
        if rng.random::<f64>().ln() < -0.5 * d * d {
            return z;
        }
    }
}

/// Runs the sampler on a seeded stream; columns are `mu`, `sigma`, `lambda`
/// and the reported acceptance rate is that of the `λ` step.
pub fn gibbs_skewnormal(sample: &Sample, config: &SamplerConfig, seed: u64) -> Result<(DrawMatrix, ChainReport)> {
    let out = gibbs_skewnormal_with(sample, config, &mut rng::stream(seed, &[]))?;
    let report = ChainReport::from_draws(&out.draws, out.acceptance_rate, out.step_scales);
    Ok((out.draws, report))
}

pub fn gibbs_skewnormal_with<R: Rng + ?Sized>(
    sample: &Sample,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<ChainOutput> {
    config.validate()?;
    config.check_dimension(3)?;
    let posterior = SkewNormalPosterior::new(sample)?;
    let x = posterior.values();
    let n = x.len();
    let nf = n as f64;
    let prior: GeneralizedT<f64> = GeneralizedT::shape_prior();

    let (mut mu, mut sigma, mut lambda) = match config.initial_point.as_slice() {
        [] => (sample.mean(), sample.sd(), 0.0),
        &[m, s, l] => (m, s, l),
        _ => unreachable!("dimension checked"),
    };
    if !(sigma > 0.0) || !posterior.log_density(mu, sigma, lambda).is_finite() {
        return Err(Error::NonFiniteInitialDensity);
    }

    let mut step = config.step_scales.get(2).copied().unwrap_or(DEFAULT_LAMBDA_STEP);
    let mut log_step = step.ln();
    let mut frozen: Option<f64> = None;
    let mut t = vec![0.0; n];
    let mut accepted = 0usize;
    let mut draws = DrawMatrix::new(vec!["mu".into(), "sigma".into(), "lambda".into()]);

    for iter in 0..config.n_iterations {
        let in_burn_in = iter < config.burn_in;
        if !in_burn_in && frozen.is_none() {
            frozen = Some(step);
        }

        let delta = lambda / (1.0 + lambda * lambda).sqrt();
        let mut psi = sigma * delta;
        let mut tau = sigma / (1.0 + lambda * lambda).sqrt();

        // 1. latents
        let s2 = sigma * sigma;
        let t_sd = tau / sigma;
        for (ti, &xi) in t.iter_mut().zip(x) {
            *ti = sample_truncated_normal_positive(psi * (xi - mu) / s2, t_sd, rng);
        }

        // 2. location
        let resid_mean = x.iter().zip(&t).map(|(xi, ti)| xi - psi * ti).sum::<f64>() / nf;
        let z: f64 = StandardNormal.sample(rng);
        mu = resid_mean + tau / nf.sqrt() * z;

        // 3. (ψ, τ²)
        let (mut stt, mut syt, mut syy) = (0.0, 0.0, 0.0);
        for (xi, ti) in x.iter().zip(&t) {
            let y = xi - mu;
            stt += ti * ti;
            syt += y * ti;
            syy += y * y;
        }
        let sse = (syy - syt * syt / stt).max(f64::MIN_POSITIVE);
        let precision: f64 = Gamma::new(0.5 * nf, 2.0 / sse).expect("valid gamma").sample(rng);
        let v = precision.recip();
        let z: f64 = StandardNormal.sample(rng);
        let psi_new = syt / stt + (v / stt).sqrt() * z;
        let tau_new = v.sqrt();
        let log_ratio = prior.log_density(psi_new / tau_new) - prior.log_density(psi / tau);
        if log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio {
            psi = psi_new;
            tau = tau_new;
        }
        sigma = (psi * psi + tau * tau).sqrt();
        lambda = psi / tau;

        // 4. shape, latents integrated out
        let current = posterior.log_density_shape(mu, sigma, lambda);
        let z: f64 = StandardNormal.sample(rng);
        let proposal = lambda + step * z;
        let candidate = posterior.log_density_shape(mu, sigma, proposal);
        let log_ratio = candidate - current;
        let accept = candidate.is_finite() && (log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio);
        if accept {
            lambda = proposal;
        }

        if in_burn_in {
            if config.adapt {
                let gain = ((iter + 1) as f64).powf(-0.6);
                let a = if accept { 1.0 } else { 0.0 };
                log_step = (log_step + gain * (a - config.target_acceptance)).clamp(-20.0, 10.0);
                step = log_step.exp();
            }
        } else {
            if accept {
                accepted += 1;
            }
            if (iter - config.burn_in + 1).is_multiple_of(config.thin) {
                draws.push_row(&[mu, sigma, lambda])?;
            }
        }
    }

    Ok(ChainOutput {
        draws,
        acceptance_rate: accepted as f64 / (config.n_iterations - config.burn_in) as f64,
        step_scales: vec![frozen.unwrap_or(step)],
        final_step_scales: vec![step],
    })
}
