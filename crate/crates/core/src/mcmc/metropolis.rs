use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ChainReport, DrawMatrix, SamplerConfig};
use crate::error::{Error, Result};
use crate::rng;

const DEFAULT_STEP: f64 = 0.5;
/// Burn-in iterations before the empirical spread starts shaping the
/// proposal, and the refresh period afterwards.
const SHAPE_WARMUP: usize = 500;
const SHAPE_REFRESH: usize = 200;

/// Retained draws plus what the report needs from the run.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub draws: DrawMatrix,
    /// Post-burn-in acceptance rate.
    pub acceptance_rate: f64,
    /// Proposal scales in force after burn-in.
    pub step_scales: Vec<f64>,
    /// Proposal scales after every post-burn-in iteration would be identical
    /// to these; recorded at the end of the chain for checking.
    pub final_step_scales: Vec<f64>,
}

/// Random-walk Metropolis with a diagonal Gaussian proposal.
///
/// With `adapt` set, the proposal is tuned during burn-in only: a
/// Robbins–Monro recursion on a global log-scale steers the acceptance rate
/// towards the target, and after a warm-up the per-coordinate shape follows
/// the running standard deviations (`2.38/√d` rule). The kernel is frozen at
/// the end of burn-in.
pub struct RandomWalk<F> {
    log_density: F,
    names: Vec<String>,
}

impl<F: Fn(&[f64]) -> f64> RandomWalk<F> {
    pub fn new(log_density: F, dim: usize) -> Self {
        Self {
            log_density,
            names: (0..dim).map(|i| format!("theta[{i}]")).collect(),
        }
    }

    pub fn with_names<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.names = names.into_iter().map(Into::into).collect();
        self
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn run<R: Rng + ?Sized>(&self, config: &SamplerConfig, rng: &mut R) -> Result<ChainOutput> {
        config.validate()?;
        let dim = self.dim();
        config.check_dimension(dim)?;
        if config.initial_point.len() != dim {
            return Err(Error::InvalidConfig(format!(
                "an initial point with {dim} coordinates is required"
            )));
        }

        let mut current = config.initial_point.clone();
        let mut current_lp = (self.log_density)(&current);
        if !current_lp.is_finite() {
            return Err(Error::NonFiniteInitialDensity);
        }

        let mut base = if config.step_scales.is_empty() {
            vec![DEFAULT_STEP; dim]
        } else {
            config.step_scales.clone()
        };
        let mut log_global = 0.0_f64;
        let mut scales: Vec<f64> = base.clone();
        let mut welford = Welford::new(dim);
        let shape_factor = 2.38 / (dim as f64).sqrt();

        let mut draws = DrawMatrix::new(self.names.clone());
        let mut proposal = vec![0.0; dim];
        let mut accepted_after_burn_in = 0usize;
        let mut frozen: Option<Vec<f64>> = None;

        for iter in 0..config.n_iterations {
            let in_burn_in = iter < config.burn_in;
            if !in_burn_in && frozen.is_none() {
                frozen = Some(scales.clone());
            }

            for k in 0..dim {
                let z: f64 = StandardNormal.sample(rng);
                proposal[k] = current[k] + scales[k] * z;
            }
            let lp = (self.log_density)(&proposal);
            let log_ratio = lp - current_lp;
            let accept = lp.is_finite() && (log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio);
            if accept {
                current.copy_from_slice(&proposal);
                current_lp = lp;
            }

            if in_burn_in {
                if config.adapt {
                    let gain = ((iter + 1) as f64).powf(-0.6);
                    let a = if accept { 1.0 } else { 0.0 };
                    log_global = (log_global + gain * (a - config.target_acceptance)).clamp(-30.0, 30.0);
                    welford.push(&current);
                    if iter >= SHAPE_WARMUP && (iter - SHAPE_WARMUP).is_multiple_of(SHAPE_REFRESH) {
                        for (k, sd) in welford.sd().into_iter().enumerate() {
                            if sd > 0.0 && sd.is_finite() {
                                base[k] = shape_factor * sd;
                            }
                        }
                    }
                    let g = log_global.exp();
                    for k in 0..dim {
                        scales[k] = base[k] * g;
                    }
                }
            } else {
                if accept {
                    accepted_after_burn_in += 1;
                }
                if (iter - config.burn_in + 1).is_multiple_of(config.thin) {
                    draws.push_row(&current)?;
                }
            }
        }

        let post = config.n_iterations - config.burn_in;
        Ok(ChainOutput {
            draws,
            acceptance_rate: accepted_after_burn_in as f64 / post as f64,
            step_scales: frozen.unwrap_or_else(|| scales.clone()),
            final_step_scales: scales,
        })
    }
}

/// Random-walk Metropolis on `log_density` with a seeded stream; returns the
/// retained draws and the chain diagnostics.
pub fn rw_metropolis<F: Fn(&[f64]) -> f64>(
    log_density: F,
    config: &SamplerConfig,
    seed: u64,
) -> Result<(DrawMatrix, ChainReport)> {
    let sampler = RandomWalk::new(log_density, config.initial_point.len());
    let out = sampler.run(config, &mut rng::stream(seed, &[]))?;
    let report = ChainReport::from_draws(&out.draws, out.acceptance_rate, out.step_scales);
    Ok((out.draws, report))
}

struct Welford {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    fn new(dim: usize) -> Self {
        Self {
            n: 0.0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1.0;
        for (k, &v) in x.iter().enumerate() {
            let d = v - self.mean[k];
            self.mean[k] += d / self.n;
            self.m2[k] += d * (v - self.mean[k]);
        }
    }

    fn sd(&self) -> Vec<f64> {
        self.m2.iter().map(|m| (m / (self.n - 1.0).max(1.0)).sqrt()).collect()
    }
}
