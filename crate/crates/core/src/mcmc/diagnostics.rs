use rustfft::{num_complex::Complex, FftPlanner};

use super::ChainReport;
use crate::error::{Error, Result};

pub const DEFAULT_ACF_LAGS: usize = 50;

const MIN_ESS_DRAWS: usize = 100;
const ESS_SLACK: f64 = 1.05;

/// Normalised autocovariance at every lag `0..n`, via zero-padded FFT.
/// `None` for a constant series.
fn full_autocorrelation(x: &[f64]) -> Option<Vec<f64>> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let c0 = buf[0].re;
    if !(c0 > 1e-300 * n as f64) {
        return None;
    }
    Some(buf[..n].iter().map(|c| c.re / c0).collect())
}

/// Autocorrelations at lags `0..=max_lag` (biased estimator, so every value
/// lies in `[-1, 1]`). A constant series yields 1 at lag 0 and 0 elsewhere.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let lags = max_lag.min(x.len().saturating_sub(1));
    match full_autocorrelation(x) {
        Some(rho) => rho[..=lags].iter().map(|r| r.clamp(-1.0, 1.0)).collect(),
        None => std::iter::once(1.0)
            .chain(std::iter::repeat(0.0))
            .take(lags + 1)
            .collect(),
    }
}

/// Integrated autocorrelation time from Geyer's initial monotone sequence.
fn autocorrelation_time(x: &[f64]) -> Option<f64> {
    let rho = full_autocorrelation(x)?;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < rho.len() {
        let pair = rho[2 * m] + rho[2 * m + 1];
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        sum += pair;
        prev = pair;
        m += 1;
    }
    Some((2.0 * sum - 1.0).max(ESS_SLACK.recip()))
}

/// `n / (1 + 2 Σ ρ̂_k)`, truncated at the first nonpositive pair sum
/// `ρ̂_{2m} + ρ̂_{2m+1}`; never more than `1.05·n`.
pub fn effective_sample_size(x: &[f64]) -> Result<f64> {
    if x.len() < MIN_ESS_DRAWS {
        return Err(Error::TooFewDraws {
            needed: MIN_ESS_DRAWS,
            got: x.len(),
        });
    }
    let tau = autocorrelation_time(x).ok_or(Error::ConstantChain)?;
    Ok(x.len() as f64 / tau)
}

fn mean_and_variance_of_mean(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let tau = if x.len() >= 4 {
        autocorrelation_time(x).unwrap_or(1.0)
    } else {
        1.0
    };
    (mean, var * tau / n)
}

/// Geweke z-score comparing the first 10% of the chain with the last 50%,
/// each mean's variance corrected for autocorrelation.
pub fn geweke_z(x: &[f64]) -> f64 {
    let n = x.len();
    let head = &x[..(n / 10).max(1)];
    let tail = &x[n - (n / 2).max(1)..];
    let (ma, va) = mean_and_variance_of_mean(head);
    let (mb, vb) = mean_and_variance_of_mean(tail);
    let se = (va + vb).sqrt();
    if se > 0.0 {
        (ma - mb) / se
    } else if ma == mb {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateThresholds {
    pub acceptance_band: (f64, f64),
    pub min_ess: f64,
    pub max_abs_geweke: f64,
}

impl Default for GateThresholds {
    fn default() -> Self {
        Self {
            acceptance_band: (0.15, 0.45),
            min_ess: 400.0,
            max_abs_geweke: 3.0,
        }
    }
}

/// Acceptance in band, every coordinate's ESS above the floor and every
/// Geweke `|z|` below the cap.
pub fn convergence_gate(report: &ChainReport, thresholds: &GateThresholds) -> bool {
    let (lo, hi) = thresholds.acceptance_band;
    (lo..=hi).contains(&report.acceptance_rate)
        && !report.ess.is_empty()
        && report.ess.iter().all(|&e| e >= thresholds.min_ess)
        && report.geweke_z.iter().all(|z| z.abs() < thresholds.max_abs_geweke)
}
