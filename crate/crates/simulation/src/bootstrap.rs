//! Nonparametric bootstrap test for equal coefficients of variation, the
//! frequentist baseline of the replication studies.
//!
//! The statistic is `d = ĉv₁ − ĉv₂` with `ĉv = s/|x̄|` (`s` with divisor
//! `n − 1`). Each group is resampled with replacement, and the two-sided
//! p-value is the fraction of recentred replicates `|d* − d| ≥ |d|`.

use cvbdm::{rng, Sample};
use rand::Rng;
use serde::Serialize;

use crate::error::{Result, SimError};

pub const MIN_BOOT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapOutcome {
    pub p_value: f64,
    pub statistic: f64,
    /// Resamples redrawn because their mean was exactly zero.
    pub redraws: usize,
}

fn cv(values: &[f64]) -> Option<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return None;
    }
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    Some((ss / (n - 1.0)).sqrt() / mean.abs())
}

pub fn bootstrap_cv_test(sample1: &Sample, sample2: &Sample, n_boot: usize, seed: u64) -> Result<BootstrapOutcome> {
    bootstrap_cv_test_with(sample1, sample2, n_boot, &mut rng::stream(seed, &[]))
}

pub fn bootstrap_cv_test_with<R: Rng + ?Sized>(
    sample1: &Sample,
    sample2: &Sample,
    n_boot: usize,
    rng: &mut R,
) -> Result<BootstrapOutcome> {
    if n_boot < MIN_BOOT {
        return Err(SimError::Precondition(format!(
            "need at least {MIN_BOOT} resamples, got {n_boot}"
        )));
    }
    let x1 = sample1.require_values()?;
    let x2 = sample2.require_values()?;
    let (Some(c1), Some(c2)) = (cv(x1), cv(x2)) else {
        return Err(SimError::Precondition("both samples need a nonzero mean".into()));
    };
    let observed = c1 - c2;

    let max_redraws = n_boot;
    let mut redraws = 0;
    let mut buf1 = vec![0.0; x1.len()];
    let mut buf2 = vec![0.0; x2.len()];
    let mut extreme = 0usize;
    for _ in 0..n_boot {
        let d = loop {
            let a = resampled_cv(x1, &mut buf1, rng);
            let b = resampled_cv(x2, &mut buf2, rng);
            if let (Some(a), Some(b)) = (a, b) {
                break a - b;
            }
            redraws += 1;
            if redraws > max_redraws {
                return Err(SimError::Precondition(format!(
                    "more than {max_redraws} resamples had a zero mean"
                )));
            }
        };
        if (d - observed).abs() >= observed.abs() {
            extreme += 1;
        }
    }
    Ok(BootstrapOutcome {
        p_value: extreme as f64 / n_boot as f64,
        statistic: observed,
        redraws,
    })
}

fn resampled_cv<R: Rng + ?Sized>(x: &[f64], buf: &mut [f64], rng: &mut R) -> Option<f64> {
    for b in buf.iter_mut() {
        *b = x[rng.random_range(0..x.len())];
    }
    cv(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> Sample {
        Sample::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn identical_samples_give_p_one() {
        let s = sample(&[2.0, 3.5, 4.1, 2.2, 3.3, 5.0, 2.8]);
        let out = bootstrap_cv_test(&s, &s, 200, 1).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert_eq!(out.p_value, 1.0);
    }

    #[test]
    fn scale_invariance_with_fixed_seed() {
        let a = sample(&[2.0, 3.5, 4.1, 2.2, 3.3, 5.0, 2.8, 3.9]);
        let b = sample(&[1.0, 1.4, 0.8, 2.5, 1.9, 1.2]);
        let p = bootstrap_cv_test(&a, &b, 500, 9).unwrap().p_value;
        let c = 3.75;
        let p_scaled = bootstrap_cv_test(&a.rescaled(c).unwrap(), &b.rescaled(c).unwrap(), 500, 9)
            .unwrap()
            .p_value;
        assert_eq!(p, p_scaled);
    }

    #[test]
    fn rejects_bad_input() {
        let s = sample(&[1.0, 2.0, 3.0]);
        assert!(bootstrap_cv_test(&s, &s, 50, 1).is_err());
        let zero = sample(&[-1.0, 1.0]);
        assert!(bootstrap_cv_test(&s, &zero, 200, 1).is_err());
        let summary = Sample::from_summary(10, 1.0, 1.0).unwrap();
        assert!(bootstrap_cv_test(&s, &summary, 200, 1).is_err());
    }

    #[test]
    fn zero_mean_resamples_are_redrawn() {
        // a resample of {−1, 1, 1, 1} sums to zero with probability 27/128
        let a = sample(&[-1.0, 1.0, 1.0, 1.0]);
        let b = sample(&[1.0, 2.0, 3.0]);
        let out = bootstrap_cv_test(&a, &b, 200, 3).unwrap();
        assert!(out.redraws > 10 && out.redraws < 100, "{}", out.redraws);
    }

    #[test]
    fn unequal_cvs_are_detected() {
        let mut r = rng::stream(5, &[]);
        let draw = |mu: f64, sd: f64, r: &mut rng::StreamRng| {
            let d = rand_distr::Normal::new(mu, sd).unwrap();
            sample(
                &(0..500)
                    .map(|_| rand_distr::Distribution::sample(&d, r))
                    .collect::<Vec<_>>(),
            )
        };
        let mut significant = 0;
        for _ in 0..10 {
            let a = draw(3.0, 1.0, &mut r);
            let b = draw(3.0, 2.0, &mut r);
            if bootstrap_cv_test_with(&a, &b, 200, &mut r).unwrap().p_value < 0.05 {
                significant += 1;
            }
        }
        assert!(significant >= 9);
    }
}
