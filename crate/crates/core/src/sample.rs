//! Observations of one population and their cached summaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One population's data.
///
/// `sd` uses the divide-by-`n` convention, so `Σ(xᵢ − x̄)² = n·sd²`.
/// A sample may carry only summaries; which summaries suffice depends on the
/// model (see [`crate::models::ModelSpec::validate`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample<T = f64> {
    values: Option<Vec<T>>,
    n: usize,
    mean: T,
    sd: T,
    harmonic_mean: Option<T>,
}

impl<T: Real> Sample<T> {
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidSample(format!("need at least 2 observations, got {n}")));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue {
                index,
                value: values[index].to_f64().unwrap_or(f64::NAN),
                reason: "not a finite number",
            });
        }
        let nf = T::from_count(n);
        let mean = values.iter().fold(T::zero(), |a, &v| a + v) / nf;
        let ss = values.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean));
        let sd = (ss / nf).sqrt();
        let harmonic_mean = if values.iter().all(|&v| v > T::zero()) {
            let inv = values.iter().fold(T::zero(), |a, &v| a + v.recip());
            // the harmonic mean cannot exceed the arithmetic one; clamp the
            // last-ulp rounding that can occur for constant data
            Some((nf / inv).min(mean))
        } else {
            None
        };
        Ok(Self {
            values: Some(values),
            n,
            mean,
            sd,
            harmonic_mean,
        })
    }

    /// Summary-only sample `(n, x̄, s)` with `s` in the divide-by-`n`
    /// convention.
    pub fn from_summary(n: usize, mean: T, sd: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSample(format!("need at least 2 observations, got {n}")));
        }
        if !mean.is_finite() || !sd.is_finite() || sd < T::zero() {
            return Err(Error::InvalidSample(format!(
                "summary mean {mean} / sd {sd} must be finite with sd >= 0"
            )));
        }
        Ok(Self {
            values: None,
            n,
            mean,
            sd,
            harmonic_mean: None,
        })
    }

    /// Summary-only sample for the inverse Gaussian model, `(n, x̄, a)`.
    pub fn from_positive_summary(n: usize, mean: T, harmonic_mean: T) -> Result<Self> {
        if !(harmonic_mean > T::zero()) || harmonic_mean > mean {
            return Err(Error::InvalidSample(format!(
                "harmonic mean {harmonic_mean} must lie in (0, mean = {mean}]"
            )));
        }
        let mut s = Self::from_summary(n, mean, T::zero())?;
        s.harmonic_mean = Some(harmonic_mean);
        Ok(s)
    }

    pub fn values(&self) -> Option<&[T]> {
        self.values.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn sd(&self) -> T {
        self.sd
    }

    /// Standard deviation with the divide-by-`(n − 1)` convention.
    pub fn sd_unbiased(&self) -> T {
        let nf = T::from_count(self.n);
        self.sd * (nf / (nf - T::one())).sqrt()
    }

    pub fn harmonic_mean(&self) -> Option<T> {
        self.harmonic_mean
    }

    /// Plug-in coefficient of variation `s/|x̄|` with the unbiased `s`.
    pub fn cv_estimate(&self) -> Option<T> {
        (self.mean != T::zero()).then(|| self.sd_unbiased() / self.mean.abs())
    }

    pub fn require_values(&self) -> Result<&[T]> {
        self.values()
            .ok_or_else(|| Error::InvalidSample("raw observations are required for this model".into()))
    }

    pub fn require_positive(&self) -> Result<()> {
        if let Some(values) = self.values() {
            if let Some(index) = values.iter().position(|&v| !(v > T::zero())) {
                return Err(Error::InvalidValue {
                    index,
                    value: values[index].as_f64(),
                    reason: "must be strictly positive",
                });
            }
        }
        self.harmonic_mean
            .map(|_| ())
            .ok_or_else(|| Error::InvalidSample("positive data with a harmonic mean are required".into()))
    }

    /// Histogram `(count value, multiplicity)` of nonnegative integer data,
    /// sorted by value.
    pub fn count_histogram(&self) -> Result<Vec<(u64, usize)>> {
        let values = self.require_values()?;
        let mut counts: Vec<u64> = Vec::with_capacity(values.len());
        for (index, &v) in values.iter().enumerate() {
            if v < T::zero() || v.fract() != T::zero() {
                return Err(Error::InvalidValue {
                    index,
                    value: v.as_f64(),
                    reason: "must be a nonnegative integer count",
                });
            }
            counts.push(v.to_u64().ok_or(Error::InvalidValue {
                index,
                value: v.as_f64(),
                reason: "count too large",
            })?);
        }
        counts.sort_unstable();
        let mut hist: Vec<(u64, usize)> = Vec::new();
        for c in counts {
            match hist.last_mut() {
                Some((v, m)) if *v == c => *m += 1,
                _ => hist.push((c, 1)),
            }
        }
        Ok(hist)
    }

    /// The same sample with every observation multiplied by `c`.
    pub fn rescaled(&self, c: T) -> Result<Self> {
        match &self.values {
            Some(v) => Self::from_values(v.iter().map(|&x| x * c).collect()),
            None => {
                let mut s = Self::from_summary(self.n, self.mean * c, self.sd * c.abs())?;
                s.harmonic_mean = self.harmonic_mean.map(|a| a * c);
                Ok(s)
            }
        }
    }
}
