//! Negative Binomial populations (Poisson–Gamma mixture with success
//! probability `β/(β+1)` and size `α`) under the prior
//! `g₀(α, β) ∝ (1/β)·√(α·ψ¹(α) − 1)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::scalar::Real;
use crate::special::{digamma, shape_information_excess, shape_information_excess_derivative};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegBinDraw<T = f64> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> NegBinDraw<T> {
    pub fn mean(&self) -> T {
        self.alpha / self.beta
    }

    pub fn variance(&self) -> T {
        self.alpha * (self.beta + T::one()) / (self.beta * self.beta)
    }
}

/// Largest count for which the data term is summed exactly as
/// `Σⱼ ln(α + j)`; beyond it `lnΓ` differences are used.
pub const RISING_SUM_LIMIT: u64 = 10_000;

/// Posterior over `(α, β)`, holding the data as a histogram of counts so
/// that large samples with few distinct values stay cheap.
#[derive(Debug, Clone)]
pub struct NegBinPosterior<T = f64> {
    histogram: Vec<(T, T)>,
    /// `#{i : xᵢ > j}` for `j < max xᵢ`, when the largest count is small.
    exceed: Option<Vec<T>>,
    n: T,
    mean: T,
}

impl<T: Real> NegBinPosterior<T> {
    pub fn new(sample: &Sample<T>) -> Result<Self> {
        let raw = sample.count_histogram()?;
        let max = raw.iter().map(|&(v, _)| v).max().unwrap_or(0);
        let exceed = (max <= RISING_SUM_LIMIT).then(|| {
            let mut above = sample.n();
            let mut out = Vec::with_capacity(max as usize);
            let mut it = raw.iter().peekable();
            for j in 0..max {
                while let Some(&&(v, m)) = it.peek() {
                    if v > j {
                        break;
                    }
                    above -= m;
                    it.next();
                }
                out.push(T::from_count(above));
            }
            out
        });
        let histogram = raw
            .into_iter()
            .map(|(v, m)| (T::from_u64(v).expect("count fits"), T::from_count(m)))
            .collect();
        if !(sample.mean() > T::zero()) {
            return Err(Error::DegenerateData("all counts are zero".into()));
        }
        Ok(Self {
            histogram,
            exceed,
            n: T::from_count(sample.n()),
            mean: sample.mean(),
        })
    }

    /// `Σᵢ[lnΓ(xᵢ+α) − lnΓ(α)]`.
    fn log_rising(&self, alpha: T) -> T {
        match &self.exceed {
            Some(w) => w
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, &c)| acc + c * (alpha + T::from_count(j)).ln()),
            None => {
                let lg_alpha = alpha.ln_gamma();
                self.histogram
                    .iter()
                    .fold(T::zero(), |acc, &(x, m)| acc + m * ((x + alpha).ln_gamma() - lg_alpha))
            }
        }
    }

    /// `∂/∂α` of [`Self::log_rising`].
    fn d_log_rising(&self, alpha: T) -> T {
        match &self.exceed {
            Some(w) => w
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, &c)| acc + c / (alpha + T::from_count(j))),
            None => {
                let dg_alpha = digamma(alpha);
                self.histogram
                    .iter()
                    .fold(T::zero(), |acc, &(x, m)| acc + m * (digamma(x + alpha) - dg_alpha))
            }
        }
    }

    /// `Σᵢ[lnΓ(xᵢ+α) − lnΓ(α)] + n·[α·ln β − (α+x̄)·ln(β+1)] − ln β
    ///  + ½·ln(α·ψ¹(α) − 1)`; `-∞` outside the open positive quadrant.
    pub fn log_density(&self, draw: &NegBinDraw<T>) -> T {
        let (alpha, beta) = (draw.alpha, draw.beta);
        if !(alpha > T::zero() && beta > T::zero() && alpha.is_finite() && beta.is_finite()) {
            return T::neg_infinity();
        }
        let excess = shape_information_excess(alpha);
        assert!(
            excess > T::zero(),
            "α·ψ¹(α) − 1 must be positive, got {excess} at α = {alpha}"
        );
        // α·ln(β/(β+1)) written to stay accurate for large α and β
        self.log_rising(alpha) - self.n * (alpha * beta.recip().ln_1p() + self.mean * beta.ln_1p()) - beta.ln()
            + T::lit(0.5) * excess.ln()
    }

    /// `(∂/∂α, ∂/∂β)` of [`Self::log_density`].
    pub fn gradient(&self, draw: &NegBinDraw<T>) -> [T; 2] {
        let (alpha, beta) = (draw.alpha, draw.beta);
        let prior = T::lit(0.5) * shape_information_excess_derivative(alpha) / shape_information_excess(alpha);
        let d_alpha = self.d_log_rising(alpha) - self.n * beta.recip().ln_1p() + prior;
        let d_beta = self.n * (alpha / beta - self.mean) / (beta + T::one()) - beta.recip();
        [d_alpha, d_beta]
    }

    /// Method-of-moments start point; falls back to a near-Poisson fit when
    /// the data are not overdispersed.
    pub fn moment_estimate(&self) -> NegBinDraw<T> {
        let var = self
            .histogram
            .iter()
            .fold(T::zero(), |acc, &(x, m)| acc + m * (x - self.mean) * (x - self.mean))
            / self.n;
        let excess = var - self.mean;
        let beta = if excess > T::lit(1e-3) * self.mean {
            self.mean / excess
        } else {
            T::lit(1e3)
        };
        NegBinDraw {
            alpha: self.mean * beta,
            beta,
        }
    }

    pub fn n(&self) -> T {
        self.n
    }
}

pub fn negbin_log_posterior<T: Real>(draw: &NegBinDraw<T>, sample: &Sample<T>) -> Result<T> {
    Ok(NegBinPosterior::new(sample)?.log_density(draw))
}

/// `√((β + 1)/α)`.
pub fn cv_negbin<T: Real>(draw: &NegBinDraw<T>) -> Result<T> {
    if !(draw.alpha > T::zero() && draw.beta > T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "negative binomial parameters must be positive: {draw:?}"
        )));
    }
    Ok(((draw.beta + T::one()) / draw.alpha).sqrt())
}
