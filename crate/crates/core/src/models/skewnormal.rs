//! Skew-Normal populations `SN(μ, σ, λ)` with density
//! `(2/σ)·φ(z)·Φ(λz)`, `z = (x − μ)/σ`, under the approximate Jeffreys prior
//! `g₀(μ, σ, λ) ∝ g₀(λ)/σ` where `g₀(λ)` is a generalised Student-t with
//! location 0, scale π/2 and ½ degree of freedom.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::scalar::Real;
use crate::special::{d_log_norm_cdf, ln_beta, log_norm_cdf};

/// Minimum sample size for the skew-normal posterior.
pub const MIN_OBSERVATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewNormalDraw<T = f64> {
    pub mu: T,
    pub sigma: T,
    pub lambda: T,
    /// Half-normal augmentation variables of the Gibbs sampler, if retained.
    pub latent: Option<Vec<T>>,
}

impl<T: Real> SkewNormalDraw<T> {
    pub fn new(mu: T, sigma: T, lambda: T) -> Self {
        Self {
            mu,
            sigma,
            lambda,
            latent: None,
        }
    }

    /// `δ = λ/√(1 + λ²)`.
    pub fn delta(&self) -> T {
        self.lambda / (T::one() + self.lambda * self.lambda).sqrt()
    }

    pub fn mean(&self) -> T {
        self.mu + self.sigma * self.delta() * (T::lit(2.0) / T::PI()).sqrt()
    }

    pub fn variance(&self) -> T {
        let d = self.delta();
        self.sigma * self.sigma * (T::one() - T::lit(2.0) * d * d / T::PI())
    }
}

/// Generalised Student-t density
/// `g(λ) = B(ν/2, ½)⁻¹·√(s/ν)·(1 + s(λ − m)²/ν)^{−(ν+1)/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedT<T = f64> {
    pub location: T,
    pub scale: T,
    pub dof: T,
}

impl<T: Real> GeneralizedT<T> {
    /// The shape prior: location 0, scale π/2, ½ degree of freedom.
    pub fn shape_prior() -> Self {
        Self {
            location: T::zero(),
            scale: T::FRAC_PI_2(),
            dof: T::lit(0.5),
        }
    }

    pub fn log_density(&self, x: T) -> T {
        let half = T::lit(0.5);
        let d = x - self.location;
        -ln_beta(half * self.dof, half) + half * (self.scale / self.dof).ln()
            - half * (self.dof + T::one()) * (self.scale * d * d / self.dof).ln_1p()
    }

    pub fn d_log_density(&self, x: T) -> T {
        let d = x - self.location;
        let ratio = self.scale / self.dof;
        -(self.dof + T::one()) * ratio * d / (T::one() + ratio * d * d)
    }
}

#[derive(Debug, Clone)]
pub struct SkewNormalPosterior<T = f64> {
    values: Vec<T>,
    prior: GeneralizedT<T>,
}

impl<T: Real> SkewNormalPosterior<T> {
    pub fn new(sample: &Sample<T>) -> Result<Self> {
        let values = sample.require_values()?;
        if values.len() < MIN_OBSERVATIONS {
            return Err(Error::InvalidSample(format!(
                "skew-normal model needs at least {MIN_OBSERVATIONS} observations"
            )));
        }
        Ok(Self {
            values: values.to_vec(),
            prior: GeneralizedT::shape_prior(),
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn prior(&self) -> &GeneralizedT<T> {
        &self.prior
    }

    /// `−(n+1)·ln σ + ln g₀(λ) + Σ[ln φ(zᵢ) + ln Φ(λ zᵢ)]`, dropping constants.
    pub fn log_density(&self, mu: T, sigma: T, lambda: T) -> T {
        if !(sigma > T::zero()) {
            return T::neg_infinity();
        }
        let half = T::lit(0.5);
        let n = T::from_count(self.values.len());
        let sum = self.values.iter().fold(T::zero(), |acc, &x| {
            let z = (x - mu) / sigma;
            acc - half * z * z + log_norm_cdf(lambda * z)
        });
        -(n + T::one()) * sigma.ln() + self.prior.log_density(lambda) + sum
    }

    /// The part of the log density that depends on `λ` given `(μ, σ)`.
    pub fn log_density_shape(&self, mu: T, sigma: T, lambda: T) -> T {
        self.prior.log_density(lambda)
            + self
                .values
                .iter()
                .fold(T::zero(), |acc, &x| acc + log_norm_cdf(lambda * (x - mu) / sigma))
    }

    /// `(∂/∂μ, ∂/∂σ, ∂/∂λ)` of [`Self::log_density`].
    pub fn gradient(&self, mu: T, sigma: T, lambda: T) -> [T; 3] {
        let n = T::from_count(self.values.len());
        let (mut g_mu, mut g_sigma, mut g_lambda) = (T::zero(), T::zero(), T::zero());
        for &x in &self.values {
            let z = (x - mu) / sigma;
            let r = d_log_norm_cdf(lambda * z);
            g_mu += (z - lambda * r) / sigma;
            g_sigma += (z * z - lambda * r * z) / sigma;
            g_lambda += z * r;
        }
        [
            g_mu,
            g_sigma - (n + T::one()) / sigma,
            g_lambda + self.prior.d_log_density(lambda),
        ]
    }
}

pub fn skewnormal_log_posterior<T: Real>(draw: &SkewNormalDraw<T>, sample: &Sample<T>) -> Result<T> {
    Ok(SkewNormalPosterior::new(sample)?.log_density(draw.mu, draw.sigma, draw.lambda))
}

/// `√(σ²(1 − 2δ²/π)) / |μ + σδ√(2/π)|`.
pub fn cv_skewnormal<T: Real>(draw: &SkewNormalDraw<T>) -> Result<T> {
    let mean = draw.mean();
    if mean == T::zero() {
        return Err(Error::UndefinedCv);
    }
    Ok(draw.variance().sqrt() / mean.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::normal::{cv_normal, NormalDraw};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn sample() -> Sample {
        Sample::from_values(vec![2.1, 3.4, 2.9, 5.0, 3.3, 4.1, 2.2, 3.8, 6.2, 3.0, 2.7, 4.4]).unwrap()
    }

    fn std_normal_pdf(t: f64) -> f64 {
        (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    // Φ(t) as the integral of φ from -40, composite Simpson
    fn cdf_by_quadrature(t: f64) -> f64 {
        let a = -40.0;
        let m = (((t - a) / 1e-3).ceil() as usize).max(2) & !1;
        let h = (t - a) / m as f64;
        let mut s = std_normal_pdf(a) + std_normal_pdf(t);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * std_normal_pdf(a + i as f64 * h);
        }
        s * h / 3.0
    }

    fn prior_by_formula(lambda: f64) -> f64 {
        let (nu, s) = (0.5, std::f64::consts::FRAC_PI_2);
        let beta = libm::tgamma(nu / 2.0) * libm::tgamma(0.5) / libm::tgamma(nu / 2.0 + 0.5);
        (s / nu).sqrt() / beta * (1.0 + s * lambda * lambda / nu).powf(-(nu + 1.0) / 2.0)
    }

    fn brute_force(values: &[f64], mu: f64, sigma: f64, lambda: f64) -> f64 {
        let lik: f64 = values
            .iter()
            .map(|&x| {
                let z = (x - mu) / sigma;
                (2.0 / sigma * std_normal_pdf(z) * cdf_by_quadrature(lambda * z)).ln()
            })
            .sum();
        lik - sigma.ln() + prior_by_formula(lambda).ln()
    }

    #[test]
    fn matches_quadrature_oracle_up_to_constant() {
        let s = sample();
        let post = SkewNormalPosterior::new(&s).unwrap();
        let values = s.values().unwrap();
        let (mu0, sigma0, lambda) = (3.0, 1.2, 1.5);
        let base_impl = post.log_density(mu0, sigma0, lambda);
        let base_oracle = brute_force(values, mu0, sigma0, lambda);
        for i in 0..5 {
            for j in 0..5 {
                let (mu, sigma) = (2.4 + 0.3 * i as f64, 0.9 + 0.25 * j as f64);
                let a = post.log_density(mu, sigma, lambda) - base_impl;
                let b = brute_force(values, mu, sigma, lambda) - base_oracle;
                assert!((a - b).abs() < 1e-8, "({mu}, {sigma}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn zero_shape_differs_from_normal_by_a_constant() {
        let s = sample();
        let post = SkewNormalPosterior::new(&s).unwrap();
        let values = s.values().unwrap();
        let normal = |mu: f64, sigma: f64| -> f64 {
            values
                .iter()
                .map(|&x| -sigma.ln() + std_normal_pdf((x - mu) / sigma).ln())
                .sum::<f64>()
                - sigma.ln()
        };
        let offset = post.log_density(3.0, 1.0, 0.0) - normal(3.0, 1.0);
        for &(mu, sigma) in &[(1.0, 0.5), (3.5, 2.0), (-2.0, 7.0), (4.4, 1.3)] {
            let d = post.log_density(mu, sigma, 0.0) - normal(mu, sigma);
            assert!((d - offset).abs() < 1e-9);
        }
    }

    #[test]
    fn shape_prior_integrates_to_one() {
        // λ = sinh(u) tames the |λ|^{-3/2} tails
        let prior = GeneralizedT::<f64>::shape_prior();
        let (a, b, m) = (-60.0_f64, 60.0_f64, 240_000usize);
        let h = (b - a) / m as f64;
        let f = |u: f64| prior.log_density(u.sinh()).exp() * u.cosh();
        let mut s = f(a) + f(b);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        let total = s * h / 3.0;
        assert!((total - 1.0).abs() < 1e-3, "{total}");
        for &l in &[-3.0, 0.0, 0.4, 12.0] {
            assert_relative_eq!(prior.log_density(l).exp(), prior_by_formula(l), max_relative = 1e-12);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let s = sample();
        let post = SkewNormalPosterior::new(&s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let p = [
                rng.random_range(1.0..5.0),
                rng.random_range(0.5..3.0),
                rng.random_range(-6.0..6.0),
            ];
            let g = post.gradient(p[0], p[1], p[2]);
            for k in 0..3 {
                let h = 1e-6 * p[k].abs().max(1.0);
                let mut up = p;
                let mut dn = p;
                up[k] += h;
                dn[k] -= h;
                let fd = (post.log_density(up[0], up[1], up[2]) - post.log_density(dn[0], dn[1], dn[2])) / (2.0 * h);
                assert_relative_eq!(g[k], fd, max_relative = 1e-5, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn needs_raw_values_and_three_observations() {
        assert!(SkewNormalPosterior::new(&Sample::from_summary(10, 1.0, 1.0).unwrap()).is_err());
        assert!(SkewNormalPosterior::new(&Sample::from_values(vec![1.0, 2.0]).unwrap()).is_err());
        let d = SkewNormalDraw::new(3.0, 1.0, 0.0);
        assert!(skewnormal_log_posterior(&d, &sample()).unwrap().is_finite());
    }

    #[test]
    fn cv_map() {
        assert_relative_eq!(cv_skewnormal(&SkewNormalDraw::new(3.0, 1.0, 0.0)).unwrap(), 1.0 / 3.0);
        let half_normal = cv_skewnormal(&SkewNormalDraw::new(0.0, 1.0, 1e9)).unwrap();
        assert_relative_eq!(
            half_normal,
            (std::f64::consts::FRAC_PI_2 - 1.0).sqrt(),
            max_relative = 1e-12
        );
        assert_relative_eq!(half_normal, 0.755_510_639_762_867, max_relative = 1e-12);
        // δ = 1/√2
        assert_relative_eq!(
            cv_skewnormal(&SkewNormalDraw::new(3.0, 1.0, 1.0)).unwrap(),
            0.231_650_211_590_237,
            max_relative = 1e-12
        );
        assert!(matches!(
            cv_skewnormal(&SkewNormalDraw::new(0.0, 1.0, 0.0)),
            Err(Error::UndefinedCv)
        ));
    }

    #[test]
    fn zero_shape_reproduces_normal_cv_exactly() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let mu: f64 = rng.random_range(-10.0..10.0);
            let sigma: f64 = rng.random_range(0.1..5.0);
            let sn = cv_skewnormal(&SkewNormalDraw::new(mu, sigma, 0.0)).unwrap();
            let nd = cv_normal(&NormalDraw {
                mu,
                phi: 1.0 / (sigma * sigma),
            })
            .unwrap();
            assert_relative_eq!(sn, nd, max_relative = 1e-14);
        }
    }
}
