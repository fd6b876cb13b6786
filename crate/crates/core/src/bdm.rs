//! The Bayesian discrepancy measure estimated from posterior draws.
//!
//! For a precise hypothesis `φ = φ_H` the measure is
//! `δ_H = 1 − 2·min{P(φ < φ_H | x), P(φ > φ_H | x)}`, which needs only the
//! two tail probabilities and never the posterior median. With draws of `φ`
//! both tails are estimated by counting, so the estimate is exactly invariant
//! under strictly increasing reparametrisations and under permutation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Equally weighted draws of a scalar functional of the posterior.
///
/// Nonempty and all finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarDraws<T = f64> {
    values: Vec<T>,
}

impl<T: Real> ScalarDraws<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDraws);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDraw { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for the usual `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    pub fn mean(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v) / T::from_count(self.len())
    }

    /// Applies `f` to every draw, re-validating finiteness.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Posterior median by order statistics (average of the two middle
    /// values for even counts).
    pub fn median(&self) -> T {
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) * T::lit(0.5)
        }
    }
}

/// How the draws fall around the hypothesis value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct PartitionCounts {
    pub n_below: usize,
    pub n_above: usize,
    pub n_equal: usize,
    pub total: usize,
}

impl PartitionCounts {
    pub fn tally<T: Real>(draws: &ScalarDraws<T>, hypothesis_value: T) -> Self {
        let (mut n_below, mut n_above, mut n_equal) = (0, 0, 0);
        for &v in draws.values() {
            if v < hypothesis_value {
                n_below += 1;
            } else if v > hypothesis_value {
                n_above += 1;
            } else {
                n_equal += 1;
            }
        }
        Self {
            n_below,
            n_above,
            n_equal,
            total: draws.len(),
        }
    }

    /// Tail probabilities `(p_a, p_b)` with ties split evenly between the
    /// two sides.
    pub fn tail_probabilities<T: Real>(&self) -> (T, T) {
        let total = T::from_count(self.total);
        let half_tie = T::from_count(self.n_equal) * T::lit(0.5);
        (
            (T::from_count(self.n_below) + half_tie) / total,
            (T::from_count(self.n_above) + half_tie) / total,
        )
    }
}

/// Which side of the hypothesis carries the smaller posterior mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExternalSide {
    Below,
    Above,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct BdmResult<T = f64> {
    pub delta_h: T,
    pub p_a: T,
    pub p_b: T,
    /// Binomial Monte Carlo standard error of `delta_h`.
    pub mc_se: T,
    pub external_side: ExternalSide,
    pub posterior_median: Option<T>,
    pub n_draws: usize,
    pub counts: PartitionCounts,
}

/// Estimates `δ_H` for `H: φ = hypothesis_value` from draws of `φ`.
pub fn bdm_from_scalar_draws<T: Real>(draws: &ScalarDraws<T>, hypothesis_value: T) -> Result<BdmResult<T>> {
    if !hypothesis_value.is_finite() {
        return Err(Error::NonFiniteHypothesis);
    }
    let counts = PartitionCounts::tally(draws, hypothesis_value);
    let (p_a, p_b): (T, T) = counts.tail_probabilities();
    let p_min = p_a.min(p_b);
    let two = T::lit(2.0);
    let delta_h = (T::one() - two * p_min).max(T::zero()).min(T::one());
    let mc_se = two * (p_min * (T::one() - p_min) / T::from_count(counts.total)).sqrt();
    let external_side = if p_a < p_b {
        ExternalSide::Below
    } else if p_b < p_a {
        ExternalSide::Above
    } else {
        ExternalSide::Tie
    };
    Ok(BdmResult {
        delta_h,
        p_a,
        p_b,
        mc_se,
        external_side,
        posterior_median: None,
        n_draws: counts.total,
        counts,
    })
}

/// As [`bdm_from_scalar_draws`], additionally reporting the posterior median.
pub fn bdm_with_median<T: Real>(draws: &ScalarDraws<T>, hypothesis_value: T) -> Result<BdmResult<T>> {
    let mut result = bdm_from_scalar_draws(draws, hypothesis_value)?;
    result.posterior_median = Some(draws.median());
    Ok(result)
}

/// Paired differences `φ₁,ᵢ − φ₂,ᵢ`, truncated to the shorter stream.
pub fn paired_differences<T: Real>(draws1: &ScalarDraws<T>, draws2: &ScalarDraws<T>) -> Result<ScalarDraws<T>> {
    ScalarDraws::new(
        draws1
            .values()
            .iter()
            .zip(draws2.values())
            .map(|(&a, &b)| a - b)
            .collect(),
    )
}

/// `δ_H` for `H: φ₁ − φ₂ = 0` from independent draw streams of the two
/// populations.
pub fn bdm_two_populations<T: Real>(draws1: &ScalarDraws<T>, draws2: &ScalarDraws<T>) -> Result<BdmResult<T>> {
    bdm_from_scalar_draws(&paired_differences(draws1, draws2)?, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn draws(v: &[f64]) -> ScalarDraws {
        ScalarDraws::new(v.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_draws_give_zero() {
        let r = bdm_from_scalar_draws(&draws(&[-2.0, -1.0, 1.0, 2.0]), 0.0).unwrap();
        assert_eq!(r.delta_h, 0.0);
        assert_eq!((r.p_a, r.p_b), (0.5, 0.5));
        assert_eq!(r.external_side, ExternalSide::Tie);
    }

    #[test]
    fn one_sided_draws_give_one() {
        let r = bdm_from_scalar_draws(&draws(&[1.0, 2.0, 3.0, 4.0]), 0.0).unwrap();
        assert_eq!(r.delta_h, 1.0);
        assert_eq!(r.external_side, ExternalSide::Below);
        assert_eq!(r.mc_se, 0.0);
    }

    #[test]
    fn all_ties_split_evenly() {
        let r = bdm_from_scalar_draws(&draws(&[0.0; 5]), 0.0).unwrap();
        assert_eq!(r.delta_h, 0.0);
        assert_eq!(r.counts.n_equal, 5);
    }

    #[test]
    fn errors_on_bad_input() {
        assert!(matches!(ScalarDraws::<f64>::new(vec![]), Err(Error::EmptyDraws)));
        assert!(matches!(
            ScalarDraws::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteDraw { index: 1 })
        ));
        assert!(matches!(
            bdm_from_scalar_draws(&draws(&[1.0]), f64::INFINITY),
            Err(Error::NonFiniteHypothesis)
        ));
    }

    #[test]
    fn normal_draws_match_cdf_oracle() {
        // 1 - 2 * (1 - Φ(1.6449)) evaluated independently
        const EXPECTED: f64 = 0.900_009_565;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..1_000_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = bdm_from_scalar_draws(&ScalarDraws::new(v).unwrap(), 1.6449).unwrap();
        assert!((r.delta_h - EXPECTED).abs() < 0.002, "{}", r.delta_h);
        assert_eq!(r.external_side, ExternalSide::Above);
        assert!(r.mc_se > 0.0 && r.mc_se < 0.001);
    }

    #[test]
    fn two_population_edge_cases() {
        let a = draws(&[0.1, 0.2, 0.3]);
        assert_eq!(bdm_two_populations(&a, &a).unwrap().delta_h, 0.0);
        let two = draws(&[2.0; 10]);
        let one = draws(&[1.0; 7]);
        let r = bdm_two_populations(&two, &one).unwrap();
        assert_eq!(r.delta_h, 1.0);
        assert_eq!(r.n_draws, 7);
    }

    #[test]
    fn median_by_order_statistics() {
        assert_eq!(draws(&[3.0, 1.0, 2.0]).median(), 2.0);
        assert_eq!(draws(&[4.0, 1.0, 2.0, 3.0]).median(), 2.5);
        let r = bdm_with_median(&draws(&[3.0, 1.0, 2.0]), 0.0).unwrap();
        assert_eq!(r.posterior_median, Some(2.0));
    }

    #[test]
    fn works_in_single_precision() {
        let d = ScalarDraws::new(vec![-1.0_f32, 2.0, 3.0, 4.0]).unwrap();
        let r = bdm_from_scalar_draws(&d, 0.0_f32).unwrap();
        assert_eq!(r.delta_h, 0.5_f32);
    }

    proptest! {
        #[test]
        fn monotone_transform_leaves_delta_unchanged(
            v in prop::collection::vec(-50.0f64..50.0, 1..200),
            h in -50.0f64..50.0,
        ) {
            let d = ScalarDraws::new(v).unwrap();
            let t = |x: f64| x * x * x + 2.0 * x;
            let base = bdm_from_scalar_draws(&d, h).unwrap();
            let moved = bdm_from_scalar_draws(&d.map(t).unwrap(), t(h)).unwrap();
            prop_assert_eq!(base.delta_h, moved.delta_h);
            let exp = bdm_from_scalar_draws(&d.map(|x| (x / 10.0).exp()).unwrap(), (h / 10.0).exp()).unwrap();
            prop_assert_eq!(base.counts, exp.counts);
        }

        #[test]
        fn permutation_leaves_result_unchanged(
            v in prop::collection::vec(-5.0f64..5.0, 1..100),
            h in -5.0f64..5.0,
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let mut shuffled = v.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = bdm_from_scalar_draws(&ScalarDraws::new(v).unwrap(), h).unwrap();
            let b = bdm_from_scalar_draws(&ScalarDraws::new(shuffled).unwrap(), h).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn delta_is_a_probability(
            v in prop::collection::vec(prop_oneof![Just(0.0f64), -1e6f64..1e6], 1..100),
            h in prop_oneof![Just(0.0f64), -1e6f64..1e6],
        ) {
            let r = bdm_from_scalar_draws(&ScalarDraws::new(v).unwrap(), h).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.delta_h));
            prop_assert!(r.p_a + r.p_b <= 1.0 + 1e-12);
            prop_assert!(r.mc_se >= 0.0);
            prop_assert_eq!(r.counts.n_below + r.counts.n_above + r.counts.n_equal, r.counts.total);
            prop_assert!((r.delta_h - (1.0 - 2.0 * r.p_a.min(r.p_b))).abs() < 1e-12);
            prop_assert_eq!(r.external_side == ExternalSide::Below, r.p_a < r.p_b);
        }
    }
}
