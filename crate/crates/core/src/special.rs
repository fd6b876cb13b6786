//! Special functions: polygamma family and the standard Normal in log space.

use crate::scalar::Real;

/// Recurrence shifts the argument at least this far before the asymptotic
/// expansions are used.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// Below this argument `ln Φ` switches to the Mills-ratio continued fraction.
const LOG_CDF_TAIL: f64 = -8.0;

const MILLS_TERMS: usize = 80;

#[inline]
pub fn ln_gamma<T: Real>(x: T) -> T {
    x.ln_gamma()
}

pub fn ln_beta<T: Real>(a: T, b: T) -> T {
    a.ln_gamma() + b.ln_gamma() - (a + b).ln_gamma()
}

/// Digamma `ψ(x)` for `x > 0`; NaN otherwise.
pub fn digamma<T: Real>(x: T) -> T {
    if !(x > T::zero()) {
        return T::nan();
    }
    let mut x = x;
    let mut acc = T::zero();
    let shift = T::lit(ASYMPTOTIC_FROM);
    while x < shift {
        acc -= x.recip();
        x += T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let series = inv2
        * (T::lit(-1.0 / 12.0)
            + inv2
                * (T::lit(1.0 / 120.0)
                    + inv2
                        * (T::lit(-1.0 / 252.0)
                            + inv2
                                * (T::lit(1.0 / 240.0)
                                    + inv2
                                        * (T::lit(-1.0 / 132.0)
                                            + inv2 * (T::lit(691.0 / 32760.0) + inv2 * T::lit(-1.0 / 12.0)))))));
    acc + x.ln() - T::lit(0.5) * inv + series
}

/// Trigamma `ψ¹(x) = Σ_{j≥0} (x+j)⁻²` for `x > 0`; NaN otherwise.
///
/// Shifts with `ψ¹(x) = ψ¹(x+1) + x⁻²` until the argument reaches the
/// asymptotic region, then sums the Bernoulli expansion.
pub fn trigamma<T: Real>(x: T) -> T {
    if !(x > T::zero()) {
        return T::nan();
    }
    let mut x = x;
    let mut acc = T::zero();
    let shift = T::lit(ASYMPTOTIC_FROM);
    while x < shift {
        acc += (x * x).recip();
        x += T::one();
    }
    acc + trigamma_asymptotic(x)
}

fn trigamma_asymptotic<T: Real>(x: T) -> T {
    let inv = x.recip();
    let inv2 = inv * inv;
    let tail = inv2
        * (T::lit(1.0 / 6.0)
            + inv2
                * (T::lit(-1.0 / 30.0)
                    + inv2
                        * (T::lit(1.0 / 42.0)
                            + inv2
                                * (T::lit(-1.0 / 30.0)
                                    + inv2
                                        * (T::lit(5.0 / 66.0)
                                            + inv2 * (T::lit(-691.0 / 2730.0) + inv2 * T::lit(7.0 / 6.0)))))));
    inv + T::lit(0.5) * inv2 + inv * tail
}

/// Tetragamma `ψ²(x)`, the derivative of [`trigamma`], for `x > 0`.
pub fn tetragamma<T: Real>(x: T) -> T {
    if !(x > T::zero()) {
        return T::nan();
    }
    let mut x = x;
    let mut acc = T::zero();
    let shift = T::lit(ASYMPTOTIC_FROM);
    let two = T::lit(2.0);
    while x < shift {
        acc -= two / (x * x * x);
        x += T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let tail = inv2
        * (T::lit(-0.5)
            + inv2
                * (T::lit(1.0 / 6.0)
                    + inv2
                        * (T::lit(-1.0 / 6.0)
                            + inv2
                                * (T::lit(3.0 / 10.0)
                                    + inv2
                                        * (T::lit(-5.0 / 6.0)
                                            + inv2 * (T::lit(691.0 / 210.0) + inv2 * T::lit(-35.0 / 2.0)))))));
    acc - inv2 - inv2 * inv + inv2 * tail
}

/// `α·ψ¹(α) − 1`, strictly positive for every `α > 0`.
///
/// For large `α` the direct form cancels catastrophically, so the expansion
/// `1/(2α) + 1/(6α²) − 1/(30α⁴) + …` is summed instead.
pub fn shape_information_excess<T: Real>(alpha: T) -> T {
    if alpha < T::lit(ASYMPTOTIC_FROM) {
        return alpha * trigamma(alpha) - T::one();
    }
    let inv = alpha.recip();
    let inv2 = inv * inv;
    let even = inv2
        * (T::lit(1.0 / 6.0)
            + inv2
                * (T::lit(-1.0 / 30.0)
                    + inv2
                        * (T::lit(1.0 / 42.0)
                            + inv2
                                * (T::lit(-1.0 / 30.0)
                                    + inv2
                                        * (T::lit(5.0 / 66.0)
                                            + inv2 * (T::lit(-691.0 / 2730.0) + inv2 * T::lit(7.0 / 6.0)))))));
    T::lit(0.5) * inv + even
}

/// Derivative of [`shape_information_excess`]: `ψ¹(α) + α·ψ²(α)`.
pub fn shape_information_excess_derivative<T: Real>(alpha: T) -> T {
    if alpha < T::lit(ASYMPTOTIC_FROM) {
        return trigamma(alpha) + alpha * tetragamma(alpha);
    }
    let inv = alpha.recip();
    let inv2 = inv * inv;
    // d/dα of Σ c_k α^{-2k}
    let odd = inv2
        * inv
        * (T::lit(-2.0 / 6.0)
            + inv2
                * (T::lit(4.0 / 30.0)
                    + inv2
                        * (T::lit(-6.0 / 42.0)
                            + inv2
                                * (T::lit(8.0 / 30.0)
                                    + inv2
                                        * (T::lit(-10.0 * 5.0 / 66.0)
                                            + inv2
                                                * (T::lit(12.0 * 691.0 / 2730.0)
                                                    + inv2 * T::lit(-14.0 * 7.0 / 6.0)))))));
    T::lit(-0.5) * inv2 + odd
}

#[inline]
pub fn log_norm_pdf<T: Real>(x: T) -> T {
    T::lit(-0.918_938_533_204_672_7) - T::lit(0.5) * x * x
}

#[inline]
pub fn norm_pdf<T: Real>(x: T) -> T {
    log_norm_pdf(x).exp()
}

/// Standard Normal CDF.
pub fn norm_cdf<T: Real>(x: T) -> T {
    T::lit(0.5) * (-x * T::FRAC_1_SQRT_2()).erfc()
}

/// Mills ratio `(1 − Φ(t))/φ(t)` for large positive `t`, by continued
/// fraction `1/(t + 1/(t + 2/(t + 3/(t + …))))`.
fn mills_ratio_tail<T: Real>(t: T) -> T {
    let mut f = t;
    for k in (1..=MILLS_TERMS).rev() {
        f = t + T::from_count(k) / f;
    }
    f.recip()
}

/// `ln Φ(x)`, finite for every finite `x`.
pub fn log_norm_cdf<T: Real>(x: T) -> T {
    if x < T::lit(LOG_CDF_TAIL) {
        log_norm_pdf(x) + mills_ratio_tail(-x).ln()
    } else if x < T::zero() {
        (T::lit(0.5) * (-x * T::FRAC_1_SQRT_2()).erfc()).ln()
    } else {
        (-T::lit(0.5) * (x * T::FRAC_1_SQRT_2()).erfc()).ln_1p()
    }
}

/// `d/dx ln Φ(x) = φ(x)/Φ(x)`.
pub fn d_log_norm_cdf<T: Real>(x: T) -> T {
    if x < T::lit(LOG_CDF_TAIL) {
        mills_ratio_tail(-x).recip()
    } else {
        (log_norm_pdf(x) - log_norm_cdf(x)).exp()
    }
}
