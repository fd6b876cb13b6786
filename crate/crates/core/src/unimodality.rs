//! Mode counting on a Gaussian kernel density estimate.

use serde::Serialize;

use crate::bdm::ScalarDraws;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const GRID_POINTS: usize = 512;
pub const MIN_DRAWS: usize = 100;
/// Local maxima lower than this fraction of the highest one are ignored, so
/// that isolated tail draws do not register as modes.
pub const MODE_HEIGHT_FLOOR: f64 = 0.01;
/// A local maximum must also rise this fraction of its own height above the
/// dip separating it from any higher one, which discards the ripples that
/// sampling noise leaves in the tails.
pub const MODE_PROMINENCE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct UnimodalityReport<T = f64> {
    pub mode_count: usize,
    pub bandwidth: T,
    pub passed: bool,
}

/// Silverman's rule of thumb `0.9·min(sd, IQR/1.34)·n^(-1/5)`, falling back
/// to the standard deviation when the IQR collapses.
pub fn silverman_bandwidth<T: Real>(sorted: &[T]) -> T {
    let n = sorted.len();
    let nf = T::from_count(n);
    let mean = sorted.iter().fold(T::zero(), |a, &v| a + v) / nf;
    let var =
        sorted.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / T::from_count(n.saturating_sub(1).max(1));
    let sd = var.sqrt();
    let iqr = quantile_sorted(sorted, T::lit(0.75)) - quantile_sorted(sorted, T::lit(0.25));
    let spread = if iqr > T::zero() {
        sd.min(iqr / T::lit(1.34))
    } else {
        sd
    };
    T::lit(0.9) * spread * nf.powf(T::lit(-0.2))
}

fn quantile_sorted<T: Real>(sorted: &[T], q: T) -> T {
    let pos = q * T::from_count(sorted.len() - 1);
    let lo = pos.floor().to_usize().unwrap_or(0);
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - T::from_count(lo);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Counts local maxima of a kernel density estimate of `draws` evaluated on
/// 512 equally spaced points spanning the observed range.
///
/// Draws are linearly binned onto the grid before the (exact) Gaussian
/// convolution. A mode is a maximal run of equal grid values whose
/// neighbours on both sides are strictly lower (grid ends count as lower)
/// and whose height is at least [`MODE_HEIGHT_FLOOR`] times the maximum.
/// It must also stand out by [`MODE_PROMINENCE`] of its height.
pub fn check_unimodality<T: Real>(draws: &ScalarDraws<T>) -> Result<UnimodalityReport<T>> {
    let n = draws.len();
    if n < MIN_DRAWS {
        return Err(Error::TooFewDraws {
            needed: MIN_DRAWS,
            got: n,
        });
    }
    let mut sorted = draws.values().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let bandwidth = silverman_bandwidth(&sorted);
    if !(hi > lo) || !(bandwidth > T::zero()) {
        return Ok(UnimodalityReport {
            mode_count: 1,
            bandwidth: T::epsilon(),
            passed: true,
        });
    }

    let step = (hi - lo) / T::from_count(GRID_POINTS - 1);
    let mut mass = [T::zero(); GRID_POINTS];
    for &v in &sorted {
        let pos = (v - lo) / step;
        let left = pos.floor().to_usize().unwrap_or(0).min(GRID_POINTS - 1);
        let frac = pos - T::from_count(left);
        if left + 1 < GRID_POINTS {
            mass[left] += T::one() - frac;
            mass[left + 1] += frac;
        } else {
            mass[left] += T::one();
        }
    }

    let kernel: Vec<T> = (0..GRID_POINTS)
        .map(|lag| {
            let z = T::from_count(lag) * step / bandwidth;
            (T::lit(-0.5) * z * z).exp()
        })
        .collect();
    let density: Vec<T> = (0..GRID_POINTS)
        .map(|i| {
            mass.iter()
                .enumerate()
                .fold(T::zero(), |acc, (j, &m)| acc + m * kernel[i.abs_diff(j)])
        })
        .collect();

    let mode_count = count_modes(&density).max(1);
    Ok(UnimodalityReport {
        mode_count,
        bandwidth,
        passed: mode_count == 1,
    })
}

fn count_modes<T: Real>(density: &[T]) -> usize {
    let peak = density.iter().copied().fold(T::zero(), T::max);
    let floor = peak * T::lit(MODE_HEIGHT_FLOOR);
    let mut modes = 0;
    let mut i = 0;
    while i < density.len() {
        let mut j = i;
        while j + 1 < density.len() && density[j + 1] == density[i] {
            j += 1;
        }
        let h = density[i];
        let left_lower = i == 0 || density[i - 1] < h;
        let right_lower = j + 1 == density.len() || density[j + 1] < h;
        if left_lower && right_lower && h >= floor && prominence(density, i, j) >= h * T::lit(MODE_PROMINENCE) {
            modes += 1;
        }
        i = j + 1;
    }
    modes
}

/// Height of the plateau `density[i..=j]` above the higher of the two lowest
/// points separating it from taller ground (or from the grid ends).
fn prominence<T: Real>(density: &[T], i: usize, j: usize) -> T {
    let h = density[i];
    // past the grid ends the density counts as zero
    let base = |iter: &mut dyn Iterator<Item = T>| {
        let mut iter = iter.peekable();
        if iter.peek().is_none() {
            return T::zero();
        }
        let mut low = h;
        for v in iter {
            if v > h {
                break;
            }
            low = low.min(v);
        }
        low
    };
    let left = base(&mut density[..i].iter().rev().copied());
    let right = base(&mut density[j + 1..].iter().copied());
    h - left.max(right)
}
