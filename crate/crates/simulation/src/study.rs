//! Replication studies of `δ_H` under known population parameters.
//!
//! Replication `r` of sample-size pair `c` draws population `k`'s data from
//! stream `(master_seed, [c, r, k, 0])` and its posterior from stream
//! `(master_seed, [c, r, k, 1])`, so results do not depend on the number of
//! worker threads or on the order in which replications finish.

use cvbdm::stats::{ks_uniform, wilson_interval};
use cvbdm::{bdm_two_populations, cv_draws, rng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bootstrap::bootstrap_cv_test_with;
use crate::error::{Result, SimError};
use crate::generate::simulate_sample;
use crate::grid::{CellResult, ChainSummary, SizeSeries, StudyGrid, StudyKind, StudyResult};

/// Minimum replications for a uniformity check.
pub const MIN_UNIFORMITY_REPLICATIONS: usize = 2000;

const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityResult {
    pub n1: usize,
    pub n2: usize,
    pub replications: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
    pub chains: Option<ChainSummary>,
}

struct Replication {
    value: f64,
    chains: Option<ChainSummary>,
    redrawn: usize,
}

fn one_replication(grid: &StudyGrid, cell: usize, rep: usize, sizes: [usize; 2]) -> Result<Replication> {
    let config = grid.sampler_config();
    let mut samples = Vec::with_capacity(2);
    let mut redrawn = 0;
    for (k, (truth, &n)) in grid.population.iter().zip(&sizes).enumerate() {
        let mut data_rng = rng::stream(grid.master_seed, &[cell as u64, rep as u64, k as u64, 0]);
        let (s, r) = simulate_sample(grid.model, truth, n, &mut data_rng)?;
        redrawn += r;
        samples.push(s);
    }

    if grid.study == StudyKind::Bootstrap {
        let mut boot_rng = rng::stream(grid.master_seed, &[cell as u64, rep as u64, 2, 1]);
        let outcome = bootstrap_cv_test_with(&samples[0], &samples[1], grid.n_boot, &mut boot_rng)?;
        return Ok(Replication {
            value: outcome.p_value,
            chains: None,
            redrawn,
        });
    }

    let mut draws = Vec::with_capacity(2);
    let mut chains: Option<ChainSummary> = None;
    for (k, s) in samples.iter().enumerate() {
        let seed = rng::derive_seed(grid.master_seed, &[cell as u64, rep as u64, k as u64, 1]);
        let out = cv_draws(grid.model, s, &config, seed)?;
        if let Some(report) = &out.chain {
            chains.get_or_insert_with(ChainSummary::empty).add(report);
        }
        draws.push(out.draws);
    }
    let result = bdm_two_populations(&draws[0], &draws[1])?;
    Ok(Replication {
        value: result.delta_h,
        chains,
        redrawn,
    })
}

/// Runs every replication of sample-size pair `cell` (in parallel on the
/// current rayon pool).
fn run_series(grid: &StudyGrid, cell: usize) -> Result<SizeSeries> {
    let (n1, n2) = grid.sample_sizes[cell];
    let reps: Vec<Replication> = (0..grid.n_replications)
        .into_par_iter()
        .map(|r| one_replication(grid, cell, r, [n1, n2]))
        .collect::<Result<_>>()?;
    let chains = reps
        .iter()
        .filter_map(|r| r.chains.as_ref())
        .fold(None, |acc: Option<ChainSummary>, c| {
            Some(acc.map_or(*c, |a| a.merge(c)))
        });
    Ok(SizeSeries {
        n1,
        n2,
        values: reps.iter().map(|r| r.value).collect(),
        chains,
        redrawn_samples: reps.iter().map(|r| r.redrawn).sum(),
    })
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn cells_for(grid: &StudyGrid, series: &SizeSeries) -> Vec<CellResult> {
    let m = median(&series.values);
    let reps = series.values.len();
    grid.thresholds
        .iter()
        .map(|&t| {
            let exceedances = series
                .values
                .iter()
                .filter(|&&v| {
                    if grid.study == StudyKind::Bootstrap {
                        v < t
                    } else {
                        v > t
                    }
                })
                .count();
            let rate = exceedances as f64 / reps as f64;
            let (ci_low, ci_high) = wilson_interval(exceedances, reps, Z_95);
            let reference = grid.reference_for(series.n1, series.n2, t);
            let within_3se = reference.map(|p| (rate - p).abs() <= 3.0 * (p * (1.0 - p) / reps as f64).sqrt());
            CellResult {
                n1: series.n1,
                n2: series.n2,
                threshold: t,
                replications: reps,
                exceedances,
                rate,
                ci_low,
                ci_high,
                median: m,
                reference,
                within_3se,
            }
        })
        .collect()
}

fn run_cells(grid: &StudyGrid, keep_raw: bool) -> Result<StudyResult> {
    grid.validate()?;
    let mut cells = Vec::new();
    let mut series = Vec::new();
    let mut chains = Vec::new();
    for c in 0..grid.sample_sizes.len() {
        let s = run_series(grid, c)?;
        cells.extend(cells_for(grid, &s));
        if let Some(ch) = s.chains {
            chains.push(ch);
        }
        if keep_raw {
            series.push(s);
        }
    }
    Ok(StudyResult {
        study: grid.study,
        model: grid.model,
        n_replications: grid.n_replications,
        master_seed: grid.master_seed,
        cells,
        series,
        chains,
        uniformity: Vec::new(),
    })
}

/// False non-conformity rates: the fraction of replications with
/// `δ_H > threshold` when both populations share the same CV.
pub fn run_fncr_study(grid: &StudyGrid) -> Result<StudyResult> {
    if !grid.cvs_equal() {
        return Err(SimError::Precondition(
            "false non-conformity rates need populations with equal CVs".into(),
        ));
    }
    let mut g = grid.clone();
    g.study = StudyKind::Fncr;
    run_cells(&g, grid.keep_raw)
}

/// `δ_H` under distinct CVs; raw values are always retained so the median
/// trend over sample sizes can be inspected.
pub fn run_consistency_study(grid: &StudyGrid) -> Result<StudyResult> {
    if grid.cvs_equal() {
        return Err(SimError::Precondition(
            "a consistency study needs populations with different CVs".into(),
        ));
    }
    let mut g = grid.clone();
    g.study = StudyKind::Consistency;
    run_cells(&g, true)
}

/// Kolmogorov–Smirnov test of the replicated `δ_H` against Unif(0, 1), one
/// result per sample-size pair.
pub fn run_uniformity_check(grid: &StudyGrid) -> Result<Vec<UniformityResult>> {
    if grid.n_replications < MIN_UNIFORMITY_REPLICATIONS {
        return Err(SimError::Precondition(format!(
            "a uniformity check needs at least {MIN_UNIFORMITY_REPLICATIONS} replications, got {}",
            grid.n_replications
        )));
    }
    if !grid.cvs_equal() {
        log::warn!("uniformity check on populations with different CVs; expect rejection");
    }
    let mut g = grid.clone();
    g.study = StudyKind::Uniformity;
    g.validate()?;
    (0..g.sample_sizes.len())
        .map(|c| {
            let s = run_series(&g, c)?;
            let (ks_statistic, p_value) = ks_uniform(&s.values);
            Ok(UniformityResult {
                n1: s.n1,
                n2: s.n2,
                replications: s.values.len(),
                ks_statistic,
                p_value,
                chains: s.chains,
            })
        })
        .collect()
}

/// Rejection rates of the bootstrap CV test under equal CVs, one cell per
/// (sample-size pair, level).
pub fn run_bootstrap_study(grid: &StudyGrid) -> Result<StudyResult> {
    let mut g = grid.clone();
    g.study = StudyKind::Bootstrap;
    run_cells(&g, grid.keep_raw)
}

/// Dispatches on `grid.study`.
pub fn run_grid(grid: &StudyGrid) -> Result<StudyResult> {
    match grid.study {
        StudyKind::Fncr => run_fncr_study(grid),
        StudyKind::Consistency => run_consistency_study(grid),
        StudyKind::Bootstrap => run_bootstrap_study(grid),
        StudyKind::Uniformity => {
            let uniformity = run_uniformity_check(grid)?;
            Ok(StudyResult {
                study: StudyKind::Uniformity,
                model: grid.model,
                n_replications: grid.n_replications,
                master_seed: grid.master_seed,
                cells: Vec::new(),
                series: Vec::new(),
                chains: uniformity.iter().filter_map(|u| u.chains).collect(),
                uniformity,
            })
        }
    }
}
