//! Nonparametric bootstrap with percentile and bias-corrected accelerated
//! confidence intervals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::KeyStream;

const BOOT_TAG: u64 = 0x626f_6f74; // "boot"
const JACK_TAG: u64 = 0x6a61_636b; // "jack"
/// Grouped jackknife kicks in beyond this sample size.
const JACKKNIFE_GROUP_LIMIT: usize = 2000;
const JACKKNIFE_GROUPS: usize = 200;
/// More than this fraction of failed replicates aborts the bootstrap.
const MAX_FAILURE_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalType {
    Percentile,
    Bca,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    /// True when a degenerate replicate distribution forced a percentile
    /// fallback for a BCa request.
    pub degenerate_fallback: bool,
}

/// Replicate draws and intervals for a vector-valued estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub requested: usize,
    pub failed: usize,
    pub level: f64,
    pub interval: IntervalType,
    pub names: Vec<String>,
    pub point: Vec<f64>,
    /// Successful replicate values, one vector per statistic.
    pub replicate_values: Vec<Vec<f64>>,
    pub intervals: Vec<ConfidenceInterval>,
}

/// Row indices (with replacement) for bootstrap replicate `b`; a pure
/// function of (seed, b, n).
pub fn resample_indices(seed: u64, replicate: u64, n: usize) -> Vec<usize> {
    let mut stream = KeyStream::new(seed, &[BOOT_TAG, replicate]);
    (0..n).map(|_| stream.next_index(n)).collect()
}

/// Type-6 quantile of pre-sorted values.
pub(crate) fn quantile_type6(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let h = (n as f64 + 1.0) * p;
    if h <= 1.0 {
        return sorted[0];
    }
    if h >= n as f64 {
        return sorted[n - 1];
    }
    let lo = h.floor() as usize; // 1-based
    let frac = h - lo as f64;
    sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1])
}

/// BCa-adjusted lower/upper quantile levels. With z0 = 0 and a = 0 these
/// reduce exactly to the percentile levels.
pub(crate) fn bca_adjusted_levels(z0: f64, accel: f64, level: f64) -> (f64, f64) {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let alpha = (1.0 - level) / 2.0;
    let z_lo = normal.inverse_cdf(alpha);
    let z_hi = normal.inverse_cdf(1.0 - alpha);
    let adjust = |z: f64| -> f64 {
        let denom = 1.0 - accel * (z0 + z);
        if denom <= 0.0 {
            // adjustment blew past the distribution edge
            return if z0 + z > 0.0 { 1.0 } else { 0.0 };
        }
        normal.cdf(z0 + (z0 + z) / denom)
    };
    (adjust(z_lo), adjust(z_hi))
}

fn jackknife_acceleration(jack: &[f64]) -> f64 {
    let m = jack.len() as f64;
    let mean = jack.iter().sum::<f64>() / m;
    let mut num = 0.0;
    let mut den = 0.0;
    for &v in jack {
        let d = mean - v;
        den += d * d;
        num += d * d * d;
    }
    if den <= 0.0 {
        return 0.0;
    }
    num / (6.0 * den.powf(1.5))
}

/// Resample the dataset with replacement B times, re-run the estimator on
/// each replicate, and form confidence intervals per statistic.
///
/// The estimator receives the replicate id (0 = original data) so keyed
/// Monte Carlo draws differ across replicates but are reproducible. Failed
/// replicates are dropped and counted; more than 10% failures is an error.
pub fn bootstrap<F>(
    dataset: &Dataset,
    estimator: F,
    replicates: usize,
    seed: u64,
    interval: IntervalType,
    level: f64,
    names: Vec<String>,
) -> Result<BootstrapResult>
where
    F: Fn(&Dataset, u64) -> Result<Vec<f64>> + Sync,
{
    if replicates < 2 {
        return Err(Error::Bootstrap("need at least 2 bootstrap replicates".into()));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::Bootstrap(format!("level must be in (0,1), got {level}")));
    }
    let point = estimator(dataset, 0)?;
    if point.len() != names.len() {
        return Err(Error::Bootstrap("statistic name count mismatch".into()));
    }
    let n = dataset.n();

    let raw: Vec<Option<Vec<f64>>> = (1..=replicates as u64)
        .into_par_iter()
        .map(|b| {
            let idx = resample_indices(seed, b, n);
            let sub = dataset.subset(&idx).ok()?;
            let values = estimator(&sub, b).ok()?;
            (values.len() == point.len()).then_some(values)
        })
        .collect();
    let failed = raw.iter().filter(|r| r.is_none()).count();
    if (failed as f64) > MAX_FAILURE_FRACTION * replicates as f64 {
        return Err(Error::Bootstrap(format!(
            "{failed} of {replicates} bootstrap replicates failed"
        )));
    }
    let successful: Vec<&Vec<f64>> = raw.iter().flatten().collect();
    let b_ok = successful.len();
    if b_ok < 2 {
        return Err(Error::Bootstrap("fewer than 2 successful replicates".into()));
    }
    let mut replicate_values: Vec<Vec<f64>> = vec![Vec::with_capacity(b_ok); point.len()];
    for rep in &successful {
        for (s, v) in rep.iter().enumerate() {
            replicate_values[s].push(*v);
        }
    }

    // Jackknife accelerations for BCa, shared across statistics.
    let accelerations: Option<Vec<f64>> = match interval {
        IntervalType::Percentile => None,
        IntervalType::Bca => {
            let groups: Vec<Vec<usize>> = if n > JACKKNIFE_GROUP_LIMIT {
                // grouped jackknife: contiguous blocks of near-equal size
                let g = JACKKNIFE_GROUPS.min(n);
                (0..g)
                    .map(|gi| (0..n).filter(|i| i % g == gi).collect())
                    .collect()
            } else {
                (0..n).map(|i| vec![i]).collect()
            };
            let jack: Result<Vec<Vec<f64>>> = groups
                .par_iter()
                .map(|drop| {
                    let keep: Vec<usize> = (0..n).filter(|i| !drop.contains(i)).collect();
                    let sub = dataset.subset(&keep).map_err(|e| {
                        Error::Bootstrap(format!("jackknife subset failed: {e}"))
                    })?;
                    estimator(&sub, JACK_TAG)
                })
                .collect();
            let jack = jack?;
            let mut accel = Vec::with_capacity(point.len());
            for s in 0..point.len() {
                let vals: Vec<f64> = jack.iter().map(|j| j[s]).collect();
                accel.push(jackknife_acceleration(&vals));
            }
            Some(accel)
        }
    };

    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut intervals = Vec::with_capacity(point.len());
    for s in 0..point.len() {
        let mut sorted = replicate_values[s].clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let degenerate = sorted.first() == sorted.last();
        let (lo_p, hi_p, fallback) = match (interval, degenerate) {
            (IntervalType::Percentile, _) | (IntervalType::Bca, true) => {
                let alpha = (1.0 - level) / 2.0;
                (alpha, 1.0 - alpha, interval == IntervalType::Bca)
            }
            (IntervalType::Bca, false) => {
                let below = sorted.iter().filter(|&&v| v < point[s]).count() as f64;
                let frac = (below / b_ok as f64)
                    .clamp(1.0 / (2.0 * b_ok as f64), 1.0 - 1.0 / (2.0 * b_ok as f64));
                let z0 = normal.inverse_cdf(frac);
                let accel = accelerations.as_ref().map(|a| a[s]).unwrap_or(0.0);
                let (lo, hi) = bca_adjusted_levels(z0, accel, level);
                (lo, hi, false)
            }
        };
        intervals.push(ConfidenceInterval {
            lower: quantile_type6(&sorted, lo_p),
            upper: quantile_type6(&sorted, hi_p),
            degenerate_fallback: fallback,
        });
    }

    Ok(BootstrapResult {
        requested: replicates,
        failed,
        level,
        interval,
        names,
        point,
        replicate_values,
        intervals,
    })
}
