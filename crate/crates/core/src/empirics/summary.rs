use serde::{Deserialize, Serialize};

use super::stats::{quantile_sorted, wilson_interval, Z_95};
use super::RunSample;
use crate::error::{domain, Result};

/// Smallest number of successful runs for which a confidence interval on the
/// mean is reported.
pub const MIN_RUNS_FOR_CI: u64 = 100;

const CURVE_POINTS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: u64,
    /// Fraction of all runs with hit time at most `t`.
    pub cdf: f64,
}

/// Runtime statistics of a batch; times are hit times in evaluations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeSummary {
    pub runs: u64,
    pub successes: u64,
    pub censored: u64,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub ci95: Option<[f64; 2]>,
    pub median: Option<f64>,
    pub q05: Option<f64>,
    pub q25: Option<f64>,
    pub q75: Option<f64>,
    pub q95: Option<f64>,
    /// Largest `evaluations` entry over all runs.
    pub max_observed: u64,
    pub curve: Vec<CurvePoint>,
    #[serde(skip)]
    hit_times: Vec<u64>,
}

impl RuntimeSummary {
    pub fn from_samples(samples: &[RunSample]) -> Self {
        let mut hits: Vec<u64> = samples
            .iter()
            .filter(|s| s.success)
            .map(|s| s.evaluations)
            .collect();
        hits.sort_unstable();
        let runs = samples.len() as u64;
        let successes = hits.len() as u64;
        let max_observed = samples.iter().map(|s| s.evaluations).max().unwrap_or(0);

        let mean = (!hits.is_empty())
            .then(|| hits.iter().map(|&h| h as u128).sum::<u128>() as f64 / hits.len() as f64);
        let stderr = match mean {
            Some(m) if hits.len() >= 2 => {
                let ss: f64 = hits.iter().map(|&h| (h as f64 - m).powi(2)).sum();
                let k = hits.len() as f64;
                Some((ss / (k - 1.0)).sqrt() / k.sqrt())
            }
            _ => None,
        };
        let ci95 = match (mean, stderr) {
            (Some(m), Some(se)) if successes >= MIN_RUNS_FOR_CI => {
                Some([m - Z_95 * se, m + Z_95 * se])
            }
            _ => None,
        };

        let curve = log_grid(max_observed)
            .into_iter()
            .map(|t| CurvePoint {
                t,
                cdf: hits.partition_point(|&h| h <= t) as f64 / runs.max(1) as f64,
            })
            .collect();

        Self {
            runs,
            successes,
            censored: runs - successes,
            mean,
            stderr,
            ci95,
            median: quantile_sorted(&hits, 0.5),
            q05: quantile_sorted(&hits, 0.05),
            q25: quantile_sorted(&hits, 0.25),
            q75: quantile_sorted(&hits, 0.75),
            q95: quantile_sorted(&hits, 0.95),
            max_observed,
            curve,
            hit_times: hits,
        }
    }

    /// Sorted hit times of the successful runs.
    pub fn hit_times(&self) -> &[u64] {
        &self.hit_times
    }

    /// Half-width of the 95% interval on the mean, when emitted.
    pub fn ci_half_width(&self) -> Option<f64> {
        self.ci95.map(|[lo, hi]| (hi - lo) / 2.0)
    }
}

fn log_grid(max: u64) -> Vec<u64> {
    if max == 0 {
        return Vec::new();
    }
    let top = (max as f64).ln();
    let mut grid: Vec<u64> = (0..CURVE_POINTS)
        .map(|i| (top * i as f64 / (CURVE_POINTS - 1) as f64).exp().round() as u64)
        .map(|t| t.clamp(1, max))
        .collect();
    grid.push(max);
    grid.dedup();
    grid
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub t: f64,
    pub probability: f64,
    pub lower: f64,
    pub upper: f64,
    /// Half the width of the Wilson interval.
    pub half_width: f64,
}

/// Empirical Pr{T > t}: the complement of the empirical distribution function
/// at `t`, counting censored runs in the tail, with a 95% Wilson interval.
pub fn empirical_tail(summary: &RuntimeSummary, t: f64) -> Result<TailEstimate> {
    if !(t >= 0.0) {
        return domain(format!("tail threshold must be non-negative, got {t}"));
    }
    if summary.runs == 0 {
        return domain("empty summary");
    }
    let at_most = summary.hit_times.partition_point(|&h| h as f64 <= t) as u64;
    let above = summary.runs - at_most;
    let (lower, upper) = wilson_interval(above, summary.runs, Z_95)?;
    Ok(TailEstimate {
        t,
        probability: above as f64 / summary.runs as f64,
        lower,
        upper,
        half_width: (upper - lower) / 2.0,
    })
}
