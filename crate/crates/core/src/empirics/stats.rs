use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{domain, Result};

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return domain(format!(
            "Wilson interval needs 0 <= successes <= trials, trials > 0 (got {successes}/{trials})"
        ));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Bins after pooling.
    pub bins: usize,
}

impl GoodnessOfFit {
    pub fn accepts(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Pearson chi-squared test of observed counts against probabilities.
///
/// Adjacent bins are pooled from the right until every pooled bin expects at
/// least `min_expected` observations; any probability mass missing from
/// `probs` is folded into the last bin.
pub fn chi_squared_gof(
    observed: &[u64],
    probs: &[f64],
    min_expected: f64,
) -> Result<GoodnessOfFit> {
    if observed.len() != probs.len() || observed.is_empty() {
        return domain("observed counts and probabilities must have the same non-zero length");
    }
    if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return domain("probabilities must lie in [0, 1]");
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return domain("no observations");
    }
    let n = total as f64;
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        obs += o as f64;
        exp += p * n;
        if exp >= min_expected {
            pooled.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    let missing = (1.0 - probs.iter().sum::<f64>()).max(0.0) * n;
    exp += missing;
    match pooled.last_mut() {
        Some(last) if exp < min_expected => {
            last.0 += obs;
            last.1 += exp;
        }
        _ if exp > 0.0 || obs > 0.0 => pooled.push((obs, exp)),
        _ => {}
    }
    if pooled.len() < 2 {
        return domain("fewer than two bins remain after pooling");
    }
    let statistic: f64 = pooled.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| crate::LabError::Numeric(e.to_string()))?;
    Ok(GoodnessOfFit {
        statistic,
        degrees_of_freedom: dof,
        p_value: dist.sf(statistic),
        bins: pooled.len(),
    })
}

/// Linear-interpolation quantile of sorted data (type 7).
pub(crate) fn quantile_sorted(sorted: &[u64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo] as f64, sorted[hi] as f64);
    Some(a + (h - lo as f64) * (b - a))
}
