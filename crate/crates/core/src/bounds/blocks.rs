//! Closed-form runtime bounds for the (1+1) EA on single unitation blocks,
//! measured in generations from the block start to the block end.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use super::drift::{additive_drift_bounds, AdditiveDrift};
use super::numeric::harmonic;
use super::BoundReport;
use crate::error::{domain, LabError, Result};

fn check_block(n: usize, m: usize, k: usize) -> Result<()> {
    if m == 0 || m + k > n {
        return domain(format!(
            "block needs m >= 1 and m + k <= n, got n = {n}, m = {m}, k = {k}"
        ));
    }
    Ok(())
}

/// Waiting-time sandwich for crossing a gap block, as natural logs and (when
/// finite) linear values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBlockBounds {
    pub ln_inner_lower: f64,
    pub ln_inner_upper: f64,
    pub ln_outer_lower: f64,
    pub ln_outer_upper: f64,
}

impl GapBlockBounds {
    pub fn inner_lower(&self) -> Option<f64> {
        finite_exp(self.ln_inner_lower)
    }

    pub fn inner_upper(&self) -> Option<f64> {
        finite_exp(self.ln_inner_upper)
    }

    pub fn outer_lower(&self) -> Option<f64> {
        finite_exp(self.ln_outer_lower)
    }

    pub fn outer_upper(&self) -> Option<f64> {
        finite_exp(self.ln_outer_upper)
    }
}

fn finite_exp(x: f64) -> Option<f64> {
    let v = x.exp();
    v.is_finite().then_some(v)
}

/// Inner pair `(n^m / C(m+k, m), e n^m / C(m+k, m))`, outer pair
/// `((nm / ((m+k) e))^m, e (nm / (m+k))^m)`.
pub fn gap_block_bounds(n: usize, m: usize, k: usize) -> Result<GapBlockBounds> {
    check_block(n, m, k)?;
    let (nf, mf, kf) = (n as f64, m as f64, k as f64);
    let ln_c = ln_binomial((m + k) as u64, m as u64);
    let ln_inner = mf * nf.ln() - ln_c;
    let ln_outer = mf * ((nf * mf).ln() - (mf + kf).ln());
    Ok(GapBlockBounds {
        ln_inner_lower: ln_inner,
        ln_inner_upper: 1.0 + ln_inner,
        ln_outer_lower: ln_outer - mf,
        ln_outer_upper: 1.0 + ln_outer,
    })
}

/// e n H_n: fitness-level upper bound for OneMax.
pub fn onemax_afl_upper(n: usize) -> Result<f64> {
    if n == 0 {
        return domain("n must be positive");
    }
    Ok(std::f64::consts::E * n as f64 * harmonic(n as u64))
}

/// e n ln((m+k)/k) for a linear block of length m ending at position k.
pub fn linear_block_upper(n: usize, m: usize, k: usize) -> Result<f64> {
    check_block(n, m, k)?;
    if k == 0 {
        return Err(LabError::Regime(
            "the linear-block upper bound needs k >= 1; use onemax_afl_upper for k = 0".into(),
        ));
    }
    Ok(std::f64::consts::E * n as f64 * ((m + k) as f64 / k as f64).ln())
}

/// chi n (H_{m+k} - H_k) with chi = (1 - 1/n)^(n-1): the lower fitness-level
/// bound from the block start.
pub fn linear_block_lower(n: usize, m: usize, k: usize) -> Result<f64> {
    check_block(n, m, k)?;
    let nf = n as f64;
    let chi = (1.0 - 1.0 / nf).powi(n as i32 - 1);
    Ok(chi * nf * (harmonic((m + k) as u64) - harmonic(k as u64)))
}

/// `(mn / (2(m+k) - n), mn / (2k - n))`, valid only for k > n/2.
pub fn plateau_bounds(n: usize, m: usize, k: usize) -> Result<(f64, f64)> {
    let (upper, lower) = plateau_drift_reports(n, m, k)?;
    Ok((
        lower.bound_value.unwrap_or(f64::NAN),
        upper.bound_value.unwrap_or(f64::NAN),
    ))
}

/// Additive-drift reports behind [`plateau_bounds`]: `(upper, lower)`.
pub fn plateau_drift_reports(n: usize, m: usize, k: usize) -> Result<(BoundReport, BoundReport)> {
    check_block(n, m, k)?;
    if 2 * k <= n {
        return Err(LabError::Regime(format!(
            "plateau bounds need k > n/2 so the drift points towards the block end, got k = {k}, n = {n}"
        )));
    }
    let (nf, mf) = (n as f64, m as f64);
    let eps_upper = (2 * k) as f64 / nf - 1.0;
    let eps_lower = (2 * (m + k)) as f64 / nf - 1.0;
    let (upper, _) = additive_drift_bounds(&AdditiveDrift {
        b: mf,
        y0: mf,
        eps: eps_upper,
    })?;
    let (_, lower) = additive_drift_bounds(&AdditiveDrift {
        b: mf,
        y0: mf,
        eps: eps_lower,
    })?;
    Ok((upper, lower))
}
