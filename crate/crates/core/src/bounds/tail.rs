//! Markov and Chernoff tail inequalities.

use crate::error::{domain, Result};
use crate::mutation::flip_count_pmf;

/// Pr{X >= t} <= E[X] / t for non-negative X, clamped to 1.
pub fn markov_bound(expectation: f64, t: f64) -> Result<f64> {
    if !(expectation >= 0.0 && expectation.is_finite()) {
        return domain(format!(
            "expectation must be non-negative, got {expectation}"
        ));
    }
    if !(t > 0.0) {
        return domain(format!("threshold must be positive, got {t}"));
    }
    Ok((expectation / t).min(1.0))
}

/// ln of Pr{X <= (1 - delta) E[X]} <= exp(-E[X] delta^2 / 2).
pub fn ln_chernoff_lower(expectation: f64, delta: f64) -> Result<f64> {
    if !(expectation >= 0.0 && expectation.is_finite()) {
        return domain(format!(
            "expectation must be non-negative, got {expectation}"
        ));
    }
    if !(0.0..=1.0).contains(&delta) {
        return domain(format!("lower-tail delta must lie in [0, 1], got {delta}"));
    }
    Ok(-expectation * delta * delta / 2.0)
}

pub fn chernoff_lower(expectation: f64, delta: f64) -> Result<f64> {
    ln_chernoff_lower(expectation, delta).map(|l| l.exp().min(1.0))
}

/// ln of Pr{X > (1 + delta) E[X]} <= (e^delta / (1 + delta)^(1 + delta))^E[X].
pub fn ln_chernoff_upper(expectation: f64, delta: f64) -> Result<f64> {
    if !(expectation >= 0.0 && expectation.is_finite()) {
        return domain(format!(
            "expectation must be non-negative, got {expectation}"
        ));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("upper-tail delta must be positive, got {delta}"));
    }
    Ok(expectation * (delta - (1.0 + delta) * delta.ln_1p()))
}

pub fn chernoff_upper(expectation: f64, delta: f64) -> Result<f64> {
    ln_chernoff_upper(expectation, delta).map(|l| l.exp().min(1.0))
}

/// Exact Pr{X > k} for X ~ Bin(n, p).
pub fn binomial_tail_above(n: usize, p: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability must lie in [0, 1], got {p}"));
    }
    let mut total = 0.0;
    for j in (k + 1)..=n {
        total += flip_count_pmf(n, p, j)?;
    }
    Ok(total.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markov_examples() {
        assert_eq!(markov_bound(1.0, 2.0).unwrap(), 0.5);
        assert_eq!(markov_bound(15.0, 20.0).unwrap(), 0.75);
        assert_eq!(markov_bound(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(markov_bound(5.0, 1.0).unwrap(), 1.0);
        assert!(markov_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn chernoff_examples() {
        let direct = (1f64 / 3.0).exp().powf(15.0) / (4f64 / 3.0).powf(20.0);
        let v = chernoff_upper(15.0, 1.0 / 3.0).unwrap();
        assert!((v - direct).abs() < 1e-12 * direct);
        assert!((v - 0.470_7).abs() < 1e-4);
        assert!(v <= (29f64 / 30.0).powi(15));
        assert_eq!(chernoff_lower(10.0, 0.0).unwrap(), 1.0);
        assert!(chernoff_lower(10.0, 1.5).is_err());
        assert!(chernoff_upper(10.0, 0.0).is_err());
    }

    #[test]
    fn exact_binomial_tail() {
        assert!((binomial_tail_above(2, 0.5, 0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(binomial_tail_above(5, 0.3, 5).unwrap(), 0.0);
    }
}
