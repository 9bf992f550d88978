use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::Z_95;
use super::{with_pool, Experiment};
use crate::algorithms::run_observed;
use crate::bitstring::Bitstring;
use crate::error::{LabError, Result};
use crate::fitness::Objective;
use crate::rng::RngStream;

/// States visited fewer times than this are left out of a drift estimate.
pub const MIN_DRIFT_VISITS: u64 = 30;

/// Distance to the target used for drift estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceFn {
    /// Number of zero bits.
    Zeros,
    /// ln(zeros + 1).
    LnZerosPlusOne,
    /// Total weight of the zero bits of a linear function.
    RemainingWeight,
}

impl DistanceFn {
    pub fn eval(&self, f: &Objective, x: &Bitstring) -> f64 {
        match self {
            DistanceFn::Zeros => x.count_zeros() as f64,
            DistanceFn::LnZerosPlusOne => (x.count_zeros() as f64).ln_1p(),
            DistanceFn::RemainingWeight => match f {
                Objective::Linear(l) => l.remaining_weight(x),
                Objective::Unitation(_) => x.count_zeros() as f64,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDrift {
    pub zeros: usize,
    pub visits: u64,
    /// Mean one-step decrease of the distance.
    pub mean: f64,
    /// Half-width of the 95% normal interval.
    pub half_width: f64,
}

impl StateDrift {
    pub fn interval(&self) -> (f64, f64) {
        (self.mean - self.half_width, self.mean + self.half_width)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    pub distance: DistanceFn,
    /// States with at least [`MIN_DRIFT_VISITS`] observed departures.
    pub states: Vec<StateDrift>,
    /// Observed departures from every zeros-count state.
    pub visits: Vec<u64>,
}

impl DriftEstimate {
    pub fn state(&self, zeros: usize) -> Option<&StateDrift> {
        self.states.iter().find(|s| s.zeros == zeros)
    }
}

#[derive(Clone, Copy, Default)]
struct Acc {
    count: u64,
    sum: f64,
    sum_sq: f64,
}

/// Estimates per-state drift from the tracked individual of every run,
/// aggregated by its zeros-count.
pub fn estimate_drift(
    e: &Experiment,
    distance: DistanceFn,
    threads: usize,
) -> Result<DriftEstimate> {
    e.validate()?;
    let f = e.function.build()?;
    if distance == DistanceFn::RemainingWeight && !matches!(f, Objective::Linear(_)) {
        return Err(LabError::Domain(
            "remaining-weight distance needs a linear function".into(),
        ));
    }
    let n = e.function.n();
    let opts = e.options();
    let per_run = with_pool(threads, || {
        (0..e.runs)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![Acc::default(); n + 1];
                let mut prev: Option<(usize, f64)> = None;
                let mut obs = |x: &Bitstring| {
                    let d = distance.eval(&f, x);
                    if let Some((z, pd)) = prev {
                        let a = &mut acc[z];
                        let dec = pd - d;
                        a.count += 1;
                        a.sum += dec;
                        a.sum_sq += dec * dec;
                    }
                    prev = Some((x.count_zeros(), d));
                };
                let mut rng = RngStream::new(e.master_seed, i);
                run_observed(&f, &e.algorithm, &opts, &mut rng, Some(&mut obs))?;
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut total = vec![Acc::default(); n + 1];
    for acc in &per_run {
        for (t, a) in total.iter_mut().zip(acc) {
            t.count += a.count;
            t.sum += a.sum;
            t.sum_sq += a.sum_sq;
        }
    }
    let states = total
        .iter()
        .enumerate()
        .filter(|(_, a)| a.count >= MIN_DRIFT_VISITS)
        .map(|(z, a)| {
            let k = a.count as f64;
            let mean = a.sum / k;
            let var = ((a.sum_sq - k * mean * mean) / (k - 1.0)).max(0.0);
            StateDrift {
                zeros: z,
                visits: a.count,
                mean,
                half_width: Z_95 * (var / k).sqrt(),
            }
        })
        .collect();
    Ok(DriftEstimate {
        distance,
        states,
        visits: total.iter().map(|a| a.count).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{AlgorithmConfig, StartPolicy};
    use crate::fitness::FunctionSpec;
    use crate::unitation::UnitationSpec;

    #[test]
    fn rls_onemax_drift_matches_zeros_fraction() {
        let n = 10;
        let e = Experiment::new(
            FunctionSpec::Unitation(UnitationSpec::onemax(n)),
            AlgorithmConfig::rls(n).unwrap(),
            2000,
            10_000,
            3,
        )
        .with_start(StartPolicy::FixedZeros(n));
        let d = estimate_drift(&e, DistanceFn::Zeros, 2).unwrap();
        assert!(d.state(0).is_none());
        assert_eq!(d.visits[0], 0);
        for s in &d.states {
            let exact = s.zeros as f64 / n as f64;
            assert!(
                (s.mean - exact).abs() <= 4.0 * s.half_width.max(1e-12),
                "{s:?}"
            );
        }
    }

    #[test]
    fn remaining_weight_needs_linear_function() {
        let e = Experiment::new(
            FunctionSpec::Unitation(UnitationSpec::onemax(5)),
            AlgorithmConfig::rls(5).unwrap(),
            10,
            100,
            0,
        );
        assert!(estimate_drift(&e, DistanceFn::RemainingWeight, 1).is_err());
    }
}
