use rand::Rng;

use super::{
    check_common, expect_kind, AlgorithmConfig, AlgorithmKind, Observer, RunOptions, RunTrace,
    TieBreak,
};
use crate::bitstring::Bitstring;
use crate::error::Result;
use crate::fitness::FitnessFunction;
use crate::mutation::StandardBitMutation;
use crate::rng::RngStream;

/// Random local search: flip exactly one uniformly chosen bit per step.
pub fn run_rls<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
) -> Result<RunTrace> {
    expect_kind(cfg, AlgorithmKind::Rls)?;
    check_common(f, cfg, opts)?;
    Ok(rls(f, cfg, opts, rng, None))
}

/// (1+1) EA with standard bit mutation at rate chi/n.
pub fn run_one_plus_one_ea<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
) -> Result<RunTrace> {
    expect_kind(cfg, AlgorithmKind::OnePlusOneEa)?;
    check_common(f, cfg, opts)?;
    Ok(one_plus_one(f, cfg, opts, rng, None))
}

pub(super) fn rls<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
    observer: Option<Observer<'_>>,
) -> RunTrace {
    let n = cfg.n();
    elitist_single(f, cfg, opts, rng, observer, |y, rng| {
        y.flip(rng.gen_range(0..n))
    })
}

pub(super) fn one_plus_one<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
    observer: Option<Observer<'_>>,
) -> RunTrace {
    let op = StandardBitMutation::new(cfg.mutation);
    elitist_single(f, cfg, opts, rng, observer, |y, rng| {
        op.mutate_in_place(y, rng);
    })
}

fn elitist_single<F, V>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
    mut observer: Option<Observer<'_>>,
    mut vary: V,
) -> RunTrace
where
    F: FitnessFunction + ?Sized,
    V: FnMut(&mut Bitstring, &mut RngStream),
{
    let mut trace = RunTrace::new();
    let mut x = opts.start.sample(cfg.n(), rng);
    let mut fx = f.evaluate(&x);
    trace.evaluated(fx, opts.target.reached(&x));
    trace.track(fx);
    if let Some(obs) = observer.as_mut() {
        obs(&x);
    }

    let mut y = x.clone();
    while trace.hit_time.is_none() && trace.evaluations < opts.budget.max_evaluations {
        y.copy_from(&x);
        vary(&mut y, rng);
        let fy = f.evaluate(&y);
        trace.evaluated(fy, opts.target.reached(&y));
        trace.generations += 1;
        let accept = if fy > fx {
            true
        } else if fy == fx {
            match cfg.tie_break {
                TieBreak::PreferOffspring => true,
                TieBreak::UniformRandom => rng.gen_bool(0.5),
            }
        } else {
            false
        };
        if accept {
            std::mem::swap(&mut x, &mut y);
            fx = fy;
            trace.track(fx);
        }
        if let Some(obs) = observer.as_mut() {
            obs(&x);
        }
    }
    trace.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{Budget, StartPolicy};
    use crate::fitness::{Target, UnitationFunction};
    use crate::unitation::UnitationSpec;

    fn onemax(n: usize) -> UnitationFunction {
        UnitationFunction::new(UnitationSpec::onemax(n)).unwrap()
    }

    #[test]
    fn already_optimal_start_hits_at_first_evaluation() {
        let f = onemax(8);
        let cfg = AlgorithmConfig::rls(8).unwrap();
        let opts = RunOptions::default().with_start(StartPolicy::FixedZeros(0));
        let t = run_rls(&f, &cfg, &opts, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(t.hit_time, Some(1));
        assert_eq!(t.evaluations, 1);
        assert!(!t.censored);
    }

    #[test]
    fn single_bit_ea_hits_at_second_evaluation() {
        let f = onemax(1);
        let cfg = AlgorithmConfig::one_plus_one(1, 1.0).unwrap();
        let opts = RunOptions::default().with_start(StartPolicy::FixedZeros(1));
        for run in 0..50 {
            let t = run_one_plus_one_ea(&f, &cfg, &opts, &mut RngStream::new(3, run)).unwrap();
            assert_eq!(t.hit_time, Some(2));
        }
    }

    #[test]
    fn zeros_never_increase_on_onemax() {
        let f = onemax(30);
        let cfg = AlgorithmConfig::one_plus_one(30, 1.0).unwrap();
        for run in 0..20 {
            let mut zeros = Vec::new();
            let mut obs = |x: &Bitstring| zeros.push(x.count_zeros());
            let t = crate::algorithms::run_observed(
                &f,
                &cfg,
                &RunOptions::default(),
                &mut RngStream::new(11, run),
                Some(&mut obs),
            )
            .unwrap();
            assert!(t.success());
            assert!(zeros.windows(2).all(|w| w[1] <= w[0]));
            assert!(t
                .best_fitness_history
                .windows(2)
                .all(|w| w[1].1 > w[0].1 && w[1].0 > w[0].0));
            assert_eq!(t.evaluations, t.generations + 1);
        }
    }

    #[test]
    fn rls_on_needle_keeps_best_flat_until_hit() {
        let f = UnitationFunction::new(UnitationSpec::needle(10)).unwrap();
        let cfg = AlgorithmConfig::rls(10).unwrap();
        let opts = RunOptions::default()
            .with_start(StartPolicy::FixedZeros(10))
            .with_budget(50_000);
        let mut moved = 0usize;
        let mut last: Option<Bitstring> = None;
        let mut obs = |x: &Bitstring| {
            if last.as_ref().is_some_and(|l| l != x) {
                moved += 1;
            }
            last = Some(x.clone());
        };
        let t = crate::algorithms::run_observed(
            &f,
            &cfg,
            &opts,
            &mut RngStream::new(2, 0),
            Some(&mut obs),
        )
        .unwrap();
        // every plateau move is accepted, so the point changes every step
        assert_eq!(moved as u64, t.generations);
        let values: Vec<f64> = t.best_fitness_history.iter().map(|h| h.1).collect();
        assert!(values == vec![0.0] || values == vec![0.0, 1.0]);
    }

    #[test]
    fn budget_one_only_evaluates_initial_point() {
        let f = onemax(20);
        let cfg = AlgorithmConfig::one_plus_one(20, 1.0).unwrap();
        let opts = RunOptions {
            budget: Budget::new(1).unwrap(),
            ..Default::default()
        };
        let t = run_one_plus_one_ea(&f, &cfg, &opts, &mut RngStream::new(1, 1)).unwrap();
        assert_eq!(t.evaluations, 1);
        assert!(t.censored);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let f = onemax(5);
        let cfg = AlgorithmConfig::rls(5).unwrap();
        assert!(
            run_one_plus_one_ea(&f, &cfg, &RunOptions::default(), &mut RngStream::new(0, 0))
                .is_err()
        );
    }

    #[test]
    fn block_target_stops_early() {
        let f = UnitationFunction::new(UnitationSpec::with_plateau(100, 10, 60).unwrap()).unwrap();
        let cfg = AlgorithmConfig::one_plus_one(100, 1.0).unwrap();
        let opts = RunOptions::default()
            .with_start(StartPolicy::FixedZeros(70))
            .with_target(Target::ZerosAtMost(60));
        let t = run_one_plus_one_ea(&f, &cfg, &opts, &mut RngStream::new(4, 0)).unwrap();
        assert!(t.success());
        assert!(t.hit_time.unwrap() < 1_000);
    }
}
