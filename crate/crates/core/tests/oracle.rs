mod common;

use ea_lab::bounds::harmonic;
use ea_lab::empirics::run_batch;
use ea_lab::oracle::{
    binomial_start, build_level_chain, build_level_chain_with_target, exact_drift,
    exact_expected_hitting_time, exact_success_curve, expected_hitting_times, max_row_error,
    point_start, LevelChain,
};
use ea_lab::{
    AlgorithmConfig, AlgorithmKind, BlockKind, Experiment, FunctionSpec, StartPolicy, Target,
    TieBreak, UnitationSpec,
};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn single_configs(n: usize) -> Vec<AlgorithmConfig> {
    let ea = AlgorithmConfig::one_plus_one(n, 1.0).unwrap();
    vec![
        AlgorithmConfig::rls(n).unwrap(),
        ea,
        ea.with_tie_break(TieBreak::UniformRandom),
    ]
}

/// RLS cannot cross a gap of length two or more.
fn rls_can_finish(spec: &UnitationSpec) -> bool {
    !spec
        .blocks
        .iter()
        .any(|b| b.kind == BlockKind::Gap && b.m >= 2)
}

fn oracle_mean(spec: &UnitationSpec, cfg: &AlgorithmConfig, start: &[f64]) -> f64 {
    let chain = build_level_chain(spec, cfg).unwrap();
    exact_expected_hitting_time(&chain, start).unwrap()
}

/// Simulated mean hit time in generations and its standard error.
fn simulated_mean(
    spec: &UnitationSpec,
    cfg: &AlgorithmConfig,
    start: StartPolicy,
    runs: u64,
) -> (f64, f64) {
    let e = Experiment::new(
        FunctionSpec::Unitation(spec.clone()),
        *cfg,
        runs,
        u64::MAX,
        2024,
    )
    .with_start(start);
    let s = run_batch(&e, 0).unwrap().summary;
    assert_eq!(s.censored, 0);
    (s.mean.unwrap() - 1.0, s.stderr.unwrap())
}

#[test]
fn rls_onemax_matches_harmonic_numbers() {
    for n in 1..=20 {
        let spec = UnitationSpec::onemax(n);
        let t = oracle_mean(
            &spec,
            &AlgorithmConfig::rls(n).unwrap(),
            &point_start(n, n).unwrap(),
        );
        let exact = n as f64 * harmonic(n as u64);
        assert!((t - exact).abs() < 1e-9, "n = {n}: {t} vs {exact}");
    }
}

#[test]
fn simulation_matches_oracle_on_fixed_specs() {
    let specs = [
        UnitationSpec::onemax(12),
        UnitationSpec::with_plateau(12, 3, 7).unwrap(),
        UnitationSpec::with_gap(12, 2, 2).unwrap(),
        UnitationSpec::needle(6),
    ];
    for spec in &specs {
        for cfg in single_configs(spec.n) {
            if cfg.kind == AlgorithmKind::Rls && !rls_can_finish(spec) {
                continue;
            }
            let exact = oracle_mean(spec, &cfg, &binomial_start(spec.n));
            let (mean, se) = simulated_mean(spec, &cfg, StartPolicy::UniformRandom, 100_000);
            assert!(
                (mean - exact).abs() <= 3.0 * se,
                "{spec:?} {:?} {:?}: {mean} vs {exact} (se {se})",
                cfg.kind,
                cfg.tie_break
            );
        }
    }
}

#[test]
fn rls_from_all_zeros_takes_n_harmonic_generations() {
    let spec = UnitationSpec::onemax(3);
    let (mean, _) = simulated_mean(
        &spec,
        &AlgorithmConfig::rls(3).unwrap(),
        StartPolicy::FixedZeros(3),
        100_000,
    );
    assert!((mean - 5.5).abs() <= 0.02 * 5.5);
}

fn check_chain(chain: &LevelChain) -> Result<(), TestCaseError> {
    prop_assert!(max_row_error(chain.matrix()) < 1e-12);
    let n = chain.n();
    for z in 0..=n {
        for w in 0..=n {
            let p = chain.prob(z, w);
            prop_assert!(p >= 0.0);
            if chain.table()[w] < chain.table()[z] {
                prop_assert_eq!(p, 0.0);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chains_are_stochastic_and_elitist(spec in common::unitation_spec(12), k in 0usize..3) {
        for cfg in single_configs(spec.n) {
            let target = Target::ZerosAtMost(k.min(spec.n));
            check_chain(&build_level_chain_with_target(&spec, &cfg, target).unwrap())?;
        }
    }

    #[test]
    fn success_probability_is_monotone_and_tends_to_one(spec in common::unitation_spec(8)) {
        let cfg = AlgorithmConfig::one_plus_one(spec.n, 1.0).unwrap();
        let chain = build_level_chain(&spec, &cfg).unwrap();
        let start = binomial_start(spec.n);
        let worst = expected_hitting_times(&chain).unwrap().into_iter().fold(0.0, f64::max);
        let far = (worst * 200.0).ceil() as u64 + 10;
        let mut ts = vec![0u64, 1, 2, 5, 10, 100, 1000, far];
        ts.sort_unstable();
        ts.dedup();
        let curve = exact_success_curve(&chain, &start, &ts).unwrap();
        prop_assert!(curve.windows(2).all(|w| w[0] <= w[1] + 1e-15));
        prop_assert!((curve[0] - start[0]).abs() < 1e-15);
        prop_assert!(1.0 - curve[curve.len() - 1] < 1e-6);
    }

    /// Additive drift theorem instantiated with exact drift on plateau chains.
    #[test]
    fn additive_drift_brackets_plateau_crossing(n in 4usize..40, m_frac in 0.0f64..1.0, k_frac in 0.0f64..1.0) {
        let k = n / 2 + 1 + ((n - n / 2 - 1) as f64 * k_frac) as usize;
        prop_assume!(k < n);
        let m = 1 + ((n - k - 1) as f64 * m_frac) as usize;
        let spec = UnitationSpec::with_plateau(n, m, k).unwrap();
        for cfg in [AlgorithmConfig::rls(n).unwrap(), AlgorithmConfig::one_plus_one(n, 1.0).unwrap()] {
            let chain = build_level_chain_with_target(&spec, &cfg, Target::ZerosAtMost(k)).unwrap();
            let d = |z: usize| z.saturating_sub(k) as f64;
            let drift: Vec<f64> = exact_drift(&chain, d)
                .unwrap()
                .into_iter()
                .filter(|&(z, _)| z <= k + m)
                .map(|(_, v)| v)
                .collect();
            let lo = drift.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = drift.iter().copied().fold(0.0, f64::max);
            prop_assert!(lo > 0.0);
            let t = exact_expected_hitting_time(&chain, &point_start(n, k + m).unwrap()).unwrap();
            prop_assert!(t <= m as f64 / lo * (1.0 + 1e-9));
            prop_assert!(t >= m as f64 / hi * (1.0 - 1e-9));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 6,
        rng_seed: RngSeed::Fixed(7),
        ..ProptestConfig::default()
    })]

    #[test]
    fn simulation_matches_oracle_on_random_specs(spec in common::unitation_spec(8)) {
        let cfg = AlgorithmConfig::one_plus_one(spec.n, 1.0).unwrap();
        let exact = oracle_mean(&spec, &cfg, &binomial_start(spec.n));
        // keep the simulation cheap
        prop_assume!(exact <= 2000.0);
        let (mean, se) = simulated_mean(&spec, &cfg, StartPolicy::UniformRandom, 100_000);
        prop_assert!((mean - exact).abs() <= 3.0 * se, "{:?}: {} vs {} (se {})", spec, mean, exact, se);
    }
}
