//! Monte Carlo experiments: batch runs, runtime statistics, drift and tail
//! estimates, and comparisons against bounds and the exact oracle.

mod compare;
mod drift;
mod samples;
mod stats;
mod summary;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{run, AlgorithmConfig, RunOptions, StartPolicy};
use crate::error::{LabError, Result};
use crate::fitness::{FunctionSpec, Objective, Target};
use crate::rng::RngStream;

pub use compare::{compare, ComparisonRow, ComparisonTable, SIGMA_MULTIPLIER};
pub use drift::{estimate_drift, DistanceFn, DriftEstimate, StateDrift, MIN_DRIFT_VISITS};
pub use samples::{read_samples_csv, write_samples_csv, SAMPLES_HEADER};
pub use stats::{chi_squared_gof, wilson_interval, GoodnessOfFit, Z_95};
pub use summary::{empirical_tail, CurvePoint, RuntimeSummary, TailEstimate, MIN_RUNS_FOR_CI};

/// A batch of independent runs of one algorithm on one function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub function: FunctionSpec,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub start: StartPolicy,
    #[serde(default)]
    pub target: Target,
    pub runs: u64,
    /// Evaluation budget per run.
    pub budget: u64,
    pub master_seed: u64,
}

impl Experiment {
    pub fn new(
        function: FunctionSpec,
        algorithm: AlgorithmConfig,
        runs: u64,
        budget: u64,
        master_seed: u64,
    ) -> Self {
        Self {
            function,
            algorithm,
            start: StartPolicy::UniformRandom,
            target: Target::Optimum,
            runs,
            budget,
            master_seed,
        }
    }

    pub fn with_start(mut self, start: StartPolicy) -> Self {
        self.start = start;
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    pub fn options(&self) -> RunOptions {
        RunOptions::default()
            .with_budget(self.budget)
            .with_start(self.start)
            .with_target(self.target)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(LabError::Config(
                "an experiment needs at least one run".into(),
            ));
        }
        if self.budget == 0 {
            return Err(LabError::Config("budget must be positive".into()));
        }
        if self.function.n() != self.algorithm.n() {
            return Err(LabError::Dimension {
                expected: self.function.n(),
                actual: self.algorithm.n(),
            });
        }
        self.algorithm.validate()
    }
}

/// Outcome of one run as stored in the raw sample file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSample {
    pub run_id: u64,
    pub seed_stream: u64,
    /// Hit time for successful runs, evaluations spent otherwise.
    pub evaluations: u64,
    pub success: bool,
    pub best_fitness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub samples: Vec<RunSample>,
    pub summary: RuntimeSummary,
}

/// Runs with `threads` workers; 0 lets rayon pick.
pub(crate) fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Executes run `i` on stream `(master_seed, i)` for every `i < runs`.
pub fn run_batch(e: &Experiment, threads: usize) -> Result<BatchResult> {
    e.validate()?;
    let f = e.function.build()?;
    let opts = e.options();
    let samples = with_pool(threads, || {
        (0..e.runs)
            .into_par_iter()
            .map(|i| run_one(&f, e, &opts, i))
            .collect::<Result<Vec<_>>>()
    })??;
    let summary = RuntimeSummary::from_samples(&samples);
    Ok(BatchResult { samples, summary })
}

fn run_one(f: &Objective, e: &Experiment, opts: &RunOptions, i: u64) -> Result<RunSample> {
    let mut rng = RngStream::new(e.master_seed, i);
    let trace = run(f, &e.algorithm, opts, &mut rng)?;
    Ok(RunSample {
        run_id: i,
        seed_stream: i,
        evaluations: trace.hit_time.unwrap_or(trace.evaluations),
        success: trace.success(),
        best_fitness: trace.best_fitness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitation::UnitationSpec;

    fn onemax(n: usize, runs: u64, budget: u64) -> Experiment {
        Experiment::new(
            FunctionSpec::Unitation(UnitationSpec::onemax(n)),
            AlgorithmConfig::one_plus_one(n, 1.0).unwrap(),
            runs,
            budget,
            7,
        )
    }

    #[test]
    fn batch_is_independent_of_thread_count() {
        let e = onemax(12, 200, 100_000);
        let a = run_batch(&e, 1).unwrap();
        let b = run_batch(&e, 4).unwrap();
        assert_eq!(a, b);
        assert!(a
            .samples
            .iter()
            .enumerate()
            .all(|(i, s)| s.run_id == i as u64));
    }

    #[test]
    fn budget_one_censors_non_optimal_starts() {
        let e = onemax(3, 400, 1);
        let r = run_batch(&e, 2).unwrap();
        let optimal = r.samples.iter().filter(|s| s.best_fitness == 3.0).count() as u64;
        assert_eq!(r.summary.successes, optimal);
        assert_eq!(r.summary.censored, 400 - optimal);
        assert!(optimal > 0);
    }

    #[test]
    fn invalid_experiments_are_rejected() {
        assert!(run_batch(&onemax(5, 0, 10), 1).is_err());
        let mut e = onemax(5, 3, 10);
        e.algorithm = AlgorithmConfig::rls(6).unwrap();
        assert!(matches!(run_batch(&e, 1), Err(LabError::Dimension { .. })));
    }
}
