//! Instrumented, budgeted runners for RLS, the (1+1) EA, the (μ+λ) EA and
//! the (μ,λ) EA.
//!
//! Runtime is counted in fitness evaluations, starting at 1 for the first
//! evaluated point of the initial population.

mod population;
mod single;

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{LabError, Result};
use crate::fitness::{FitnessFunction, Target};
use crate::mutation::MutationParams;
use crate::rng::RngStream;

pub use population::{run_mu_comma_lambda_ea, run_mu_plus_lambda_ea, select_best_mu};
pub use single::{run_one_plus_one_ea, run_rls};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Rls,
    OnePlusOneEa,
    MuPlusLambdaEa,
    MuCommaLambdaEa,
}

impl AlgorithmKind {
    pub fn is_elitist(&self) -> bool {
        !matches!(self, AlgorithmKind::MuCommaLambdaEa)
    }

    pub fn is_single_individual(&self) -> bool {
        matches!(self, AlgorithmKind::Rls | AlgorithmKind::OnePlusOneEa)
    }
}

/// How equal-fitness candidates are ordered during replacement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    PreferOffspring,
    UniformRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    pub mu: usize,
    pub lambda: usize,
    pub mutation: MutationParams,
    pub tie_break: TieBreak,
}

impl AlgorithmConfig {
    pub fn rls(n: usize) -> Result<Self> {
        Ok(Self {
            kind: AlgorithmKind::Rls,
            mu: 1,
            lambda: 1,
            mutation: MutationParams::standard(n)?,
            tie_break: TieBreak::PreferOffspring,
        })
    }

    pub fn one_plus_one(n: usize, chi: f64) -> Result<Self> {
        Ok(Self {
            kind: AlgorithmKind::OnePlusOneEa,
            mu: 1,
            lambda: 1,
            mutation: MutationParams::new(n, chi)?,
            tie_break: TieBreak::PreferOffspring,
        })
    }

    pub fn mu_plus_lambda(n: usize, mu: usize, lambda: usize, chi: f64) -> Result<Self> {
        Self::new(
            AlgorithmKind::MuPlusLambdaEa,
            mu,
            lambda,
            MutationParams::new(n, chi)?,
            TieBreak::PreferOffspring,
        )
    }

    pub fn mu_comma_lambda(n: usize, mu: usize, lambda: usize, chi: f64) -> Result<Self> {
        Self::new(
            AlgorithmKind::MuCommaLambdaEa,
            mu,
            lambda,
            MutationParams::new(n, chi)?,
            TieBreak::UniformRandom,
        )
    }

    pub fn new(
        kind: AlgorithmKind,
        mu: usize,
        lambda: usize,
        mutation: MutationParams,
        tie_break: TieBreak,
    ) -> Result<Self> {
        let cfg = Self {
            kind,
            mu,
            lambda,
            mutation,
            tie_break,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn n(&self) -> usize {
        self.mutation.n()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu == 0 || self.lambda == 0 {
            return Err(LabError::Config("mu and lambda must be positive".into()));
        }
        match self.kind {
            AlgorithmKind::Rls | AlgorithmKind::OnePlusOneEa
                if self.mu != 1 || self.lambda != 1 =>
            {
                Err(LabError::Config(format!(
                    "{:?} requires mu = lambda = 1",
                    self.kind
                )))
            }
            AlgorithmKind::MuCommaLambdaEa if self.lambda < self.mu => {
                Err(LabError::Config(format!(
                    "(mu,lambda) EA requires lambda >= mu, got {} < {}",
                    self.lambda, self.mu
                )))
            }
            AlgorithmKind::MuCommaLambdaEa if self.mutation.chi() >= self.n() as f64 / 2.0 => {
                Err(LabError::Config(format!(
                    "(mu,lambda) EA requires chi in (0, n/2), got {}",
                    self.mutation.chi()
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Evaluation budget for one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_evaluations: u64,
}

impl Budget {
    pub fn new(max_evaluations: u64) -> Result<Self> {
        if max_evaluations == 0 {
            return Err(LabError::Config("budget must be positive".into()));
        }
        Ok(Self { max_evaluations })
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_evaluations: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    #[default]
    UniformRandom,
    /// Every initial individual is uniform among points with this many zeros.
    FixedZeros(usize),
}

impl StartPolicy {
    pub(crate) fn sample(&self, n: usize, rng: &mut RngStream) -> Bitstring {
        match *self {
            StartPolicy::UniformRandom => Bitstring::random(n, rng),
            StartPolicy::FixedZeros(z) => Bitstring::random_with_zeros(n, z, rng),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    pub budget: Budget,
    pub start: StartPolicy,
    pub target: Target,
}

impl RunOptions {
    pub fn with_budget(mut self, max_evaluations: u64) -> Self {
        self.budget = Budget { max_evaluations };
        self
    }

    pub fn with_start(mut self, start: StartPolicy) -> Self {
        self.start = start;
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    fn validate(&self, cfg: &AlgorithmConfig) -> Result<()> {
        if self.budget.max_evaluations < cfg.mu as u64 {
            return Err(LabError::Config(format!(
                "budget {} is smaller than the initial population {}",
                self.budget.max_evaluations, cfg.mu
            )));
        }
        if let StartPolicy::FixedZeros(z) = self.start {
            if z > cfg.n() {
                return Err(LabError::Config(format!(
                    "start zeros-count {z} exceeds n = {}",
                    cfg.n()
                )));
            }
        }
        Ok(())
    }
}

/// Record of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    /// Evaluations spent, including the initial population.
    pub evaluations: u64,
    pub generations: u64,
    /// `(evaluation index, fitness)` whenever the tracked best value changes:
    /// best-so-far for elitist kinds, best of the current population for the
    /// (μ,λ) EA.
    pub best_fitness_history: Vec<(u64, f64)>,
    /// Index of the first evaluation of a target point.
    pub hit_time: Option<u64>,
    pub censored: bool,
    /// Best fitness ever evaluated.
    pub best_fitness: f64,
}

impl RunTrace {
    fn new() -> Self {
        Self {
            evaluations: 0,
            generations: 0,
            best_fitness_history: Vec::new(),
            hit_time: None,
            censored: false,
            best_fitness: f64::NEG_INFINITY,
        }
    }

    #[inline]
    fn evaluated(&mut self, fitness: f64, in_target: bool) {
        self.evaluations += 1;
        if fitness > self.best_fitness {
            self.best_fitness = fitness;
        }
        if in_target && self.hit_time.is_none() {
            self.hit_time = Some(self.evaluations);
        }
    }

    fn track(&mut self, value: f64) {
        if self
            .best_fitness_history
            .last()
            .is_none_or(|&(_, v)| v != value)
        {
            self.best_fitness_history.push((self.evaluations, value));
        }
    }

    fn finish(mut self) -> Self {
        self.censored = self.hit_time.is_none();
        self
    }

    pub fn success(&self) -> bool {
        self.hit_time.is_some()
    }
}

/// Callback receiving the tracked individual after initialisation and after
/// every generation (the current point, or the best of the population).
pub type Observer<'a> = &'a mut dyn FnMut(&Bitstring);

/// Runs whichever algorithm `cfg` names.
pub fn run<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
) -> Result<RunTrace> {
    run_observed(f, cfg, opts, rng, None)
}

pub fn run_observed<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
    rng: &mut RngStream,
    observer: Option<Observer<'_>>,
) -> Result<RunTrace> {
    check_common(f, cfg, opts)?;
    Ok(match cfg.kind {
        AlgorithmKind::Rls => single::rls(f, cfg, opts, rng, observer),
        AlgorithmKind::OnePlusOneEa => single::one_plus_one(f, cfg, opts, rng, observer),
        AlgorithmKind::MuPlusLambdaEa => population::plus(f, cfg, opts, rng, observer),
        AlgorithmKind::MuCommaLambdaEa => population::comma(f, cfg, opts, rng, observer),
    })
}

fn check_common<F: FitnessFunction + ?Sized>(
    f: &F,
    cfg: &AlgorithmConfig,
    opts: &RunOptions,
) -> Result<()> {
    cfg.validate()?;
    if f.n() != cfg.n() {
        return Err(LabError::Dimension {
            expected: f.n(),
            actual: cfg.n(),
        });
    }
    opts.validate(cfg)
}

fn expect_kind(cfg: &AlgorithmConfig, kind: AlgorithmKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(LabError::UnsupportedAlgorithm(format!(
            "expected {kind:?}, got {:?}",
            cfg.kind
        )));
    }
    Ok(())
}
