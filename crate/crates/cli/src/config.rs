use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ea_lab::{
    AlgorithmConfig, AlgorithmKind, Experiment, FunctionSpec, MutationParams, StartPolicy, Target,
    TieBreak, UnitationSpec,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Experiment configuration document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub schema_version: u32,
    pub name: String,
    pub function: FunctionConfig,
    pub algorithm: AlgorithmSection,
    pub runs: u64,
    pub budget: u64,
    pub seed: u64,
    #[serde(default)]
    pub start: StartConfig,
    #[serde(default)]
    pub target: TargetConfig,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub bounds: Vec<BoundRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Objective families. `n` and `m` are the parameters a sweep may vary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionConfig {
    Onemax {
        n: usize,
    },
    Needle {
        n: usize,
    },
    /// Gap block of length `m` ending `k` bits below the optimum.
    Gap {
        n: usize,
        m: usize,
        k: usize,
    },
    Plateau {
        n: usize,
        m: usize,
        k: usize,
    },
    Unitation {
        spec: UnitationSpec,
    },
    Linear {
        weights: Vec<f64>,
    },
    /// Linear function with all weights 1.
    UniformLinear {
        n: usize,
    },
}

impl FunctionConfig {
    pub fn n(&self) -> usize {
        match self {
            FunctionConfig::Onemax { n }
            | FunctionConfig::Needle { n }
            | FunctionConfig::Gap { n, .. }
            | FunctionConfig::Plateau { n, .. }
            | FunctionConfig::UniformLinear { n } => *n,
            FunctionConfig::Unitation { spec } => spec.n,
            FunctionConfig::Linear { weights } => weights.len(),
        }
    }

    /// `(m, k)` of the block for gap and plateau families.
    pub fn block(&self) -> Option<(usize, usize)> {
        match self {
            FunctionConfig::Gap { m, k, .. } | FunctionConfig::Plateau { m, k, .. } => {
                Some((*m, *k))
            }
            _ => None,
        }
    }

    pub fn is_onemax(&self) -> bool {
        match self {
            FunctionConfig::Onemax { .. } => true,
            FunctionConfig::Unitation { spec } => *spec == UnitationSpec::onemax(spec.n),
            _ => false,
        }
    }

    pub fn to_spec(&self) -> Result<FunctionSpec> {
        Ok(match self {
            FunctionConfig::Onemax { n } => FunctionSpec::Unitation(UnitationSpec::onemax(*n)),
            FunctionConfig::Needle { n } => FunctionSpec::Unitation(UnitationSpec::needle(*n)),
            FunctionConfig::Gap { n, m, k } => {
                FunctionSpec::Unitation(UnitationSpec::with_gap(*n, *m, *k)?)
            }
            FunctionConfig::Plateau { n, m, k } => {
                FunctionSpec::Unitation(UnitationSpec::with_plateau(*n, *m, *k)?)
            }
            FunctionConfig::Unitation { spec } => {
                spec.validate()?;
                FunctionSpec::Unitation(spec.clone())
            }
            FunctionConfig::Linear { weights } => FunctionSpec::Linear {
                weights: weights.clone(),
            },
            FunctionConfig::UniformLinear { n } => FunctionSpec::Linear {
                weights: vec![1.0; *n],
            },
        })
    }

    /// Copy with the swept variable set to `value`.
    pub fn with_variable(&self, variable: SweepVariable, value: usize) -> Result<Self> {
        let mut f = self.clone();
        match (variable, &mut f) {
            (
                SweepVariable::N,
                FunctionConfig::Onemax { n }
                | FunctionConfig::Needle { n }
                | FunctionConfig::Gap { n, .. }
                | FunctionConfig::Plateau { n, .. }
                | FunctionConfig::UniformLinear { n },
            ) => *n = value,
            (
                SweepVariable::M,
                FunctionConfig::Gap { m, .. } | FunctionConfig::Plateau { m, .. },
            ) => *m = value,
            _ => bail!(
                "sweep variable `{}` does not apply to this function type",
                variable.name()
            ),
        }
        Ok(f)
    }
}

fn default_chi() -> f64 {
    1.0
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub kind: AlgorithmKind,
    #[serde(default = "one")]
    pub mu: usize,
    #[serde(default = "one")]
    pub lambda: usize,
    /// Mutation rate numerator: each bit flips with probability chi/n.
    #[serde(default = "default_chi")]
    pub chi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<TieBreak>,
}

impl AlgorithmSection {
    pub fn build(&self, n: usize) -> Result<AlgorithmConfig> {
        let tie_break = self.tie_break.unwrap_or(match self.kind {
            AlgorithmKind::MuCommaLambdaEa => TieBreak::UniformRandom,
            _ => TieBreak::PreferOffspring,
        });
        Ok(AlgorithmConfig::new(
            self.kind,
            self.mu,
            self.lambda,
            MutationParams::new(n, self.chi)?,
            tie_break,
        )?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartConfig {
    #[default]
    UniformRandom,
    FixedZeros(usize),
    /// First point of the gap or plateau block (m + k zeros).
    BlockStart,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetConfig {
    #[default]
    Optimum,
    ZerosAtMost(usize),
    /// Any point at or past the end of the block (at most k zeros).
    BlockEnd,
}

/// A theorem to evaluate, with its parameters. Parameters that describe the
/// problem (n, block position, mutation rate) come from the experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundRequest {
    /// Fitness-level upper bound. `closed_form` uses s_i = (n-i)/(en) for
    /// OneMax instead of exact leaving probabilities.
    AflUpper {
        #[serde(default)]
        closed_form: bool,
    },
    AflLower {},
    GapBlock {},
    /// Linear stretch of OneMax of length `m` ending `k` bits below the optimum.
    LinearBlock {
        m: usize,
        k: usize,
    },
    PlateauBlock {},
    AdditiveDrift {
        b: f64,
        y0: f64,
        eps: f64,
    },
    MultiplicativeDrift {
        delta: f64,
        c_min: f64,
        c_max: f64,
    },
    /// Variable drift with h(x) = x/(en) from the worst start x0 = n.
    LinearVariableDrift {},
    LevelBased {
        m: usize,
        z: Vec<f64>,
        z_star: f64,
        delta: f64,
        gamma0: f64,
        lambda: usize,
    },
    MuCommaLambda {
        delta: f64,
        #[serde(default)]
        big_o_constant: f64,
    },
    NeedleNegativeDrift {
        gamma: f64,
        delta: f64,
        r: f64,
    },
    Markov {
        expectation: f64,
        t: f64,
    },
    ChernoffUpper {
        expectation: f64,
        delta: f64,
    },
    ChernoffLower {
        expectation: f64,
        delta: f64,
    },
    /// Chernoff upper bounds for Bin(n, p) at each n, with E[X] = np.
    ChernoffTable {
        n_values: Vec<usize>,
        p: f64,
        delta: f64,
    },
    /// A fixed runtime bound in evaluations, e.g. a negative control.
    Fixed {
        name: String,
        direction: FixedDirection,
        value: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedDirection {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    N,
    M,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::N => "n",
            SweepVariable::M => "m",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub values: Vec<usize>,
}

impl ConfigDocument {
    /// Parses and validates a document; syntax and schema errors carry the
    /// line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let doc: ConfigDocument = serde_json::from_str(text).map_err(|e| {
            anyhow!(
                "config line {}, column {}: {}",
                e.line(),
                e.column(),
                strip_position(&e.to_string())
            )
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            );
        }
        if self.name.trim().is_empty() {
            bail!("name: must not be empty");
        }
        if self.runs == 0 {
            bail!("runs: must be at least 1");
        }
        if self.budget == 0 {
            bail!("budget: must be positive");
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                bail!("sweep.values: must not be empty");
            }
            for &v in &s.values {
                self.function
                    .with_variable(s.variable, v)
                    .context("sweep.variable")?;
            }
        }
        Ok(())
    }

    /// Resolved experiment for the function as written.
    pub fn experiment(&self) -> Result<Experiment> {
        self.experiment_for(&self.function)
    }

    pub fn experiment_for(&self, function: &FunctionConfig) -> Result<Experiment> {
        let spec = function.to_spec().context("function")?;
        let n = spec.n();
        let algorithm = self.algorithm.build(n).context("algorithm")?;
        let block = || {
            function
                .block()
                .ok_or_else(|| anyhow!("block start and end need a gap or plateau function"))
        };
        let start = match self.start {
            StartConfig::UniformRandom => StartPolicy::UniformRandom,
            StartConfig::FixedZeros(z) => StartPolicy::FixedZeros(z),
            StartConfig::BlockStart => {
                let (m, k) = block().context("start")?;
                StartPolicy::FixedZeros(m + k)
            }
        };
        let target = match self.target {
            TargetConfig::Optimum => Target::Optimum,
            TargetConfig::ZerosAtMost(k) => Target::ZerosAtMost(k),
            TargetConfig::BlockEnd => Target::ZerosAtMost(block().context("target")?.1),
        };
        let e = Experiment::new(spec, algorithm, self.runs, self.budget, self.seed)
            .with_start(start)
            .with_target(target);
        e.validate()?;
        Ok(e)
    }
}

fn strip_position(msg: &str) -> &str {
    msg.rfind(" at line ").map_or(msg, |i| &msg[..i])
}
