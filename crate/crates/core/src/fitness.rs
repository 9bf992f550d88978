use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{LabError, Result};
use crate::unitation::{build_value_table, UnitationSpec};

/// A pseudo-Boolean objective to be maximised; every objective here has its
/// unique optimum at the all-ones string.
pub trait FitnessFunction: Send + Sync {
    fn n(&self) -> usize;
    fn evaluate(&self, x: &Bitstring) -> f64;
}

/// A unitation spec compiled to its value table.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitationFunction {
    spec: UnitationSpec,
    table: Vec<f64>,
}

impl UnitationFunction {
    pub fn new(spec: UnitationSpec) -> Result<Self> {
        let table = build_value_table(&spec)?;
        Ok(Self { spec, table })
    }

    pub fn spec(&self) -> &UnitationSpec {
        &self.spec
    }

    /// Value table indexed by zeros-count.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    #[inline]
    pub fn value_at_zeros(&self, zeros: usize) -> f64 {
        self.table[zeros]
    }
}

impl FitnessFunction for UnitationFunction {
    fn n(&self) -> usize {
        self.spec.n
    }

    #[inline]
    fn evaluate(&self, x: &Bitstring) -> f64 {
        self.table[x.count_zeros()]
    }
}

/// `f(x) = sum_i w_i x_i` with strictly positive weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFunction {
    weights: Vec<f64>,
}

impl LinearFunction {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(LabError::Spec(
                "linear function needs at least one weight".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(LabError::Spec(format!(
                "linear weights must be positive, got {w}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn w_min(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn w_max(&self) -> f64 {
        self.weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Weight still missing from the optimum: `sum_i w_i (1 - x_i)`.
    pub fn remaining_weight(&self, x: &Bitstring) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|&(i, _)| !x.get(i))
            .map(|(_, w)| w)
            .sum()
    }
}

impl FitnessFunction for LinearFunction {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn evaluate(&self, x: &Bitstring) -> f64 {
        x.ones_positions().map(|i| self.weights[i]).sum()
    }
}

/// Serializable description of an objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    Unitation(UnitationSpec),
    Linear { weights: Vec<f64> },
}

impl FunctionSpec {
    pub fn n(&self) -> usize {
        match self {
            FunctionSpec::Unitation(s) => s.n,
            FunctionSpec::Linear { weights } => weights.len(),
        }
    }

    pub fn build(&self) -> Result<Objective> {
        Ok(match self {
            FunctionSpec::Unitation(s) => Objective::Unitation(UnitationFunction::new(s.clone())?),
            FunctionSpec::Linear { weights } => {
                Objective::Linear(LinearFunction::new(weights.clone())?)
            }
        })
    }

    pub fn as_unitation(&self) -> Option<&UnitationSpec> {
        match self {
            FunctionSpec::Unitation(s) => Some(s),
            FunctionSpec::Linear { .. } => None,
        }
    }
}

/// Compiled objective with static dispatch.
#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    Unitation(UnitationFunction),
    Linear(LinearFunction),
}

impl FitnessFunction for Objective {
    fn n(&self) -> usize {
        match self {
            Objective::Unitation(f) => f.n(),
            Objective::Linear(f) => f.n(),
        }
    }

    #[inline]
    fn evaluate(&self, x: &Bitstring) -> f64 {
        match self {
            Objective::Unitation(f) => f.evaluate(x),
            Objective::Linear(f) => f.evaluate(x),
        }
    }
}

/// Set of points whose first evaluation ends a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The all-ones string.
    #[default]
    Optimum,
    /// Any point with at most this many zeros, e.g. the end of a block.
    ZerosAtMost(usize),
}

impl Target {
    #[inline]
    pub fn threshold(&self) -> usize {
        match self {
            Target::Optimum => 0,
            Target::ZerosAtMost(k) => *k,
        }
    }

    #[inline]
    pub fn contains_zeros(&self, zeros: usize) -> bool {
        zeros <= self.threshold()
    }

    #[inline]
    pub fn reached(&self, x: &Bitstring) -> bool {
        self.contains_zeros(x.count_zeros())
    }
}
