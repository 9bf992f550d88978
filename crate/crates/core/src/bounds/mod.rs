//! Executable theorems: each function checks its hypotheses and only then
//! yields a numeric bound.

pub mod blocks;
pub mod drift;
pub mod levels;
pub mod numeric;
pub mod tail;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use blocks::{
    gap_block_bounds, linear_block_lower, linear_block_upper, onemax_afl_upper, plateau_bounds,
    plateau_drift_reports, GapBlockBounds,
};
pub use drift::{
    additive_drift_bounds, multiplicative_drift_bound, needle_negative_drift, negative_drift_check,
    variable_drift_bound, AdditiveDrift, MultiplicativeDrift, NegativeDrift, VariableDrift,
    VariableMode,
};
pub use levels::{
    afl_chi_certificate, afl_lower, afl_upper, exact_chi, exact_level_data, level_based_bound,
    level_based_constants, mucommalambda_lambda_min, mucommalambda_mu_for,
    mucommalambda_runtime_bound, mutation_lemma_check, onemax_afl_levels, onemax_level_params,
    ChiCertificate, LemmaCheck, LevelBasedConstants, LevelBasedParams, LevelData,
};
pub use numeric::{adaptive_simpson, harmonic};
pub use tail::{
    binomial_tail_above, chernoff_lower, chernoff_upper, ln_chernoff_lower, ln_chernoff_upper,
    markov_bound,
};

/// What the bound value constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Upper bound on an expected runtime.
    UpperOnE,
    /// Lower bound on an expected runtime.
    LowerOnE,
    /// Upper bound on a tail probability.
    TailUpper,
    /// Qualitative exponential lower bound; the value is the exponent scale.
    ExponentialLower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Evaluations,
    Generations,
    Probability,
    /// Length of a state-space interval.
    Distance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: String,
    pub direction: Direction,
    pub units: Units,
    pub hypotheses_ok: bool,
    pub conditions: Vec<Condition>,
    /// Hypotheses taken on the caller's word rather than checked here.
    pub attestations: Vec<String>,
    pub warnings: Vec<String>,
    pub bound_value: Option<f64>,
    /// Natural log of the bound, kept when the linear value may overflow.
    pub log_value: Option<f64>,
    /// Derived quantities worth reporting (constants, thresholds).
    pub details: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(theorem_id: impl Into<String>, direction: Direction, units: Units) -> Self {
        Self {
            theorem_id: theorem_id.into(),
            direction,
            units,
            hypotheses_ok: true,
            conditions: Vec::new(),
            attestations: Vec::new(),
            warnings: Vec::new(),
            bound_value: None,
            log_value: None,
            details: BTreeMap::new(),
        }
    }

    pub fn condition(
        mut self,
        name: impl Into<String>,
        holds: bool,
        detail: impl Into<String>,
    ) -> Self {
        self.hypotheses_ok &= holds;
        self.conditions.push(Condition {
            name: name.into(),
            holds,
            detail: detail.into(),
        });
        self
    }

    pub fn attest(mut self, text: impl Into<String>) -> Self {
        self.attestations.push(text.into());
        self
    }

    pub fn warn(mut self, text: impl Into<String>) -> Self {
        self.warnings.push(text.into());
        self
    }

    pub fn detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.insert(key.into(), value);
        self
    }

    /// Attaches the bound, unless a hypothesis failed.
    pub fn with_value(mut self, value: f64) -> Self {
        if self.hypotheses_ok {
            self.bound_value = Some(value);
            self.log_value = (value > 0.0).then(|| value.ln());
        }
        self
    }

    pub fn with_log_value(mut self, ln_value: f64) -> Self {
        if self.hypotheses_ok {
            self.log_value = Some(ln_value);
            let v = ln_value.exp();
            self.bound_value = v.is_finite().then_some(v);
        }
        self
    }

    pub fn failed_conditions(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.holds)
    }

    /// Re-expresses a runtime bound in evaluations. A generation count `g`
    /// maps to `offset + per_generation * g`.
    pub fn into_evaluations(mut self, offset: f64, per_generation: f64) -> Result<Self> {
        match self.units {
            Units::Evaluations => Ok(self),
            Units::Generations => {
                self.units = Units::Evaluations;
                self.log_value = match self.bound_value {
                    Some(g) => Some(offset + per_generation * g)
                        .filter(|v| *v > 0.0)
                        .map(f64::ln),
                    // overflowed linear value: the offset is negligible
                    None => self.log_value.map(|l| l + per_generation.ln()),
                };
                self.bound_value = self.bound_value.map(|g| offset + per_generation * g);
                self.details.insert("evaluation_offset".into(), offset);
                self.details
                    .insert("evaluations_per_generation".into(), per_generation);
                Ok(self)
            }
            other => Err(LabError::Units(format!(
                "cannot express a {other:?} bound in evaluations"
            ))),
        }
    }
}
