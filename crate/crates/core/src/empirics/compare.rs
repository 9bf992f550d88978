use serde::{Deserialize, Serialize};

use super::RuntimeSummary;
use crate::bounds::{BoundReport, Direction, Units};
use crate::error::{LabError, Result};

/// Sampling tolerance, in standard errors, before a comparison counts as
/// violated.
pub const SIGMA_MULTIPLIER: f64 = 3.0;

const ORACLE_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub empirical: Option<f64>,
    pub stderr: Option<f64>,
    pub oracle: Option<f64>,
    pub bound: Option<f64>,
    pub direction: Option<Direction>,
    pub satisfied: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn all_satisfied(&self) -> bool {
        self.rows.iter().all(|r| r.satisfied)
    }

    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let err = |e: csv::Error| LabError::Config(format!("comparison table: {e}"));
        w.write_record([
            "quantity",
            "empirical",
            "stderr",
            "oracle",
            "bound",
            "direction",
            "satisfied",
        ])
        .map_err(err)?;
        for r in &self.rows {
            let direction = r.direction.map(direction_name).unwrap_or_default();
            w.write_record([
                r.quantity.clone(),
                fmt(r.empirical),
                fmt(r.stderr),
                fmt(r.oracle),
                fmt(r.bound),
                direction.to_string(),
                r.satisfied.to_string(),
            ])
            .map_err(err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| LabError::Config(format!("comparison table: {e}")))?;
        String::from_utf8(bytes).map_err(|e| LabError::Config(e.to_string()))
    }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::UpperOnE => "upper_on_e",
        Direction::LowerOnE => "lower_on_e",
        Direction::TailUpper => "tail_upper",
        Direction::ExponentialLower => "exponential_lower",
    }
}

/// Checks the empirical mean hit time (and the exact value, if given) against
/// runtime bounds expressed in evaluations.
///
/// A bound row is satisfied when the empirical mean does not violate it by
/// more than [`SIGMA_MULTIPLIER`] standard errors and the exact value, when
/// present, respects it outright. An oracle row checks that the empirical
/// mean lies within the same tolerance of the exact value.
pub fn compare(
    summary: &RuntimeSummary,
    reports: &[BoundReport],
    oracle_value: Option<f64>,
) -> Result<ComparisonTable> {
    for r in reports {
        if r.units != Units::Evaluations {
            return Err(LabError::Units(format!(
                "bound `{}` is in {:?}; convert it to evaluations first",
                r.theorem_id, r.units
            )));
        }
        if !matches!(r.direction, Direction::UpperOnE | Direction::LowerOnE) {
            return Err(LabError::Units(format!(
                "bound `{}` does not bound an expected runtime",
                r.theorem_id
            )));
        }
    }
    let mean = summary.mean;
    let slack = summary.stderr.unwrap_or(0.0) * SIGMA_MULTIPLIER;
    let mut rows = Vec::new();
    if let Some(exact) = oracle_value {
        rows.push(ComparisonRow {
            quantity: "oracle".into(),
            empirical: mean,
            stderr: summary.stderr,
            oracle: Some(exact),
            bound: None,
            direction: None,
            satisfied: mean.is_some_and(|m| (m - exact).abs() <= slack),
        });
    }
    for r in reports {
        let satisfied = match r.bound_value {
            None => false,
            Some(b) => {
                let tol = ORACLE_REL_TOL * b.abs().max(1.0);
                let (emp_ok, exact_ok) = match r.direction {
                    Direction::UpperOnE => (
                        mean.map(|m| m - slack <= b),
                        oracle_value.map(|o| o <= b + tol),
                    ),
                    _ => (
                        mean.map(|m| m + slack >= b),
                        oracle_value.map(|o| o >= b - tol),
                    ),
                };
                (emp_ok.is_some() || exact_ok.is_some())
                    && emp_ok.unwrap_or(true)
                    && exact_ok.unwrap_or(true)
            }
        };
        rows.push(ComparisonRow {
            quantity: r.theorem_id.clone(),
            empirical: mean,
            stderr: summary.stderr,
            oracle: oracle_value,
            bound: r.bound_value,
            direction: Some(r.direction),
            satisfied,
        });
    }
    Ok(ComparisonTable { rows })
}
