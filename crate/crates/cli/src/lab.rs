use std::f64::consts::E;

use anyhow::{bail, Context, Result};
use ea_lab::bounds::{
    additive_drift_bounds, afl_lower, afl_upper, chernoff_lower, chernoff_upper, exact_level_data,
    gap_block_bounds, level_based_bound, linear_block_lower, linear_block_upper, markov_bound,
    mucommalambda_runtime_bound, multiplicative_drift_bound, needle_negative_drift,
    onemax_afl_levels, plateau_drift_reports, variable_drift_bound, AdditiveDrift,
    LevelBasedParams, MultiplicativeDrift, VariableDrift, VariableMode,
};
use ea_lab::empirics::{compare, run_batch, BatchResult, ComparisonTable};
use ea_lab::oracle::{
    binomial_start, build_level_chain_with_target, exact_expected_hitting_time, point_start,
};
use ea_lab::{
    AlgorithmKind, BoundReport, Direction, Experiment, RuntimeSummary, StartPolicy, Target, Units,
};
use serde::{Deserialize, Serialize};

use crate::config::{BoundRequest, ConfigDocument, FixedDirection, FunctionConfig};

/// Exact expected runtime from the level chain, when it applies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub requested: bool,
    /// Expected hit time in evaluations.
    pub evaluations: Option<f64>,
    pub generations: Option<f64>,
    pub note: Option<String>,
}

/// Everything computed for one function instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub function: FunctionConfig,
    pub runtime_summary: RuntimeSummary,
    pub oracle: OracleSection,
    pub bounds: Vec<BoundReport>,
    pub comparison: ComparisonTable,
    pub checks_satisfied: bool,
}

pub struct PointResult {
    pub batch: BatchResult,
    pub report: PointReport,
}

fn start_distribution(e: &Experiment) -> Result<Vec<f64>> {
    let n = e.function.n();
    Ok(match e.start {
        StartPolicy::UniformRandom => binomial_start(n),
        StartPolicy::FixedZeros(z) => point_start(n, z)?,
    })
}

pub fn oracle_section(e: &Experiment, requested: bool) -> OracleSection {
    let mut out = OracleSection {
        requested,
        evaluations: None,
        generations: None,
        note: None,
    };
    if !requested {
        return out;
    }
    let Some(spec) = e.function.as_unitation() else {
        out.note = Some("the exact oracle needs a unitation function".into());
        return out;
    };
    if !e.algorithm.kind.is_single_individual() {
        out.note = Some("the exact oracle covers RLS and the (1+1) EA only".into());
        return out;
    }
    let exact = build_level_chain_with_target(spec, &e.algorithm, e.target)
        .map_err(anyhow::Error::from)
        .and_then(|chain| {
            let start = start_distribution(e)?;
            Ok(exact_expected_hitting_time(&chain, &start)?)
        });
    match exact {
        Ok(g) => {
            out.generations = Some(g);
            out.evaluations = Some(1.0 + g);
        }
        Err(err) => out.note = Some(format!("{err:#}")),
    }
    out
}

/// Adds a hypothesis checked against the experiment and drops the value if it
/// fails.
fn require(report: BoundReport, name: &str, holds: bool, detail: String) -> BoundReport {
    let mut r = report.condition(name, holds, detail);
    if !r.hypotheses_ok {
        r.bound_value = None;
        r.log_value = None;
    }
    r
}

fn require_standard_ea(report: BoundReport, e: &Experiment) -> BoundReport {
    let ok = e.algorithm.kind == AlgorithmKind::OnePlusOneEa && e.algorithm.mutation.chi() == 1.0;
    require(
        report,
        "(1+1) EA at rate 1/n",
        ok,
        format!(
            "algorithm {:?} with chi = {}",
            e.algorithm.kind,
            e.algorithm.mutation.chi()
        ),
    )
}

fn require_target(report: BoundReport, e: &Experiment, target: Target) -> BoundReport {
    require(
        report,
        "target",
        e.target == target,
        format!("experiment target {:?}, theorem needs {target:?}", e.target),
    )
}

/// Hypotheses shared by the block theorems: the standard (1+1) EA started at
/// the block start and stopped at the block end.
fn block_hypotheses(report: BoundReport, e: &Experiment, m: usize, k: usize) -> BoundReport {
    let r = require_standard_ea(report, e);
    let r = require(
        r,
        "start at block start",
        e.start == StartPolicy::FixedZeros(m + k),
        format!(
            "experiment start {:?}, block start has {} zeros",
            e.start,
            m + k
        ),
    );
    require_target(r, e, Target::ZerosAtMost(k))
}

fn block_of(function: &FunctionConfig, id: &str) -> Result<(usize, usize)> {
    function
        .block()
        .with_context(|| format!("{id} needs a gap or plateau function"))
}

fn probability_report(id: &str, value: f64) -> BoundReport {
    BoundReport::new(id, Direction::TailUpper, Units::Probability).with_value(value)
}

/// Evaluates every requested theorem for one experiment.
pub fn evaluate_bounds(
    requests: &[BoundRequest],
    function: &FunctionConfig,
    e: &Experiment,
) -> Result<Vec<BoundReport>> {
    let n = e.function.n();
    let mut out = Vec::new();
    for req in requests {
        match req {
            BoundRequest::AflUpper { closed_form: true } => {
                let r = afl_upper(&onemax_afl_levels(n));
                let r = require(
                    r,
                    "OneMax",
                    function.is_onemax(),
                    "closed-form levels are the OneMax ones-count levels".into(),
                );
                let r = require_standard_ea(r, e);
                out.push(require_target(r, e, Target::Optimum));
            }
            BoundRequest::AflUpper { closed_form: false } | BoundRequest::AflLower {} => {
                let spec = e
                    .function
                    .as_unitation()
                    .context("exact fitness levels need a unitation function")?;
                let chain = build_level_chain_with_target(spec, &e.algorithm, e.target)?;
                let (up, low) = exact_level_data(&chain, &start_distribution(e)?)?;
                if matches!(req, BoundRequest::AflUpper { .. }) {
                    out.push(afl_upper(&up));
                } else {
                    out.push(afl_lower(&low)?);
                }
            }
            BoundRequest::GapBlock {} => {
                let (m, k) = block_of(function, "gap_block")?;
                let g = gap_block_bounds(n, m, k)?;
                let pairs = [
                    ("gap_inner_lower", Direction::LowerOnE, g.ln_inner_lower),
                    ("gap_inner_upper", Direction::UpperOnE, g.ln_inner_upper),
                    ("gap_outer_lower", Direction::LowerOnE, g.ln_outer_lower),
                    ("gap_outer_upper", Direction::UpperOnE, g.ln_outer_upper),
                ];
                for (id, dir, ln) in pairs {
                    let r = BoundReport::new(id, dir, Units::Generations).with_log_value(ln);
                    out.push(block_hypotheses(r, e, m, k));
                }
            }
            BoundRequest::LinearBlock { m, k } => {
                let (m, k) = (*m, *k);
                for (id, dir, v) in [
                    (
                        "linear_block_upper",
                        Direction::UpperOnE,
                        linear_block_upper(n, m, k)?,
                    ),
                    (
                        "linear_block_lower",
                        Direction::LowerOnE,
                        linear_block_lower(n, m, k)?,
                    ),
                ] {
                    let r = BoundReport::new(id, dir, Units::Generations).with_value(v);
                    let r = require(
                        r,
                        "OneMax",
                        function.is_onemax(),
                        "every stretch of OneMax is a linear block".into(),
                    );
                    out.push(block_hypotheses(r, e, m, k));
                }
            }
            BoundRequest::PlateauBlock {} => {
                let (m, k) = block_of(function, "plateau_block")?;
                let (up, low) = plateau_drift_reports(n, m, k)?;
                out.push(block_hypotheses(up, e, m, k));
                out.push(block_hypotheses(low, e, m, k));
            }
            BoundRequest::AdditiveDrift { b, y0, eps } => {
                let (up, low) = additive_drift_bounds(&AdditiveDrift {
                    b: *b,
                    y0: *y0,
                    eps: *eps,
                })?;
                out.push(up);
                out.push(low);
            }
            BoundRequest::MultiplicativeDrift {
                delta,
                c_min,
                c_max,
            } => out.push(multiplicative_drift_bound(&MultiplicativeDrift {
                delta: *delta,
                c_min: *c_min,
                c_max: *c_max,
            })?),
            BoundRequest::LinearVariableDrift {} => {
                let nf = n as f64;
                let spec = VariableDrift {
                    h: |x: f64| x / (E * nf),
                    x_min: 1.0,
                    x_max: nf,
                    x0: nf,
                    rate: None,
                };
                let r = variable_drift_bound(&spec, VariableMode::UpperOnE, None)?;
                let linear = matches!(
                    function,
                    FunctionConfig::Linear { .. } | FunctionConfig::UniformLinear { .. }
                ) || function.is_onemax();
                let r = require(
                    r,
                    "linear function",
                    linear,
                    "h(x) = x/(en) is the drift of linear functions".into(),
                );
                let r = require_standard_ea(r, e);
                out.push(require_target(r, e, Target::Optimum));
            }
            BoundRequest::LevelBased {
                m,
                z,
                z_star,
                delta,
                gamma0,
                lambda,
            } => out.push(level_based_bound(&LevelBasedParams {
                m: *m,
                z: z.clone(),
                z_star: *z_star,
                delta: *delta,
                gamma0: *gamma0,
                lambda: *lambda,
            })?),
            BoundRequest::MuCommaLambda {
                delta,
                big_o_constant,
            } => {
                let a = &e.algorithm;
                if a.kind != AlgorithmKind::MuCommaLambdaEa {
                    bail!("mu_comma_lambda needs the (mu,lambda) EA");
                }
                let r = mucommalambda_runtime_bound(
                    n,
                    a.mutation.chi(),
                    *delta,
                    a.lambda,
                    Some(a.mu),
                    *big_o_constant,
                )?;
                let r = require(
                    r,
                    "OneMax",
                    function.is_onemax(),
                    "the level instantiation is for OneMax".into(),
                );
                out.push(require_target(r, e, Target::Optimum));
            }
            BoundRequest::NeedleNegativeDrift { gamma, delta, r } => {
                if !matches!(function, FunctionConfig::Needle { .. }) {
                    bail!("needle_negative_drift needs the needle function");
                }
                out.push(needle_negative_drift(n, *gamma, *delta, *r)?);
            }
            BoundRequest::Markov { expectation, t } => out.push(probability_report(
                "markov",
                markov_bound(*expectation, *t)?,
            )),
            BoundRequest::ChernoffUpper { expectation, delta } => out.push(
                probability_report("chernoff_upper", chernoff_upper(*expectation, *delta)?)
                    .detail("delta", *delta),
            ),
            BoundRequest::ChernoffLower { expectation, delta } => out.push(
                probability_report("chernoff_lower", chernoff_lower(*expectation, *delta)?)
                    .detail("delta", *delta),
            ),
            BoundRequest::ChernoffTable { n_values, p, delta } => {
                if n_values.is_empty() {
                    bail!("chernoff_table needs at least one n");
                }
                for &k in n_values {
                    let mean = k as f64 * p;
                    out.push(
                        probability_report("chernoff_upper", chernoff_upper(mean, *delta)?)
                            .detail("n", k as f64)
                            .detail("expectation", mean)
                            .detail("delta", *delta),
                    );
                }
            }
            BoundRequest::Fixed {
                name,
                direction,
                value,
            } => {
                let dir = match direction {
                    FixedDirection::Upper => Direction::UpperOnE,
                    FixedDirection::Lower => Direction::LowerOnE,
                };
                out.push(
                    BoundReport::new(name.clone(), dir, Units::Evaluations)
                        .attest("value supplied by the configuration")
                        .with_value(*value),
                );
            }
        }
    }
    Ok(out)
}

fn is_runtime(r: &BoundReport) -> bool {
    matches!(r.direction, Direction::UpperOnE | Direction::LowerOnE)
        && matches!(r.units, Units::Evaluations | Units::Generations)
}

/// Runtime reports converted to evaluations (μ + λ per generation).
pub fn runtime_reports(reports: &[BoundReport], e: &Experiment) -> Result<Vec<BoundReport>> {
    let (mu, lambda) = (e.algorithm.mu as f64, e.algorithm.lambda as f64);
    reports
        .iter()
        .filter(|r| is_runtime(r))
        .map(|r| Ok(r.clone().into_evaluations(mu, lambda)?))
        .collect()
}

/// Whether every non-runtime report had its hypotheses met.
pub fn side_checks_hold(reports: &[BoundReport]) -> bool {
    reports
        .iter()
        .filter(|r| !is_runtime(r))
        .all(|r| r.hypotheses_ok)
}

/// Simulates one function instance and checks it against oracle and bounds.
pub fn evaluate_point(
    doc: &ConfigDocument,
    function: &FunctionConfig,
    threads: usize,
) -> Result<PointResult> {
    let e = doc.experiment_for(function)?;
    let bounds = evaluate_bounds(&doc.bounds, function, &e)?;
    let oracle = oracle_section(&e, doc.oracle);
    let batch = run_batch(&e, threads)?;
    let runtime = runtime_reports(&bounds, &e)?;
    let comparison = compare(&batch.summary, &runtime, oracle.evaluations)?;
    let checks_satisfied = comparison.all_satisfied() && side_checks_hold(&bounds);
    Ok(PointResult {
        report: PointReport {
            function: function.clone(),
            runtime_summary: batch.summary.clone(),
            oracle,
            bounds,
            comparison,
            checks_satisfied,
        },
        batch,
    })
}
