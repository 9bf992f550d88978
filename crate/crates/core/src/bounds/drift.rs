//! Additive, multiplicative, variable and negative drift theorems.
//!
//! Drift is the expected decrease of the distance per step, so progress
//! towards the target is positive.

use serde::{Deserialize, Serialize};

use super::numeric::{adaptive_simpson, ln_sub_exp};
use super::{BoundReport, Direction, Units};
use crate::algorithms::AlgorithmConfig;
use crate::error::{domain, Result};
use crate::oracle::build_level_chain;
use crate::unitation::UnitationSpec;

pub const QUADRATURE_TOLERANCE: f64 = 1e-9;
pub const QUADRATURE_MAX_DEPTH: u32 = 60;
const SIGN_GRID: usize = 1000;
const JUMP_CUTOFF: f64 = 1e-15;
const JUMP_MAX: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditiveDrift {
    /// Largest possible distance.
    pub b: f64,
    /// Initial distance.
    pub y0: f64,
    pub eps: f64,
}

/// `(upper, lower)` = `(b / eps, Y0 / eps)`. The upper bound presumes drift at
/// least `eps` everywhere, the lower bound drift at most `eps`.
pub fn additive_drift_bounds(spec: &AdditiveDrift) -> Result<(BoundReport, BoundReport)> {
    if !(spec.eps > 0.0 && spec.eps.is_finite()) {
        return domain(format!("eps must be positive, got {}", spec.eps));
    }
    if !(spec.y0 >= 0.0 && spec.y0 <= spec.b && spec.b.is_finite()) {
        return domain(format!(
            "need 0 <= Y0 <= b, got Y0 = {}, b = {}",
            spec.y0, spec.b
        ));
    }
    let upper = BoundReport::new(
        "additive_drift_upper",
        Direction::UpperOnE,
        Units::Generations,
    )
    .attest("drift is at least eps while the target is not reached")
    .attest("E[T] is finite")
    .detail("eps", spec.eps)
    .with_value(spec.b / spec.eps);
    let lower = BoundReport::new(
        "additive_drift_lower",
        Direction::LowerOnE,
        Units::Generations,
    )
    .attest("drift is at most eps while the target is not reached")
    .attest("E[T] is finite")
    .detail("eps", spec.eps)
    .with_value(spec.y0 / spec.eps);
    Ok((upper, lower))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeDrift {
    pub delta: f64,
    pub c_min: f64,
    pub c_max: f64,
}

/// E[T] <= (2/delta) ln(1 + c_max / c_min).
pub fn multiplicative_drift_bound(spec: &MultiplicativeDrift) -> Result<BoundReport> {
    let MultiplicativeDrift {
        delta,
        c_min,
        c_max,
    } = *spec;
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    if !(c_min > 0.0 && c_min <= c_max && c_max.is_finite()) {
        return domain(format!("need 0 < c_min <= c_max, got {c_min}, {c_max}"));
    }
    Ok(BoundReport::new(
        "multiplicative_drift",
        Direction::UpperOnE,
        Units::Generations,
    )
    .attest("drift is at least delta times the current state")
    .attest("every non-target state lies in [c_min, c_max]")
    .with_value(2.0 / delta * (c_max / c_min).ln_1p()))
}

/// Parts (i) to (iv) of the variable drift theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableMode {
    /// h non-decreasing, drift at least h: upper bound on E[T].
    UpperOnE,
    /// h non-increasing, drift at most h: lower bound on E[T].
    LowerOnE,
    /// h' >= rate: Pr{T >= t} bound.
    TailUpperIii,
    /// h' <= -rate: Pr{T < t} bound.
    TailUpperIv,
}

pub struct VariableDrift<H: Fn(f64) -> f64> {
    pub h: H,
    pub x_min: f64,
    pub x_max: f64,
    pub x0: f64,
    pub rate: Option<f64>,
}

pub fn variable_drift_bound<H: Fn(f64) -> f64>(
    spec: &VariableDrift<H>,
    mode: VariableMode,
    t: Option<f64>,
) -> Result<BoundReport> {
    let VariableDrift {
        h,
        x_min,
        x_max,
        x0,
        rate,
    } = spec;
    let (x_min, x_max, x0) = (*x_min, *x_max, *x0);
    if !(x_min >= 0.0 && x_min <= x0 && x0 <= x_max && x_max.is_finite()) {
        return domain(format!(
            "need 0 <= x_min <= X0 <= x_max, got {x_min}, {x0}, {x_max}"
        ));
    }
    let tails = matches!(mode, VariableMode::TailUpperIii | VariableMode::TailUpperIv);
    let rate = match (tails, *rate) {
        (true, Some(r)) if r > 0.0 && r.is_finite() => r,
        (true, _) => return domain("tail modes need a positive rate"),
        (false, r) => r.unwrap_or(0.0),
    };
    let t = match (tails, t) {
        (true, Some(t)) if t.is_finite() => t,
        (true, _) => return domain("tail modes need a time t"),
        (false, _) => 0.0,
    };

    let (positive, monotone, sign_detail) = check_shape(h, x_min, x_max, mode, rate);
    let h_min = h(x_min);
    let integral = adaptive_simpson(
        |y| 1.0 / h(y),
        x_min,
        x0,
        QUADRATURE_TOLERANCE,
        QUADRATURE_MAX_DEPTH,
    )?;
    let expected = x_min / h_min + integral;

    let (id, direction, units) = match mode {
        VariableMode::UpperOnE => (
            "variable_drift_upper",
            Direction::UpperOnE,
            Units::Generations,
        ),
        VariableMode::LowerOnE => (
            "variable_drift_lower",
            Direction::LowerOnE,
            Units::Generations,
        ),
        VariableMode::TailUpperIii => (
            "variable_drift_tail_iii",
            Direction::TailUpper,
            Units::Probability,
        ),
        VariableMode::TailUpperIv => (
            "variable_drift_tail_iv",
            Direction::TailUpper,
            Units::Probability,
        ),
    };
    let report = BoundReport::new(id, direction, units)
        .condition(
            "h positive on [x_min, x_max]",
            positive,
            format!("h(x_min) = {h_min}"),
        )
        .condition("derivative sign", monotone, sign_detail)
        .attest(match mode {
            VariableMode::UpperOnE | VariableMode::TailUpperIii => "drift is at least h(X_t)",
            _ => "drift is at most h(X_t)",
        })
        .detail("expected_time_expression", expected)
        .detail("integral", integral);
    Ok(match mode {
        VariableMode::UpperOnE | VariableMode::LowerOnE => report.with_value(expected),
        VariableMode::TailUpperIii => {
            let ln = (-rate * (t - expected)).min(0.0);
            report.detail("t", t).with_log_value(ln)
        }
        VariableMode::TailUpperIv => {
            let report = report.detail("t", t);
            if rate * t <= rate {
                report.with_value(0.0)
            } else {
                let ln = ln_sub_exp(rate * t, rate) - rate.exp_m1().ln() - rate * expected;
                report.with_log_value(ln.min(0.0))
            }
        }
    })
}

/// Checks positivity and the declared slope of `h` on a uniform grid.
fn check_shape<H: Fn(f64) -> f64>(
    h: &H,
    lo: f64,
    hi: f64,
    mode: VariableMode,
    rate: f64,
) -> (bool, bool, String) {
    let steps = if hi > lo { SIGN_GRID } else { 0 };
    let xs: Vec<f64> = (0..=steps)
        .map(|k| {
            if steps == 0 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / steps as f64
            }
        })
        .collect();
    let hs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
    let positive = hs.iter().all(|&v| v > 0.0 && v.is_finite());
    let mut worst: Option<(f64, f64)> = None;
    for k in 0..steps {
        let dx = xs[k + 1] - xs[k];
        let dh = hs[k + 1] - hs[k];
        let tol = 1e-12 * hs[k].abs().max(hs[k + 1].abs()).max(1.0);
        let ok = match mode {
            VariableMode::UpperOnE => dh >= -tol,
            VariableMode::LowerOnE => dh <= tol,
            VariableMode::TailUpperIii => dh >= rate * dx - tol,
            VariableMode::TailUpperIv => dh <= -rate * dx + tol,
        };
        if !ok && worst.is_none() {
            worst = Some((xs[k], dh / dx));
        }
    }
    let detail = match worst {
        Some((x, slope)) => format!("slope {slope} near x = {x} violates the {mode:?} requirement"),
        None => format!("slope requirement of {mode:?} holds on a {steps}-step grid"),
    };
    (positive, worst.is_none(), detail)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeDrift {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub delta: f64,
    pub r: f64,
}

/// Checks both conditions of the negative-drift theorem on the given states.
///
/// `drift_at(i)` is `E[X_{t+1} - X_t | X_t = i]` (drift away from the target)
/// and `jump_tail_at(i, j)` the probability of a jump of length `j`. The
/// theorem's constant is existential, so the report only carries `b - a`.
pub fn negative_drift_check<D, J>(
    spec: &NegativeDrift,
    states: &[usize],
    drift_at: D,
    jump_tail_at: J,
) -> Result<BoundReport>
where
    D: Fn(usize) -> f64,
    J: Fn(usize, usize) -> f64,
{
    let NegativeDrift {
        a,
        b,
        eps,
        delta,
        r,
    } = *spec;
    if !(a < b) {
        return domain(format!("interval [a, b] must have a < b, got [{a}, {b}]"));
    }
    if !(eps > 0.0 && delta > 0.0 && r > 0.0) {
        return domain("eps, delta and r must be positive");
    }

    let inside: Vec<usize> = states
        .iter()
        .copied()
        .filter(|&i| a < i as f64 && (i as f64) < b)
        .collect();
    let low = inside
        .iter()
        .map(|&i| (i, drift_at(i)))
        .min_by(|x, y| x.1.total_cmp(&y.1));
    let (c1, c1_detail) = match low {
        None => (false, "no state lies strictly inside (a, b)".to_string()),
        Some((i, d)) => (
            d >= eps,
            format!(
                "smallest drift {d:.6} at state {i} over {} states, eps = {eps}",
                inside.len()
            ),
        ),
    };

    let mut c2 = true;
    let mut c2_detail = String::new();
    let mut checked = 0usize;
    'states: for &i in states.iter().filter(|&&i| i as f64 > a) {
        for j in 1..=JUMP_MAX {
            let lhs = jump_tail_at(i, j);
            let rhs = (1.0 + delta).powf(-(j as f64 - r));
            checked += 1;
            if lhs > rhs * (1.0 + 1e-12) {
                c2 = false;
                c2_detail = format!("state {i}, jump {j}: probability {lhs:e} exceeds {rhs:e}");
                break 'states;
            }
            if lhs < JUMP_CUTOFF && rhs < JUMP_CUTOFF {
                break;
            }
        }
    }
    if c2 {
        c2_detail = format!("{checked} (state, jump) pairs within (1 + delta)^-(j - r)");
    }

    Ok(BoundReport::new(
        "negative_drift",
        Direction::ExponentialLower,
        Units::Distance,
    )
    .condition("drift away from the target", c1, c1_detail)
    .condition("no large jumps", c2, c2_detail)
    .warn("the constant c* is existential; only the interval length b - a is reported")
    .detail("a", a)
    .detail("b", b)
    .with_value(b - a))
}

/// Negative-drift conditions for the (1+1) EA on Needle with the interval
/// `[n/2 - 2 gamma n, n/2 - gamma n]` of zeros-counts and `eps = 2 gamma`,
/// using drift and jump probabilities of the exact kernel.
pub fn needle_negative_drift(n: usize, gamma: f64, delta: f64, r: f64) -> Result<BoundReport> {
    if !(gamma > 0.0 && gamma < 0.25) {
        return domain(format!("gamma must lie in (0, 1/4), got {gamma}"));
    }
    let chain = build_level_chain(
        &UnitationSpec::needle(n),
        &AlgorithmConfig::one_plus_one(n, 1.0)?,
    )?;
    let nf = n as f64;
    let spec = NegativeDrift {
        a: nf / 2.0 - 2.0 * gamma * nf,
        b: nf / 2.0 - gamma * nf,
        eps: 2.0 * gamma,
        delta,
        r,
    };
    let states: Vec<usize> = (0..=n).collect();
    // increase of the zeros-count, i.e. away from the needle
    let drift_at = |i: usize| {
        (0..=n)
            .map(|j| chain.prob(i, j) * (j as f64 - i as f64))
            .sum()
    };
    let jump_at = |i: usize, j: usize| {
        let up = if i + j <= n {
            chain.prob(i, i + j)
        } else {
            0.0
        };
        let down = if j <= i { chain.prob(i, i - j) } else { 0.0 };
        up + down
    };
    Ok(negative_drift_check(&spec, &states, drift_at, jump_at)?.detail("gamma", gamma))
}
