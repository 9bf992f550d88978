use crate::error::{domain, LabError, Result};

/// Largest `n` for which harmonic numbers are summed term by term.
pub const HARMONIC_EXACT_LIMIT: u64 = 1_000_000;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// H_n = 1 + 1/2 + ... + 1/n (H_0 = 0).
pub fn harmonic(n: u64) -> f64 {
    if n <= HARMONIC_EXACT_LIMIT {
        // smallest terms first
        (1..=n).rev().map(|i| 1.0 / i as f64).sum()
    } else {
        let x = n as f64;
        let x2 = x * x;
        x.ln() + EULER_GAMMA + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`, refining at most `max_depth` times.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || !(tol > 0.0) {
        return domain("quadrature needs finite limits and a positive tolerance");
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, tol, max_depth).map(|v| -v);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let v = refine(&f, a, b, fa, fm, fb, whole, tol, max_depth)?;
    if !v.is_finite() {
        return Err(LabError::Numeric(
            "integrand produced a non-finite value".into(),
        ));
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || !delta.is_finite() {
        return Err(LabError::Numeric(format!(
            "adaptive quadrature did not converge on [{a}, {b}]"
        )));
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// ln(e^x - e^y) for x > y.
pub(crate) fn ln_sub_exp(x: f64, y: f64) -> f64 {
    x + (-(y - x).exp()).ln_1p()
}
