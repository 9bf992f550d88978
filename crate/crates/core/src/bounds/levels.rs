//! Fitness-level methods: artificial fitness levels (upper and lower) and the
//! level-based theorem for non-elitist populations.

use serde::{Deserialize, Serialize};

use super::{BoundReport, Direction, Units};
use crate::algorithms::AlgorithmKind;
use crate::error::{domain, Result};
use crate::fitness::Target;
use crate::mutation::MutationParams;
use crate::oracle::{mutation_kernel, LevelChain};

/// Largest n for which the chi certificate is checked against the exact kernel.
pub const CHI_VERIFY_LIMIT: usize = 64;

/// Fitness-level data for levels `A_1..A_m`, where `A_m` holds the optima.
/// `s[i]` and `u[i]` refer to the non-optimal level `A_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelData {
    pub s: Vec<f64>,
    pub u: Vec<f64>,
    pub chi_afl: f64,
}

impl LevelData {
    pub fn m(&self) -> usize {
        self.s.len() + 1
    }
}

fn leaving_condition(s: &[f64]) -> (bool, String) {
    match s.iter().position(|&x| !(x > 0.0 && x <= 1.0)) {
        Some(i) => (false, format!("s_{} = {} is outside (0, 1]", i + 1, s[i])),
        None => (
            true,
            format!("all {} leaving probabilities lie in (0, 1]", s.len()),
        ),
    }
}

/// E[T] <= sum_i 1/s_i, with `s_i` lower bounds on the probability of leaving
/// level i. Counted in iterations of a single-individual elitist algorithm.
pub fn afl_upper(levels: &LevelData) -> BoundReport {
    let (ok, detail) = leaving_condition(&levels.s);
    BoundReport::new("afl_upper", Direction::UpperOnE, Units::Generations)
        .condition("leaving probabilities in (0, 1]", ok, detail)
        .attest("s_i lower-bounds the probability of leaving level i for every point of the level")
        .with_value(levels.s.iter().map(|s| 1.0 / s).sum())
}

/// E[T] >= chi * sum_i u_i sum_{j >= i} 1/s_j, with `s_j` upper bounds on the
/// leaving probabilities.
pub fn afl_lower(levels: &LevelData) -> Result<BoundReport> {
    let m = levels.m();
    if levels.u.len() != m - 1 && levels.u.len() != m {
        return domain(format!(
            "u must have {} or {m} entries, got {}",
            m - 1,
            levels.u.len()
        ));
    }
    if levels.u.iter().any(|&u| !(u >= 0.0)) {
        return domain("u has negative or NaN entries");
    }
    let total: f64 = levels.u.iter().sum();
    if total > 1.0 + 1e-12 {
        return domain(format!("u is not a sub-distribution: it sums to {total}"));
    }
    let (ok, detail) = leaving_condition(&levels.s);
    let chi = levels.chi_afl;
    let chi_ok = chi > 0.0 && chi <= 1.0;

    let mut suffix = vec![0.0; m];
    for j in (0..m - 1).rev() {
        suffix[j] = suffix[j + 1] + 1.0 / levels.s[j];
    }
    let sum: f64 = levels.u.iter().zip(&suffix).map(|(u, s)| u * s).sum();
    Ok(
        BoundReport::new("afl_lower", Direction::LowerOnE, Units::Generations)
            .condition("leaving probabilities in (0, 1]", ok, detail)
            .condition("chi in (0, 1]", chi_ok, format!("chi = {chi}"))
            .attest("s_i upper-bounds the probability of leaving level i")
            .attest("chi satisfies the jump condition for the partition and algorithm")
            .detail("chi", chi)
            .with_value(chi * sum),
    )
}

/// Certificate for the jump condition of the lower-bound method under
/// standard bit mutation on the ones-count partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiCertificate {
    pub n: usize,
    pub mutation_chi: f64,
    /// `(1 - chi/n)^(n-1)`.
    pub chi_afl: f64,
    /// Smallest `p_ij / sum_{i<j<=k<m-1} p_ik` found on the exact kernel, with
    /// the sum stopping before the optimum level as in the theorem.
    pub min_ratio_theorem_range: Option<f64>,
    /// Same with the optimum level included in the sum.
    pub min_ratio_inclusive: Option<f64>,
    /// Whether `chi_afl` is below both exact ratios; `None` when n is too
    /// large to enumerate.
    pub verified: Option<bool>,
}

pub fn afl_chi_certificate(n: usize, chi: f64) -> Result<ChiCertificate> {
    let params = MutationParams::new(n, chi)?;
    if chi >= n as f64 {
        return domain("chi certificate needs chi < n");
    }
    let p = params.rate();
    let chi_afl = (1.0 - p).powi(n as i32 - 1);
    let (mut excl, mut incl) = (None, None);
    if n <= CHI_VERIFY_LIMIT {
        let k = mutation_kernel(n, AlgorithmKind::OnePlusOneEa, params)?;
        // level i = i ones = n - i zeros
        let prob = |i: usize, j: usize| k[(n - i, n - j)];
        let (mut e, mut c) = (f64::INFINITY, f64::INFINITY);
        for i in 0..n {
            for j in (i + 1)..=n {
                let tail_incl: f64 = (j..=n).map(|l| prob(i, l)).sum();
                let tail_excl = tail_incl - prob(i, n);
                if tail_incl > 0.0 {
                    c = c.min(prob(i, j) / tail_incl);
                }
                if j < n && tail_excl > 0.0 {
                    e = e.min(prob(i, j) / tail_excl);
                }
            }
        }
        excl = e.is_finite().then_some(e);
        incl = c.is_finite().then_some(c);
    }
    let verified = (n <= CHI_VERIFY_LIMIT)
        .then(|| excl.is_none_or(|e| chi_afl <= e) && incl.is_none_or(|c| chi_afl <= c));
    Ok(ChiCertificate {
        n,
        mutation_chi: chi,
        chi_afl,
        min_ratio_theorem_range: excl,
        min_ratio_inclusive: incl,
        verified,
    })
}

/// Largest chi satisfying the jump condition of the lower-bound method on an
/// exact chain, with levels given by distinct fitness values. Returns `None`
/// if no jump constrains it.
pub fn exact_chi(chain: &LevelChain, include_optimum: bool) -> Option<f64> {
    let table = chain.table();
    let mut values: Vec<f64> = table.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let top = values.len() - 1;
    let level_of = |z: usize| values.partition_point(|&v| v < table[z]);
    let n = chain.n();
    let mut best = f64::INFINITY;
    for z in chain.transient_levels() {
        let mut mass = vec![0.0; values.len()];
        for w in 0..=n {
            mass[level_of(w)] += chain.prob(z, w);
        }
        let last = if include_optimum { top } else { top - 1 };
        for j in (level_of(z) + 1)..=top {
            let tail: f64 = if j <= last {
                mass[j..=last].iter().sum()
            } else {
                0.0
            };
            if tail > 0.0 {
                best = best.min(mass[j] / tail);
            }
        }
    }
    best.is_finite().then_some(best)
}

/// Fitness-level data read off an exact chain whose target is the optimum.
/// Levels are the distinct fitness values; returns `(upper, lower)` where the
/// upper data uses the smallest and the lower data the largest probability of
/// leaving each level, `u` is the start mass per level and `chi_afl` comes
/// from [`exact_chi`].
pub fn exact_level_data(chain: &LevelChain, start: &[f64]) -> Result<(LevelData, LevelData)> {
    if chain.target() != Target::Optimum {
        return domain("fitness levels need the optimum as target");
    }
    if start.len() != chain.n() + 1 {
        return domain(format!(
            "start distribution needs {} entries, got {}",
            chain.n() + 1,
            start.len()
        ));
    }
    let table = chain.table();
    let mut values = table.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let m = values.len();
    let level = |z: usize| values.partition_point(|&v| v < table[z]);
    let mut lo = vec![f64::INFINITY; m - 1];
    let mut hi = vec![0.0f64; m - 1];
    let mut u = vec![0.0; m - 1];
    for z in chain.transient_levels() {
        let (i, p) = (level(z), chain.improvement_probability(z));
        lo[i] = lo[i].min(p);
        hi[i] = hi[i].max(p);
        u[i] += start[z];
    }
    let chi = exact_chi(chain, true).unwrap_or(1.0).min(1.0);
    Ok((
        LevelData {
            s: lo,
            u: vec![],
            chi_afl: 1.0,
        },
        LevelData {
            s: hi,
            u,
            chi_afl: chi,
        },
    ))
}

/// Outcome of the `(1 - chi/n)^n >= (1 - delta) e^-chi` lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub precondition: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub inequality_holds: bool,
}

pub fn mutation_lemma_check(n: usize, chi: f64, delta: f64) -> Result<LemmaCheck> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("delta must lie in (0, 1), got {delta}"));
    }
    if !(chi > 0.0 && chi.is_finite()) {
        return domain(format!("chi must be positive, got {chi}"));
    }
    let needed = (chi + delta) * (chi / delta);
    // relative slack absorbs rounding in the product
    let precondition = n as f64 >= needed * (1.0 - 1e-12);
    let lhs = if chi <= n as f64 {
        (1.0 - chi / n as f64).powi(n as i32)
    } else {
        f64::NAN
    };
    let rhs = (1.0 - delta) * (-chi).exp();
    Ok(LemmaCheck {
        precondition,
        lhs,
        rhs,
        inequality_holds: lhs >= rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelBasedConstants {
    pub a: f64,
    pub eps: f64,
    pub c: f64,
}

pub fn level_based_constants(delta: f64, gamma0: f64) -> Result<LevelBasedConstants> {
    if !(delta > 0.0 && delta.is_finite()) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    if !(gamma0 > 0.0 && gamma0 < 1.0) {
        return domain(format!("gamma0 must lie in (0, 1), got {gamma0}"));
    }
    let eps = (delta / 2.0).min(0.5);
    Ok(LevelBasedConstants {
        a: delta * delta * gamma0 / (2.0 * (1.0 + delta)),
        eps,
        c: eps.powi(4) / 24.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelBasedParams {
    pub m: usize,
    pub z: Vec<f64>,
    pub z_star: f64,
    pub delta: f64,
    pub gamma0: f64,
    pub lambda: usize,
}

impl LevelBasedParams {
    fn validate(&self) -> Result<LevelBasedConstants> {
        if self.m == 0 || self.z.len() != self.m {
            return domain(format!(
                "expected {} level probabilities, got {}",
                self.m,
                self.z.len()
            ));
        }
        if !(self.z_star > 0.0 && self.z_star <= 1.0) {
            return domain(format!("z_star must lie in (0, 1], got {}", self.z_star));
        }
        if let Some(j) = self.z.iter().position(|&z| !(z >= self.z_star && z <= 1.0)) {
            return domain(format!("z_{} = {} is not in [z_star, 1]", j + 1, self.z[j]));
        }
        if self.lambda == 0 {
            return domain("lambda must be positive");
        }
        level_based_constants(self.delta, self.gamma0)
    }

    /// Right-hand side of (C3): `(2/a) ln(16m / (a c eps z_star))`.
    pub fn c3_threshold(&self) -> Result<f64> {
        let k = self.validate()?;
        Ok(c3_threshold(self.m, self.z_star, &k))
    }
}

fn c3_threshold(m: usize, z_star: f64, k: &LevelBasedConstants) -> f64 {
    (2.0 / k.a) * (16.0 * m as f64 / (k.a * k.c * k.eps * z_star)).ln()
}

/// E[T] <= (2/(c eps)) (m lambda (1 + ln(1 + c lambda)) + sum_j 1/z_j), with
/// T counting evaluations (lambda per generation).
pub fn level_based_bound(p: &LevelBasedParams) -> Result<BoundReport> {
    let k = p.validate()?;
    let threshold = c3_threshold(p.m, p.z_star, &k);
    let lambda = p.lambda as f64;
    let c3 = lambda >= threshold;
    let value = (2.0 / (k.c * k.eps))
        * (p.m as f64 * lambda * (1.0 + (k.c * lambda).ln_1p())
            + p.z.iter().map(|z| 1.0 / z).sum::<f64>());
    Ok(
        BoundReport::new("level_based", Direction::UpperOnE, Units::Evaluations)
            .condition(
                "C3",
                c3,
                format!("lambda = {} against threshold {threshold:.6}", p.lambda),
            )
            .attest("C1: creating a point above level j has probability at least z_j")
            .attest("C2: the population above level j grows by a factor 1 + delta")
            .detail("a", k.a)
            .detail("eps", k.eps)
            .detail("c", k.c)
            .detail("c3_threshold", threshold)
            .detail("lambda_min", threshold.ceil())
            .with_value(value),
    )
}

/// Largest μ with λ/μ >= ((1+δ)/(1-δ)) e^χ.
pub fn mucommalambda_mu_for(lambda: usize, chi: f64, delta: f64) -> usize {
    let ratio = (1.0 + delta) / (1.0 - delta) * chi.exp();
    (lambda as f64 / ratio).floor() as usize
}

/// OneMax instantiation: m = n levels below the optimum,
/// z_j = (n - j)(χ/n) e^-χ (1 - δ).
pub fn onemax_level_params(
    n: usize,
    chi: f64,
    delta: f64,
    mu: usize,
    lambda: usize,
) -> LevelBasedParams {
    let nf = n as f64;
    let base = chi / nf * (-chi).exp() * (1.0 - delta);
    LevelBasedParams {
        m: n,
        z: (0..n).map(|j| (n - j) as f64 * base).collect(),
        z_star: base,
        delta,
        gamma0: mu as f64 / lambda as f64,
        lambda,
    }
}

/// Smallest λ (with μ from [`mucommalambda_mu_for`]) meeting condition C3 on
/// OneMax. Returns `(mu, lambda)`.
pub fn mucommalambda_lambda_min(n: usize, chi: f64, delta: f64) -> Result<(usize, usize)> {
    if n == 0 || !(delta > 0.0 && delta < 1.0) || !(chi > 0.0) {
        return domain("need n >= 1, chi > 0 and delta in (0, 1)");
    }
    for lambda in 1..=1_000_000_000usize {
        let mu = mucommalambda_mu_for(lambda, chi, delta);
        if mu == 0 {
            continue;
        }
        let p = onemax_level_params(n, chi, delta, mu, lambda);
        if lambda as f64 >= p.c3_threshold()? {
            return Ok((mu, lambda));
        }
    }
    domain("no feasible lambda below 10^9")
}

/// Level-based runtime bound of the (μ,λ) EA on OneMax, in evaluations. The
/// theorem's unspecified `O(nλ)` term is added as `big_o_constant * n * λ`.
pub fn mucommalambda_runtime_bound(
    n: usize,
    chi: f64,
    delta: f64,
    lambda: usize,
    mu: Option<usize>,
    big_o_constant: f64,
) -> Result<BoundReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("delta must lie in (0, 1), got {delta}"));
    }
    if lambda == 0 || n == 0 {
        return domain("n and lambda must be positive");
    }
    let mu = mu.unwrap_or_else(|| mucommalambda_mu_for(lambda, chi, delta));
    if mu == 0 || mu > lambda {
        return domain(format!("mu = {mu} is not in 1..=lambda"));
    }
    let chi_ok = chi > 0.0 && chi < n as f64 / 2.0;
    let lemma = mutation_lemma_check(n, chi, delta)?;
    let ratio_needed = (1.0 + delta) / (1.0 - delta) * chi.exp();
    let ratio = lambda as f64 / mu as f64;
    let params = onemax_level_params(n, chi, delta, mu, lambda);
    let mut inner = level_based_bound(&params)?;
    let c3 = inner.hypotheses_ok;

    let nf = n as f64;
    let lf = lambda as f64;
    let closed_form = 1536.0 * nf / delta.powi(5)
        * (lf * lf.ln() + chi.exp() * (nf + 2.0).ln() / (chi * (1.0 - delta)));
    let mut report = BoundReport::new(
        "mucommalambda_runtime",
        Direction::UpperOnE,
        Units::Evaluations,
    )
    .condition("chi in (0, n/2)", chi_ok, format!("chi = {chi}, n = {n}"))
    .condition(
        "mutation lemma precondition",
        lemma.precondition,
        format!(
            "n = {n} against (chi + delta) chi / delta = {}",
            (chi + delta) * chi / delta
        ),
    )
    .condition(
        "C2 via lambda/mu",
        ratio >= ratio_needed,
        format!("lambda/mu = {ratio:.6}, needed {ratio_needed:.6}"),
    )
    .condition("C3", c3, inner.conditions[0].detail.clone())
    .detail("mu", mu as f64)
    .detail("lambda", lf)
    .detail("gamma0", params.gamma0)
    .detail("closed_form_leading_term", closed_form)
    .detail("big_o_constant", big_o_constant);
    for (k, v) in std::mem::take(&mut inner.details) {
        report = report.detail(k, v);
    }
    if big_o_constant == 0.0 {
        report = report.warn("the O(n lambda) term has no explicit constant; it is taken as 0");
    }
    let value = inner.bound_value.unwrap_or(f64::NAN) + big_o_constant * nf * lf;
    Ok(report.with_value(value))
}

/// OneMax fitness levels for the (1+1) EA at rate 1/n: `s_i = (n-i)/(en)`
/// for i ones.
pub fn onemax_afl_levels(n: usize) -> LevelData {
    let e = std::f64::consts::E;
    LevelData {
        s: (0..n).map(|i| (n - i) as f64 / (e * n as f64)).collect(),
        u: vec![],
        chi_afl: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::AlgorithmConfig;
    use crate::bounds::numeric::harmonic;
    use crate::oracle::{binomial_start, build_level_chain, build_level_chain_with_target};
    use crate::unitation::UnitationSpec;

    #[test]
    fn exact_level_data_on_onemax() {
        let n = 8;
        let cfg = AlgorithmConfig::one_plus_one(n, 1.0).unwrap();
        let chain = build_level_chain(&UnitationSpec::onemax(n), &cfg).unwrap();
        let (up, low) = exact_level_data(&chain, &binomial_start(n)).unwrap();
        assert_eq!(up.s.len(), n);
        // one level per ones-count, so both views agree
        assert_eq!(up.s, low.s);
        assert!((low.u.iter().sum::<f64>() - (1.0 - 0.5f64.powi(n as i32))).abs() < 1e-12);
        assert!(low.chi_afl > 0.0 && low.chi_afl <= 1.0);
        let block =
            build_level_chain_with_target(&UnitationSpec::onemax(n), &cfg, Target::ZerosAtMost(2))
                .unwrap();
        assert!(exact_level_data(&block, &binomial_start(n)).is_err());
        assert!(exact_level_data(&chain, &[1.0]).is_err());
    }

    #[test]
    fn afl_trivial_cases() {
        let l = LevelData {
            s: vec![1.0],
            u: vec![1.0],
            chi_afl: 1.0,
        };
        assert_eq!(afl_upper(&l).bound_value, Some(1.0));
        assert_eq!(afl_lower(&l).unwrap().bound_value, Some(1.0));
        let top = LevelData {
            s: vec![0.5, 0.5],
            u: vec![0.0, 0.0, 1.0],
            chi_afl: 0.5,
        };
        assert_eq!(afl_lower(&top).unwrap().bound_value, Some(0.0));
    }

    #[test]
    fn afl_infeasible_and_invalid() {
        let r = afl_upper(&LevelData {
            s: vec![0.5, 0.0],
            u: vec![],
            chi_afl: 1.0,
        });
        assert!(!r.hypotheses_ok);
        assert_eq!(r.bound_value, None);
        assert!(afl_lower(&LevelData {
            s: vec![0.5],
            u: vec![0.8, 0.4],
            chi_afl: 1.0
        })
        .is_err());
    }

    #[test]
    fn onemax_afl_matches_harmonic_form() {
        let v = afl_upper(&onemax_afl_levels(10)).bound_value.unwrap();
        assert!((v - std::f64::consts::E * 10.0 * harmonic(10)).abs() < 1e-10);
        assert!((v - 79.62).abs() < 0.01);
    }

    #[test]
    fn chi_certificate_values() {
        let c = afl_chi_certificate(10, 1.0).unwrap();
        assert!((c.chi_afl - 0.9f64.powi(9)).abs() < 1e-15);
        assert!((c.chi_afl - 0.3874).abs() < 1e-4);
        assert_eq!(c.verified, Some(true));
        let big = afl_chi_certificate(100_000, 1.0).unwrap();
        assert!(big.chi_afl > (-1.0f64).exp());
        assert!(big.verified.is_none());
    }

    #[test]
    fn lemma_examples() {
        let a = mutation_lemma_check(3, 1.0, 0.5).unwrap();
        assert!(a.precondition && a.inequality_holds);
        let b = mutation_lemma_check(11, 1.0, 0.1).unwrap();
        assert!(b.precondition && b.inequality_holds);
        assert!(!mutation_lemma_check(10, 1.0, 0.1).unwrap().precondition);
        assert!(mutation_lemma_check(11, 1.0, 1.0).is_err());
    }

    #[test]
    fn level_based_constants_spot_value() {
        let k = level_based_constants(0.5, 0.3).unwrap();
        assert_eq!(k.eps, 0.25);
        assert!((k.c - 1.0 / 6144.0).abs() < 1e-18);
        assert!((k.a - 0.25 * 0.3 / 3.0).abs() < 1e-15);
        assert_eq!(level_based_constants(3.0, 0.3).unwrap().eps, 0.5);
    }

    #[test]
    fn level_based_infeasible_reports_lambda_min() {
        let p = onemax_level_params(50, 1.0, 0.1, 3, 10);
        let r = level_based_bound(&p).unwrap();
        assert!(!r.hypotheses_ok);
        assert!(r.bound_value.is_none());
        let threshold = p.c3_threshold().unwrap();
        assert_eq!(r.details["lambda_min"], threshold.ceil());
    }

    #[test]
    fn mucommalambda_at_lambda_min_is_feasible() {
        let (mu, lambda) = mucommalambda_lambda_min(50, 1.0, 0.1).unwrap();
        let r = mucommalambda_runtime_bound(50, 1.0, 0.1, lambda, Some(mu), 0.0).unwrap();
        assert!(r.hypotheses_ok, "{:?}", r.conditions);
        assert!(r.bound_value.unwrap().is_finite());
        assert!(!r.warnings.is_empty());
        assert!(lambda as f64 / mu as f64 >= 1.1 / 0.9 * std::f64::consts::E);
        let below = mucommalambda_runtime_bound(50, 1.0, 0.1, lambda - 1, None, 0.0).unwrap();
        assert!(!below.hypotheses_ok);
    }
}
