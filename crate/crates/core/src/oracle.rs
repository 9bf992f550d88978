//! Exact analysis of RLS and the (1+1) EA on unitation functions: the run is
//! an absorbing Markov chain on the zeros-count of the current point.

use nalgebra::{DMatrix, DVector};
use statrs::function::factorial::ln_binomial;

use crate::algorithms::{AlgorithmConfig, AlgorithmKind, TieBreak};
use crate::error::{domain, LabError, Result};
use crate::fitness::Target;
use crate::mutation::{ln_pow, MutationParams};
use crate::unitation::{build_value_table, UnitationSpec};

const ROW_TOLERANCE: f64 = 1e-12;
/// Beyond this many generations the success probability is computed by
/// repeated squaring instead of step-by-step iteration.
const ITERATE_LIMIT: u64 = 100_000;

/// Transition matrix of an elitist single-individual algorithm, indexed by
/// zeros-count.
#[derive(Clone, Debug)]
pub struct LevelChain {
    n: usize,
    kind: AlgorithmKind,
    mutation: MutationParams,
    table: Vec<f64>,
    target: Target,
    p: DMatrix<f64>,
}

impl LevelChain {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    pub fn mutation(&self) -> MutationParams {
        self.mutation
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    #[inline]
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.p[(from, to)]
    }

    pub fn is_absorbing(&self, z: usize) -> bool {
        self.target.contains_zeros(z)
    }

    pub fn transient_levels(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.n).filter(|&z| !self.is_absorbing(z))
    }

    /// Probability of moving from level `z` to a point of strictly higher
    /// fitness.
    pub fn improvement_probability(&self, z: usize) -> f64 {
        (0..=self.n)
            .filter(|&w| self.table[w] > self.table[z])
            .map(|w| self.p[(z, w)])
            .sum()
    }

    /// Probability of leaving level `z` (1 minus the self-loop).
    pub fn leaving_probability(&self, z: usize) -> f64 {
        1.0 - self.p[(z, z)]
    }
}

/// Chain whose absorbing set is the optimum.
pub fn build_level_chain(spec: &UnitationSpec, alg: &AlgorithmConfig) -> Result<LevelChain> {
    build_level_chain_with_target(spec, alg, Target::Optimum)
}

pub fn build_level_chain_with_target(
    spec: &UnitationSpec,
    alg: &AlgorithmConfig,
    target: Target,
) -> Result<LevelChain> {
    if !alg.kind.is_single_individual() {
        return Err(LabError::UnsupportedAlgorithm(format!(
            "the exact oracle covers RLS and the (1+1) EA only, got {:?}",
            alg.kind
        )));
    }
    if alg.n() != spec.n {
        return Err(LabError::Dimension {
            expected: spec.n,
            actual: alg.n(),
        });
    }
    if target.threshold() > spec.n {
        return Err(LabError::Config(format!(
            "target zeros-count {} exceeds n = {}",
            target.threshold(),
            spec.n
        )));
    }
    let n = spec.n;
    let table = build_value_table(spec)?;
    let kernel = mutation_kernel(n, alg.kind, alg.mutation)?;
    let tie_accept = match alg.tie_break {
        TieBreak::PreferOffspring => 1.0,
        TieBreak::UniformRandom => 0.5,
    };

    let mut p = DMatrix::zeros(n + 1, n + 1);
    for z in 0..=n {
        if target.contains_zeros(z) {
            p[(z, z)] = 1.0;
            continue;
        }
        let mut moved = 0.0;
        for w in (0..=n).filter(|&w| w != z) {
            let q = kernel[(z, w)];
            let mass = if table[w] > table[z] {
                q
            } else if table[w] == table[z] {
                q * tie_accept
            } else {
                0.0
            };
            p[(z, w)] = mass;
            moved += mass;
        }
        p[(z, z)] = 1.0 - moved;
    }
    let chain = LevelChain {
        n,
        kind: alg.kind,
        mutation: alg.mutation,
        table,
        target,
        p,
    };
    check_stochastic(&chain)?;
    Ok(chain)
}

/// Raw variation kernel on zeros-counts, before selection.
///
/// From `z` zeros, standard bit mutation flips `a` of the zeros and `b` of the
/// ones, landing on `z - a + b` zeros with probability
/// `C(z,a) C(n-z,b) p^(a+b) (1-p)^(n-a-b)`.
pub fn mutation_kernel(
    n: usize,
    kind: AlgorithmKind,
    params: MutationParams,
) -> Result<DMatrix<f64>> {
    if params.n() != n {
        return Err(LabError::Dimension {
            expected: n,
            actual: params.n(),
        });
    }
    let mut k = DMatrix::zeros(n + 1, n + 1);
    match kind {
        AlgorithmKind::Rls => {
            for z in 0..=n {
                if z > 0 {
                    k[(z, z - 1)] = z as f64 / n as f64;
                }
                if z < n {
                    k[(z, z + 1)] = (n - z) as f64 / n as f64;
                }
            }
        }
        AlgorithmKind::OnePlusOneEa => {
            let p = params.rate();
            let (lp, lq) = (p.ln(), (1.0 - p).ln());
            let mut terms: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
            for z in 0..=n {
                terms.iter_mut().for_each(Vec::clear);
                for a in 0..=z {
                    let la = ln_binomial(z as u64, a as u64);
                    for b in 0..=(n - z) {
                        let flips = a + b;
                        let t = la
                            + ln_binomial((n - z) as u64, b as u64)
                            + ln_pow_cached(lp, p, flips)
                            + ln_pow_cached(lq, 1.0 - p, n - flips);
                        terms[z - a + b].push(t);
                    }
                }
                let row: Vec<f64> = terms.iter().map(|t| log_sum_exp(t).exp()).collect();
                let total: f64 = row.iter().sum();
                if !(total.is_finite() && total > 0.0) {
                    return Err(LabError::Numeric(format!(
                        "mutation kernel row {z} has mass {total}"
                    )));
                }
                for (w, v) in row.into_iter().enumerate() {
                    k[(z, w)] = v / total;
                }
            }
        }
        other => {
            return Err(LabError::UnsupportedAlgorithm(format!(
                "no level kernel for {other:?}"
            )));
        }
    }
    Ok(k)
}

#[inline]
fn ln_pow_cached(ln_base: f64, base: f64, k: usize) -> f64 {
    if k == 0 || base == 1.0 {
        0.0
    } else if base == 0.0 {
        f64::NEG_INFINITY
    } else {
        k as f64 * ln_base
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Uniform initialisation: zeros-count ~ Bin(n, 1/2).
pub fn binomial_start(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|z| (ln_binomial(n as u64, z as u64) + ln_pow(0.5, n)).exp())
        .collect()
}

/// All mass on zeros-count `z`.
pub fn point_start(n: usize, z: usize) -> Result<Vec<f64>> {
    if z > n {
        return domain(format!("start level {z} outside 0..={n}"));
    }
    let mut v = vec![0.0; n + 1];
    v[z] = 1.0;
    Ok(v)
}

fn check_start(chain: &LevelChain, start: &[f64]) -> Result<()> {
    if start.len() != chain.n + 1 {
        return Err(LabError::Dimension {
            expected: chain.n + 1,
            actual: start.len(),
        });
    }
    if start.iter().any(|&s| !(s >= 0.0)) {
        return domain("start distribution has negative or NaN entries");
    }
    let total: f64 = start.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return domain(format!("start distribution sums to {total}"));
    }
    Ok(())
}

/// Expected generations until absorption, for every level (0 on absorbing
/// levels).
pub fn expected_hitting_times(chain: &LevelChain) -> Result<Vec<f64>> {
    let transient: Vec<usize> = chain.transient_levels().collect();
    let mut times = vec![0.0; chain.n + 1];
    if transient.is_empty() {
        return Ok(times);
    }
    let k = transient.len();
    let mut a = DMatrix::zeros(k, k);
    for (r, &i) in transient.iter().enumerate() {
        for (c, &j) in transient.iter().enumerate() {
            a[(r, c)] = if i == j { 1.0 } else { 0.0 } - chain.p[(i, j)];
        }
    }
    let ones = DVector::from_element(k, 1.0);
    let sol = a
        .lu()
        .solve(&ones)
        .ok_or_else(|| LabError::Numeric("singular system: the target is unreachable".into()))?;
    for (r, &i) in transient.iter().enumerate() {
        let t = sol[r];
        if !(t.is_finite() && t >= 1.0 - 1e-9) {
            return Err(LabError::Numeric(format!(
                "hitting time at level {i} came out as {t}"
            )));
        }
        times[i] = t;
    }
    Ok(times)
}

/// Start-weighted expected hitting time in generations. Add 1 for the initial
/// evaluation to convert to evaluations.
pub fn exact_expected_hitting_time(chain: &LevelChain, start: &[f64]) -> Result<f64> {
    check_start(chain, start)?;
    let times = expected_hitting_times(chain)?;
    Ok(start.iter().zip(&times).map(|(s, t)| s * t).sum())
}

/// Pr{absorbed within `t` generations}.
pub fn exact_success_probability(chain: &LevelChain, start: &[f64], t: u64) -> Result<f64> {
    check_start(chain, start)?;
    let dist = if t <= ITERATE_LIMIT {
        let mut d = DVector::from_column_slice(start).transpose();
        for _ in 0..t {
            d = &d * &chain.p;
        }
        d
    } else {
        let mut d = DVector::from_column_slice(start).transpose();
        let mut pow = chain.p.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                d = &d * &pow;
            }
            e >>= 1;
            if e > 0 {
                pow = &pow * &pow;
            }
        }
        d
    };
    let mass: f64 = (0..=chain.n)
        .filter(|&z| chain.is_absorbing(z))
        .map(|z| dist[z])
        .sum();
    Ok(mass.clamp(0.0, 1.0))
}

/// Success probabilities at each of the (ascending) generation counts `ts`.
pub fn exact_success_curve(chain: &LevelChain, start: &[f64], ts: &[u64]) -> Result<Vec<f64>> {
    check_start(chain, start)?;
    if ts.windows(2).any(|w| w[1] < w[0]) {
        return domain("generation grid must be ascending");
    }
    let mut d = DVector::from_column_slice(start).transpose();
    let mut done = 0u64;
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        while done < t {
            d = &d * &chain.p;
            done += 1;
        }
        let mass: f64 = (0..=chain.n)
            .filter(|&z| chain.is_absorbing(z))
            .map(|z| d[z])
            .sum();
        out.push(mass.clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Exact one-step drift `E[d(X_t) - d(X_{t+1}) | X_t = i]` for every transient
/// level `i`, as `(i, drift)` pairs.
pub fn exact_drift<D: Fn(usize) -> f64>(
    chain: &LevelChain,
    distance: D,
) -> Result<Vec<(usize, f64)>> {
    for z in (0..=chain.n).filter(|&z| chain.is_absorbing(z)) {
        if distance(z) != 0.0 {
            return domain(format!("distance must vanish on absorbing level {z}"));
        }
    }
    Ok(chain
        .transient_levels()
        .map(|i| {
            let di = distance(i);
            let drift = (0..=chain.n)
                .map(|j| chain.p[(i, j)] * (di - distance(j)))
                .sum();
            (i, drift)
        })
        .collect())
}

/// Largest deviation of any row sum from 1.
pub fn max_row_error(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| (r.sum() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn check_stochastic(chain: &LevelChain) -> Result<()> {
    let err = max_row_error(&chain.p);
    if err > ROW_TOLERANCE {
        return Err(LabError::Numeric(format!(
            "row sums deviate from 1 by {err}"
        )));
    }
    Ok(())
}
