//! Standard bit mutation and the binomial flip-count distribution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{domain, LabError, Result};

/// Below this per-bit rate, mutation samples the flip count first and then
/// distinct positions; above it, bits are flipped one Bernoulli trial each.
pub const SPARSE_RATE_THRESHOLD: f64 = 0.1;

/// Per-bit mutation rate `chi / n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutationParams {
    n: usize,
    chi: f64,
}

impl MutationParams {
    pub fn new(n: usize, chi: f64) -> Result<Self> {
        if n == 0 {
            return domain("mutation needs n >= 1");
        }
        if !(chi.is_finite() && chi > 0.0 && chi <= n as f64) {
            return domain(format!(
                "mutation numerator chi must lie in (0, n], got {chi} with n = {n}"
            ));
        }
        Ok(Self { n, chi })
    }

    /// The classical rate 1/n.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, 1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    #[inline]
    pub fn rate(&self) -> f64 {
        self.chi / self.n as f64
    }
}

/// ln Pr{X = j} for X ~ Bin(n, p).
pub fn ln_flip_count_pmf(n: usize, p: f64, j: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("probability must lie in [0, 1], got {p}"));
    }
    if j > n {
        return domain(format!("flip count {j} outside 0..={n}"));
    }
    Ok(ln_binomial_mass(j as f64, n as f64, p, 1.0 - p))
}

/// Loader's saddle-point form of the binomial log-mass, which avoids the
/// cancellation between large log-gamma terms.
fn ln_binomial_mass(x: f64, n: f64, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if x == 0.0 {
        return if p < 0.1 {
            -bd0(n, n * q) - n * p
        } else {
            n * q.ln()
        };
    }
    if x == n {
        return if q < 0.1 {
            -bd0(n, n * p) - n * q
        } else {
            n * p.ln()
        };
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    let lf = (2.0 * std::f64::consts::PI).ln() + x.ln() + (-x / n).ln_1p();
    lc - 0.5 * lf
}

/// ln(n!) - ln(sqrt(2 pi n) (n/e)^n) for integer n >= 1.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    #[allow(clippy::excessive_precision)]
    const SMALL: [f64; 15] = [
        0.081_061_466_795_327_26,
        0.041_340_695_955_409_294,
        0.027_677_925_684_998_339,
        0.020_790_672_103_765_093,
        0.016_644_691_189_821_192,
        0.013_876_128_823_070_748,
        0.011_896_709_945_891_770,
        0.010_411_265_261_972_096,
        0.009_255_462_182_712_733,
        0.008_330_563_433_362_871,
        0.007_573_675_487_951_841,
        0.006_942_840_107_209_530,
        0.006_408_994_188_004_207,
        0.005_951_370_112_758_848,
        0.005_554_733_551_962_801,
    ];
    if n <= 15.0 {
        return SMALL[n as usize - 1];
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// x ln(x / np) + np - x, accurate when x is close to np.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// Pr{X = j} = C(n, j) p^j (1 - p)^(n - j), evaluated in log-space.
pub fn flip_count_pmf(n: usize, p: f64, j: usize) -> Result<f64> {
    ln_flip_count_pmf(n, p, j).map(f64::exp)
}

/// `k * ln(base)` with the convention 0 * ln 0 = 0.
#[inline]
pub(crate) fn ln_pow(base: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * base.ln()
    }
}

/// Reusable standard-bit-mutation operator for a fixed `(n, chi)`.
///
/// The sparse path draws the flip count by inversion over a CDF table built
/// from `+`, `*` and `/` only, so the sampled stream does not depend on the
/// platform's transcendental functions.
#[derive(Clone, Debug)]
pub struct StandardBitMutation {
    params: MutationParams,
    count_cdf: Option<Vec<f64>>,
}

impl StandardBitMutation {
    pub fn new(params: MutationParams) -> Self {
        let p = params.rate();
        let count_cdf = if p < SPARSE_RATE_THRESHOLD {
            sparse_cdf(params.n, p)
        } else {
            None
        };
        Self { params, count_cdf }
    }

    pub fn params(&self) -> MutationParams {
        self.params
    }

    /// Returns a mutated copy; `x` is left untouched.
    pub fn mutate<R: Rng + ?Sized>(&self, x: &Bitstring, rng: &mut R) -> Bitstring {
        let mut y = x.clone();
        self.mutate_in_place(&mut y, rng);
        y
    }

    /// Flips each bit of `x` independently with probability chi/n and returns
    /// the number of flipped bits.
    pub fn mutate_in_place<R: Rng + ?Sized>(&self, x: &mut Bitstring, rng: &mut R) -> usize {
        debug_assert_eq!(x.len(), self.params.n);
        let n = self.params.n;
        match &self.count_cdf {
            Some(cdf) => {
                let u: f64 = rng.gen();
                let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                flip_distinct(x, n, k, rng);
                k
            }
            None => {
                let p = self.params.rate();
                let mut flipped = 0;
                for i in 0..n {
                    if rng.gen_bool(p) {
                        x.flip(i);
                        flipped += 1;
                    }
                }
                flipped
            }
        }
    }
}

/// One-shot convenience wrapper around [`StandardBitMutation`].
pub fn standard_bit_mutation<R: Rng + ?Sized>(
    x: &Bitstring,
    params: MutationParams,
    rng: &mut R,
) -> Result<Bitstring> {
    if x.len() != params.n() {
        return Err(LabError::Dimension {
            expected: params.n(),
            actual: x.len(),
        });
    }
    Ok(StandardBitMutation::new(params).mutate(x, rng))
}

/// Flips `k` distinct, uniformly chosen positions.
fn flip_distinct<R: Rng + ?Sized>(x: &mut Bitstring, n: usize, k: usize, rng: &mut R) {
    const SMALL: usize = 16;
    if k <= SMALL && k * 4 <= n {
        let mut chosen = [0usize; SMALL];
        let mut len = 0;
        while len < k {
            let pos = rng.gen_range(0..n);
            if !chosen[..len].contains(&pos) {
                chosen[len] = pos;
                len += 1;
                x.flip(pos);
            }
        }
    } else {
        for pos in rand::seq::index::sample(rng, n, k) {
            x.flip(pos);
        }
    }
}

/// Normalised CDF of Bin(n, p) via the ratio recurrence, truncated once the
/// terms underflow. `None` if (1-p)^n underflows.
fn sparse_cdf(n: usize, p: f64) -> Option<Vec<f64>> {
    let q = 1.0 - p;
    let mut mass0 = 1.0f64;
    for _ in 0..n {
        mass0 *= q;
    }
    if mass0 < 1e-280 {
        return None;
    }
    let ratio = p / q;
    let mut masses = Vec::with_capacity(16);
    let mut mass = mass0;
    masses.push(mass);
    for j in 0..n {
        mass = mass * (n - j) as f64 / (j + 1) as f64 * ratio;
        if mass < 1e-300 {
            break;
        }
        masses.push(mass);
    }
    let total: f64 = masses.iter().sum();
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = masses
        .iter()
        .map(|m| {
            acc += m;
            acc / total
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    Some(cdf)
}
