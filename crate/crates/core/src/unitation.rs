//! Functions of unitation composed from linear, gap and plateau blocks.
//!
//! Blocks are listed from the all-zeros string toward the all-ones string.
//! A block of length `m` at position `k` spans the zeros-counts `k + m`
//! (its start, owned by the previous block) down to `k` (its end). Values
//! are stitched with a running level `L`, starting at `L = 0` on the
//! all-zeros string:
//!
//! * linear: interior/end points get `L + a*i` for `i = 1..=m`, then `L += a*m`;
//! * plateau: interior points keep `L`, the end point gets `L + 1`;
//! * gap: interior points get one below the smallest value assigned so far,
//!   the end point gets `L + 1`.
//!
//! The table is finally shifted so its minimum is 0. The optimum is always
//! the all-ones string (zeros-count 0).

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Linear,
    Gap,
    Plateau,
}

fn default_slope() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub kind: BlockKind,
    pub m: usize,
    /// Slope of a linear block.
    #[serde(default = "default_slope")]
    pub a: f64,
    /// Intercept of a linear block. Offsets between blocks are fixed by the
    /// stitching rule, so this does not move the table.
    #[serde(default)]
    pub b: f64,
}

impl BlockSpec {
    pub fn linear(m: usize) -> Self {
        Self {
            kind: BlockKind::Linear,
            m,
            a: 1.0,
            b: 0.0,
        }
    }

    pub fn linear_with(m: usize, a: f64, b: f64) -> Self {
        Self {
            kind: BlockKind::Linear,
            m,
            a,
            b,
        }
    }

    pub fn gap(m: usize) -> Self {
        Self {
            kind: BlockKind::Gap,
            m,
            a: 1.0,
            b: 0.0,
        }
    }

    pub fn plateau(m: usize) -> Self {
        Self {
            kind: BlockKind::Plateau,
            m,
            a: 1.0,
            b: 0.0,
        }
    }
}

/// A block together with its derived position `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlacedBlock {
    pub block: BlockSpec,
    /// Zeros-count at which the block ends.
    pub k: usize,
}

impl PlacedBlock {
    /// Zeros-count at which the block starts.
    pub fn start(&self) -> usize {
        self.k + self.block.m
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitationSpec {
    pub n: usize,
    pub blocks: Vec<BlockSpec>,
}

impl UnitationSpec {
    pub fn new(n: usize, blocks: Vec<BlockSpec>) -> Result<Self> {
        let spec = Self { n, blocks };
        spec.validate()?;
        Ok(spec)
    }

    /// OneMax: one linear block over the whole string.
    pub fn onemax(n: usize) -> Self {
        Self {
            n,
            blocks: vec![BlockSpec::linear(n)],
        }
    }

    /// Needle: flat everywhere except the all-ones string.
    pub fn needle(n: usize) -> Self {
        Self {
            n,
            blocks: vec![BlockSpec::plateau(n)],
        }
    }

    /// Linear lead-in, a gap block of length `m` ending at position `k`, then
    /// a linear run to the optimum.
    pub fn with_gap(n: usize, m: usize, k: usize) -> Result<Self> {
        Self::embedded(n, BlockSpec::gap(m), k)
    }

    /// Linear lead-in, a plateau block of length `m` ending at position `k`,
    /// then a linear run to the optimum.
    pub fn with_plateau(n: usize, m: usize, k: usize) -> Result<Self> {
        Self::embedded(n, BlockSpec::plateau(m), k)
    }

    fn embedded(n: usize, block: BlockSpec, k: usize) -> Result<Self> {
        if block.m == 0 || block.m + k > n {
            return Err(LabError::Spec(format!(
                "block of length {} at position {k} does not fit in n = {n}",
                block.m
            )));
        }
        let lead = n - block.m - k;
        let mut blocks = Vec::with_capacity(3);
        if lead > 0 {
            blocks.push(BlockSpec::linear(lead));
        }
        blocks.push(block);
        if k > 0 {
            blocks.push(BlockSpec::linear(k));
        }
        Self::new(n, blocks)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(LabError::Spec("n must be positive".into()));
        }
        if self.blocks.is_empty() {
            return Err(LabError::Spec("at least one block is required".into()));
        }
        for (i, b) in self.blocks.iter().enumerate() {
            if b.m == 0 {
                return Err(LabError::Spec(format!("block {i} has length 0")));
            }
            if b.kind == BlockKind::Linear && !(b.a.is_finite() && b.a > 0.0) {
                return Err(LabError::Spec(format!(
                    "linear block {i} needs slope a > 0, got {}",
                    b.a
                )));
            }
            if !b.b.is_finite() {
                return Err(LabError::Spec(format!(
                    "block {i} has a non-finite intercept"
                )));
            }
        }
        let total: usize = self.blocks.iter().map(|b| b.m).sum();
        if total != self.n {
            return Err(LabError::Spec(format!(
                "block lengths sum to {total}, expected n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Blocks with their positions, in left-to-right order.
    pub fn placed_blocks(&self) -> Vec<PlacedBlock> {
        let mut start = self.n;
        self.blocks
            .iter()
            .map(|b| {
                let k = start.saturating_sub(b.m);
                start = k;
                PlacedBlock {
                    block: b.clone(),
                    k,
                }
            })
            .collect()
    }

    pub fn value_table(&self) -> Result<Vec<f64>> {
        build_value_table(self)
    }
}

/// Stitched value table indexed by zeros-count `0..=n`.
pub fn build_value_table(spec: &UnitationSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n;
    let mut table = vec![0.0; n + 1];
    let mut level = 0.0f64;
    let mut lowest = 0.0f64;
    let mut z = n;
    for block in &spec.blocks {
        let m = block.m;
        match block.kind {
            BlockKind::Linear => {
                for i in 1..=m {
                    table[z - i] = level + block.a * i as f64;
                }
                level += block.a * m as f64;
            }
            BlockKind::Plateau => {
                for i in 1..m {
                    table[z - i] = level;
                }
                level += 1.0;
                table[z - m] = level;
            }
            BlockKind::Gap => {
                if m > 1 {
                    lowest -= 1.0;
                    for i in 1..m {
                        table[z - i] = lowest;
                    }
                }
                level += 1.0;
                table[z - m] = level;
            }
        }
        z -= m;
    }
    let min = table.iter().copied().fold(f64::INFINITY, f64::min);
    for v in &mut table {
        *v -= min;
    }
    Ok(table)
}

/// `f(x)` for a unitation spec; depends on `x` only through its zeros-count.
pub fn evaluate(spec: &UnitationSpec, x: &Bitstring) -> Result<f64> {
    if x.len() != spec.n {
        return Err(LabError::Dimension {
            expected: spec.n,
            actual: x.len(),
        });
    }
    Ok(build_value_table(spec)?[x.count_zeros()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn onemax_table() {
        assert_eq!(
            UnitationSpec::onemax(4).value_table().unwrap(),
            vec![4.0, 3.0, 2.0, 1.0, 0.0]
        );
        let spec = UnitationSpec::onemax(10);
        assert_eq!(evaluate(&spec, &Bitstring::ones(10)).unwrap(), 10.0);
    }

    #[test]
    fn needle_table() {
        assert_eq!(
            UnitationSpec::needle(4).value_table().unwrap(),
            vec![1.0, 0.0, 0.0, 0.0, 0.0]
        );
        let spec = UnitationSpec::needle(6);
        assert_eq!(evaluate(&spec, &Bitstring::ones(6)).unwrap(), 1.0);
        let mut x = Bitstring::ones(6);
        x.flip(2);
        assert_eq!(evaluate(&spec, &x).unwrap(), 0.0);
        assert_eq!(evaluate(&spec, &Bitstring::zeros(6)).unwrap(), 0.0);
    }

    #[test]
    fn linear_then_plateau_by_hand() {
        // running level: z=4 -> 0, linear gives z=3 -> 1, z=2 -> 2 (L=2),
        // plateau interior z=1 -> 2, end z=0 -> 3
        let spec =
            UnitationSpec::new(4, vec![BlockSpec::linear(2), BlockSpec::plateau(2)]).unwrap();
        let t = spec.value_table().unwrap();
        let l = 2.0;
        assert_eq!(t, vec![l + 1.0, l, l, l - 1.0, l - 2.0]);
    }

    #[test]
    fn plateau_interior_is_flat() {
        let spec = UnitationSpec::new(
            10,
            vec![
                BlockSpec::linear(5),
                BlockSpec::plateau(3),
                BlockSpec::linear(2),
            ],
        )
        .unwrap();
        let t = spec.value_table().unwrap();
        assert_eq!(t[4], t[3]);
        assert_eq!(t[5], t[4]);
        assert!(t[2] > t[3]);
        let mut four = Bitstring::ones(10);
        for i in 0..4 {
            four.flip(i);
        }
        let mut three = Bitstring::ones(10);
        for i in 5..8 {
            three.flip(i);
        }
        assert_eq!(
            evaluate(&spec, &four).unwrap(),
            evaluate(&spec, &three).unwrap()
        );
    }

    #[test]
    fn gap_interior_below_everything_before() {
        // n=10, gap m=2 at k=1: z=3 is the gap start, z=2 interior, z=1 end
        let spec = UnitationSpec::with_gap(10, 2, 1).unwrap();
        let t = spec.value_table().unwrap();
        assert_eq!(t[2], 0.0);
        assert!(t[3..].iter().all(|&v| v > t[2]));
        assert!(t[1] > t[3]);
        assert_eq!(t.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
    }

    #[test]
    fn two_gaps_each_dip_lower() {
        let spec = UnitationSpec::new(
            9,
            vec![
                BlockSpec::linear(2),
                BlockSpec::gap(3),
                BlockSpec::linear(1),
                BlockSpec::gap(3),
            ],
        )
        .unwrap();
        let t = spec.value_table().unwrap();
        // second gap interior (z = 2, 1) below first gap interior (z = 6, 5)
        assert!(t[1] < t[5]);
        assert!(t[5] < t[9]);
        assert!(t[0] > t[1..].iter().copied().fold(f64::MIN, f64::max));
    }

    #[test]
    fn invalid_specs() {
        assert!(UnitationSpec::new(5, vec![BlockSpec::linear(3)]).is_err());
        assert!(UnitationSpec::new(3, vec![BlockSpec::linear(3), BlockSpec::gap(0)]).is_err());
        assert!(UnitationSpec::new(3, vec![BlockSpec::linear_with(3, -1.0, 0.0)]).is_err());
        assert!(UnitationSpec::with_gap(5, 4, 2).is_err());
        assert!(matches!(
            evaluate(&UnitationSpec::onemax(3), &Bitstring::zeros(4)),
            Err(LabError::Dimension {
                expected: 3,
                actual: 4
            })
        ));
    }

    #[test]
    fn placed_positions() {
        let spec = UnitationSpec::with_plateau(100, 10, 60).unwrap();
        let placed = spec.placed_blocks();
        assert_eq!(placed.len(), 3);
        assert_eq!((placed[1].start(), placed[1].k), (70, 60));
        assert_eq!(placed[2].k, 0);
    }

    #[test]
    fn schema_round_trip_fields() {
        let spec = UnitationSpec::new(
            5,
            vec![BlockSpec::linear_with(3, 2.0, 1.0), BlockSpec::gap(2)],
        )
        .unwrap();
        assert_eq!(spec.blocks[1].kind, BlockKind::Gap);
    }

    fn arb_spec() -> impl Strategy<Value = UnitationSpec> {
        let block = (0..3u8, 1usize..5, 0.5f64..3.0).prop_map(|(kind, m, a)| match kind {
            0 => BlockSpec::linear_with(m, a, 0.0),
            1 => BlockSpec::gap(m),
            _ => BlockSpec::plateau(m),
        });
        prop::collection::vec(block, 1..6).prop_map(|blocks| {
            let n = blocks.iter().map(|b| b.m).sum();
            UnitationSpec { n, blocks }
        })
    }

    proptest! {
        #[test]
        fn optimum_is_unique_argmax(spec in arb_spec()) {
            let t = spec.value_table().unwrap();
            prop_assert!(t[1..].iter().all(|&v| v < t[0]));
            prop_assert_eq!(t.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
            prop_assert_eq!(t, spec.value_table().unwrap());
        }

        #[test]
        fn value_depends_only_on_zeros(spec in arb_spec(), seed in any::<u64>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = Bitstring::random(spec.n, &mut rng);
            let y = Bitstring::random_with_zeros(spec.n, x.count_zeros(), &mut rng);
            prop_assert_eq!(evaluate(&spec, &x).unwrap(), evaluate(&spec, &y).unwrap());
        }
    }
}
