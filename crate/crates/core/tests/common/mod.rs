#![allow(dead_code)]

use ea_lab::{BlockKind, BlockSpec, UnitationSpec};
use proptest::prelude::*;

fn block(kind: u8, m: usize) -> BlockSpec {
    match kind {
        0 => BlockSpec::linear(m),
        1 => BlockSpec::gap(m),
        _ => BlockSpec::plateau(m),
    }
}

/// Random unitation specs with `2 <= n <= max_n`.
pub fn unitation_spec(max_n: usize) -> impl Strategy<Value = UnitationSpec> {
    prop::collection::vec((0u8..3, 1usize..=4), 1..=5).prop_filter_map(
        "need 2 <= n <= max_n",
        move |parts| {
            let mut blocks = Vec::new();
            let mut n = 0;
            for (kind, m) in parts {
                if n + m > max_n {
                    break;
                }
                n += m;
                blocks.push(block(kind, m));
            }
            (n >= 2).then(|| UnitationSpec::new(n, blocks).unwrap())
        },
    )
}

pub fn has_kind(spec: &UnitationSpec, kind: BlockKind) -> bool {
    spec.blocks.iter().any(|b| b.kind == kind)
}
