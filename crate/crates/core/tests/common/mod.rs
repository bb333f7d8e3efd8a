#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use arrac_core::algebra::Step;
use arrac_core::{Array, Index, Value};
use proptest::prelude::*;

pub fn leaf() -> impl Strategy<Value = Value> {
    prop_oneof![
        (-4i64..4).prop_map(Value::Int),
        prop::sample::select(vec![0.0, -0.0, 0.5, -2.25, 1e300, f64::INFINITY, 3.0])
            .prop_map(|x| Value::float(x).unwrap()),
        prop::sample::select(vec!["", "a", "b", "x y", "q\"t", "é\n"]).prop_map(Value::str),
        Just(Value::Undef),
    ]
}

/// Values of every tag, nested up to two levels.
pub fn value() -> impl Strategy<Value = Value> {
    leaf().prop_recursive(2, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(|v| Value::tuple(v).unwrap()),
            (1usize..3, prop::collection::vec(inner, 0..4)).prop_map(|(arity, vs)| {
                let pairs = vs
                    .into_iter()
                    .enumerate()
                    .map(|(k, v)| (Index::new(vec![k as i64; arity]), v));
                Value::Array(Arc::new(Array::new(arity, pairs).unwrap()))
            }),
        ]
    })
}

pub fn index(arity: usize, span: i64) -> impl Strategy<Value = Index> {
    prop::collection::vec(-span..span, arity).prop_map(Index::new)
}

pub fn array_with(
    arity: usize,
    max: usize,
    span: i64,
    values: impl Strategy<Value = Value> + 'static,
) -> impl Strategy<Value = Array> {
    prop::collection::btree_map(index(arity, span), values, 0..=max)
        .prop_map(move |m| Array::new(arity, m).unwrap())
}

pub fn array_of_arity(arity: usize, max: usize) -> impl Strategy<Value = Array> {
    array_with(arity, max, 4, value())
}

pub fn array(max: usize) -> impl Strategy<Value = Array> {
    (1usize..=4).prop_flat_map(move |n| array_of_arity(n, max))
}

/// Two arrays of the same arity.
pub fn same_arity_pair(max: usize) -> impl Strategy<Value = (Array, Array)> {
    (1usize..=3).prop_flat_map(move |n| (array_of_arity(n, max), array_of_arity(n, max)))
}

/// Tuple-valued arrays of a fixed tuple width.
pub fn tuple_array(arity: usize, width: usize, max: usize) -> impl Strategy<Value = Array> {
    array_with(
        arity,
        max,
        4,
        prop::collection::vec(leaf(), width).prop_map(|v| Value::tuple(v).unwrap()),
    )
}

/// Rewrites `b` so it agrees with `a` wherever both are defined.
pub fn make_consistent(a: &Array, b: &Array) -> Array {
    let pairs = b.iter().map(|(i, v)| {
        let v = a.lookup(i).unwrap().cloned().unwrap_or_else(|| v.clone());
        (i.clone(), v)
    });
    Array::new(b.arity(), pairs).unwrap()
}

pub fn to_map(a: &Array) -> BTreeMap<Index, Value> {
    a.iter().map(|(i, v)| (i.clone(), v.clone())).collect()
}

/// A random step valid for arrays of arity `arity`, built from raw draws.
pub fn step_for(arity: usize, draw: &[u64]) -> Step {
    let pick = |k: usize, n: usize| (draw[k] % n as u64) as usize;
    match pick(0, 7) {
        0 => {
            let mut perm: Vec<usize> = (0..arity).collect();
            for k in (1..arity).rev() {
                perm.swap(k, pick(1 + k % 4, k + 1));
            }
            Step::Permute(perm)
        }
        1 => Step::Translate {
            dim: pick(1, arity),
            offset: pick(2, 11) as i64 - 5,
        },
        2 => Step::InsertDim {
            position: pick(1, arity + 1),
            value: pick(2, 7) as i64 - 3,
        },
        3 if arity > 1 => Step::RemoveDim(pick(1, arity)),
        4 => Step::Compact(pick(1, arity)),
        5 => {
            // Shuffles a core window and fixes everything else, so the table
            // covers any coordinate the generators can reach.
            let dim = pick(1, arity);
            let mut core: Vec<i64> = (-30..30).collect();
            for k in (1..core.len()).rev() {
                core.swap(k, (draw[2 + k % 3].rotate_left(k as u32) % (k as u64 + 1)) as usize);
            }
            let mut table: BTreeMap<i64, i64> = (-200..200).map(|c| (c, c)).collect();
            table.extend((-30..30).zip(core));
            Step::Remap { dim, table }
        }
        _ => Step::Translate {
            dim: pick(1, arity),
            offset: 1,
        },
    }
}
