//! Index transformations: bijective maps on the support of an array.
//!
//! A [`TransformSpec`] is a sequence of primitive steps. Permute, Translate,
//! Compact and Remap keep the arity; InsertDim and Restore add a dimension;
//! RemoveDim drops one. Every step is checked for injectivity on the
//! concrete support it is applied to, so a successful transform never
//! changes the number of associations.
//!
//! RemoveDim and Compact cannot be undone from the spec alone. Applying a
//! spec with [`transform_traced`] records the data needed to undo them
//! (as `Restore` and `Remap` steps), which [`invert`] then replays.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use crate::array::{Array, Index};
use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    /// Output dimension `k` takes input dimension `perm[k]`.
    Permute(Vec<usize>),
    Translate { dim: usize, offset: i64 },
    /// Inserts a constant coordinate before `position`.
    InsertDim { position: usize, value: i64 },
    RemoveDim(usize),
    /// Maps the sorted distinct coordinates of `dim` onto `0..k`.
    Compact(usize),
    /// Rewrites coordinates of `dim` through an explicit table.
    Remap { dim: usize, table: BTreeMap<i64, i64> },
    /// Inserts a per-index coordinate before `position`, looked up by the
    /// full incoming index.
    Restore {
        position: usize,
        table: BTreeMap<Index, i64>,
    },
}

impl Step {
    /// Arity after this step, validating the step's parameters against the
    /// incoming arity.
    pub fn output_arity(&self, arity: usize) -> Result<usize> {
        let bad = |msg: String| Err(Error::BadStep(msg));
        match self {
            Step::Permute(perm) => {
                if perm.len() != arity {
                    return bad(format!(
                        "permutation of length {} applied to arity {arity}",
                        perm.len()
                    ));
                }
                let distinct: BTreeSet<_> = perm.iter().copied().collect();
                if distinct.len() != arity || perm.iter().any(|&p| p >= arity) {
                    return bad(format!("{perm:?} is not a permutation of 0..{arity}"));
                }
                Ok(arity)
            }
            Step::Translate { dim, .. } | Step::Compact(dim) | Step::Remap { dim, .. } => {
                if *dim >= arity {
                    return bad(format!("dimension {dim} out of range for arity {arity}"));
                }
                Ok(arity)
            }
            Step::InsertDim { position, .. } | Step::Restore { position, .. } => {
                if *position > arity {
                    return bad(format!(
                        "insert position {position} out of range for arity {arity}"
                    ));
                }
                Ok(arity + 1)
            }
            Step::RemoveDim(position) => {
                if *position >= arity {
                    return bad(format!(
                        "dimension {position} out of range for arity {arity}"
                    ));
                }
                if arity == 1 {
                    return bad("cannot remove the only dimension".into());
                }
                Ok(arity - 1)
            }
        }
    }

    /// The inverse step when it can be derived without looking at data.
    pub fn static_inverse(&self) -> Result<Step> {
        match self {
            Step::Permute(perm) => {
                let mut inv = vec![0; perm.len()];
                for (k, &p) in perm.iter().enumerate() {
                    inv[p] = k;
                }
                Ok(Step::Permute(inv))
            }
            Step::Translate { dim, offset } => {
                let offset = offset.checked_neg().ok_or_else(|| {
                    Error::NotInvertible(format!("offset {offset} has no negation"))
                })?;
                Ok(Step::Translate { dim: *dim, offset })
            }
            Step::InsertDim { position, .. } | Step::Restore { position, .. } => {
                Ok(Step::RemoveDim(*position))
            }
            Step::Remap { dim, table } => {
                let mut inv = BTreeMap::new();
                for (&from, &to) in table {
                    if inv.insert(to, from).is_some() {
                        return Err(Error::NotInvertible(format!(
                            "remap table sends two coordinates to {to}"
                        )));
                    }
                }
                Ok(Step::Remap {
                    dim: *dim,
                    table: inv,
                })
            }
            Step::RemoveDim(p) => Err(Error::NotInvertible(format!(
                "removing dimension {p} needs the recorded coordinates"
            ))),
            Step::Compact(d) => Err(Error::NotInvertible(format!(
                "compacting dimension {d} needs the recorded coordinate table"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TransformSpec {
    pub steps: Vec<Step>,
}

impl TransformSpec {
    pub fn new(steps: Vec<Step>) -> Self {
        TransformSpec { steps }
    }

    pub fn identity() -> Self {
        TransformSpec::default()
    }

    pub fn output_arity(&self, arity: usize) -> Result<usize> {
        self.steps
            .iter()
            .try_fold(arity, |n, step| step.output_arity(n))
    }
}

impl From<Vec<Step>> for TransformSpec {
    fn from(steps: Vec<Step>) -> Self {
        TransformSpec { steps }
    }
}

/// Per-step inverse data captured while applying a spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformTrace {
    inverses: Vec<Step>,
}

impl TransformTrace {
    /// The exact inverse of each applied step, in application order.
    pub fn step_inverses(&self) -> &[Step] {
        &self.inverses
    }
}

pub fn transform(a: &Array, spec: &TransformSpec) -> Result<Array> {
    transform_traced(a, spec).map(|(out, _)| out)
}

/// Applies `spec` and records what is needed to undo it.
pub fn transform_traced(a: &Array, spec: &TransformSpec) -> Result<(Array, TransformTrace)> {
    let mut current = a.clone();
    let mut inverses = Vec::with_capacity(spec.steps.len());
    for step in &spec.steps {
        let (next, inverse) = apply_step(&current, step)?;
        inverses.push(inverse);
        current = next;
    }
    Ok((current, TransformTrace { inverses }))
}

/// Builds the spec that undoes `spec`. Without a trace only steps with a
/// data-independent inverse are accepted.
pub fn invert(spec: &TransformSpec, trace: Option<&TransformTrace>) -> Result<TransformSpec> {
    let steps = match trace {
        Some(trace) => {
            if trace.inverses.len() != spec.steps.len() {
                return Err(Error::NotInvertible(format!(
                    "trace has {} steps, spec has {}",
                    trace.inverses.len(),
                    spec.steps.len()
                )));
            }
            trace.inverses.iter().rev().cloned().collect()
        }
        None => spec
            .steps
            .iter()
            .rev()
            .map(Step::static_inverse)
            .collect::<Result<_>>()?,
    };
    Ok(TransformSpec { steps })
}

fn apply_step(a: &Array, step: &Step) -> Result<(Array, Step)> {
    let arity = step.output_arity(a.arity())?;
    let (map, inverse): (Box<dyn Fn(&Index) -> Result<Index>>, Step) = match step {
        Step::Permute(perm) => {
            let perm = perm.clone();
            (
                Box::new(move |i: &Index| Ok(Index::new(perm.iter().map(|&p| i.coord(p)).collect()))),
                step.static_inverse()?,
            )
        }
        Step::Translate { dim, offset } => {
            let (dim, offset) = (*dim, *offset);
            (
                Box::new(move |i: &Index| {
                    let mut c = i.coords().to_vec();
                    c[dim] = c[dim].checked_add(offset).ok_or_else(|| {
                        Error::BadStep(format!("translating {i} by {offset} overflows"))
                    })?;
                    Ok(Index::new(c))
                }),
                step.static_inverse()?,
            )
        }
        Step::InsertDim { position, value } => {
            let (position, value) = (*position, *value);
            (
                Box::new(move |i: &Index| {
                    let mut c = i.coords().to_vec();
                    c.insert(position, value);
                    Ok(Index::new(c))
                }),
                Step::RemoveDim(position),
            )
        }
        Step::RemoveDim(position) => {
            let position = *position;
            let mut table = BTreeMap::new();
            for i in a.indices() {
                let mut c = i.coords().to_vec();
                let removed = c.remove(position);
                table.insert(Index::new(c), removed);
            }
            (
                Box::new(move |i: &Index| {
                    let mut c = i.coords().to_vec();
                    c.remove(position);
                    Ok(Index::new(c))
                }),
                Step::Restore { position, table },
            )
        }
        Step::Compact(dim) => {
            let dim = *dim;
            let distinct: BTreeSet<i64> = a.indices().map(|i| i.coord(dim)).collect();
            let forward: BTreeMap<i64, i64> =
                distinct.iter().zip(0..).map(|(&c, k)| (c, k)).collect();
            let backward = forward.iter().map(|(&c, &k)| (k, c)).collect();
            (
                Box::new(move |i: &Index| {
                    let mut c = i.coords().to_vec();
                    c[dim] = forward[&c[dim]];
                    Ok(Index::new(c))
                }),
                Step::Remap {
                    dim,
                    table: backward,
                },
            )
        }
        Step::Remap { dim, table } => {
            let dim = *dim;
            let used: BTreeSet<i64> = a.indices().map(|i| i.coord(dim)).collect();
            let mut backward = BTreeMap::new();
            for c in &used {
                let to = *table
                    .get(c)
                    .ok_or_else(|| Error::BadStep(format!("remap has no entry for coordinate {c}")))?;
                backward.insert(to, *c);
            }
            let table = table.clone();
            (
                Box::new(move |i: &Index| {
                    let mut c = i.coords().to_vec();
                    c[dim] = table[&c[dim]];
                    Ok(Index::new(c))
                }),
                Step::Remap {
                    dim,
                    table: backward,
                },
            )
        }
        Step::Restore { position, table } => {
            let position = *position;
            let table = table.clone();
            (
                Box::new(move |i: &Index| {
                    let value = *table
                        .get(i)
                        .ok_or_else(|| Error::BadStep(format!("restore table has no entry for {i}")))?;
                    let mut c = i.coords().to_vec();
                    c.insert(position, value);
                    Ok(Index::new(c))
                }),
                Step::RemoveDim(position),
            )
        }
    };

    let mut images: BTreeMap<Index, (Index, Value)> = BTreeMap::new();
    for (i, v) in a {
        let image = map(i)?;
        match images.entry(image) {
            Entry::Vacant(slot) => {
                slot.insert((i.clone(), v.clone()));
            }
            Entry::Occupied(slot) => {
                return Err(Error::NotInjective {
                    first: slot.get().0.clone(),
                    second: i.clone(),
                    image: slot.key().clone(),
                })
            }
        }
    }
    let assoc = images.into_iter().map(|(k, (_, v))| (k, v)).collect();
    Ok((Array::from_map(arity, assoc), inverse))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Array {
        Array::new(
            2,
            [
                (Index::from([0, 0]), Value::str("a")),
                (Index::from([0, 1]), Value::str("b")),
                (Index::from([1, 0]), Value::str("c")),
                (Index::from([1, 1]), Value::str("d")),
            ],
        )
        .unwrap()
    }

    fn arr(arity: usize, pairs: Vec<(Vec<i64>, &str)>) -> Array {
        Array::new(
            arity,
            pairs
                .into_iter()
                .map(|(i, v)| (Index::new(i), Value::str(v))),
        )
        .unwrap()
    }

    #[test]
    fn transpose() {
        let t = TransformSpec::new(vec![Step::Permute(vec![1, 0])]);
        let expected = arr(
            2,
            vec![
                (vec![0, 0], "a"),
                (vec![1, 0], "b"),
                (vec![0, 1], "c"),
                (vec![1, 1], "d"),
            ],
        );
        assert_eq!(transform(&m(), &t).unwrap(), expected);
    }

    #[test]
    fn identity_spec() {
        assert_eq!(transform(&m(), &TransformSpec::identity()).unwrap(), m());
    }

    #[test]
    fn remove_constant_dimension() {
        let a = arr(2, vec![(vec![3, 0], "p"), (vec![9, 0], "q")]);
        let t = TransformSpec::new(vec![Step::RemoveDim(1)]);
        let expected = arr(1, vec![(vec![3], "p"), (vec![9], "q")]);
        assert_eq!(transform(&a, &t).unwrap(), expected);
    }

    #[test]
    fn collapsing_removal_is_rejected() {
        let t = TransformSpec::new(vec![Step::RemoveDim(1)]);
        let err = transform(&m(), &t).unwrap_err();
        assert_eq!(
            err,
            Error::NotInjective {
                first: Index::from([0, 0]),
                second: Index::from([0, 1]),
                image: Index::from([0]),
            }
        );
    }

    #[test]
    fn translate_inverse_without_trace() {
        let t = TransformSpec::new(vec![Step::Translate { dim: 0, offset: 5 }]);
        let moved = transform(&m(), &t).unwrap();
        assert!(moved.contains(&Index::from([6, 1])));
        let back = invert(&t, None).unwrap();
        assert_eq!(transform(&moved, &back).unwrap(), m());
    }

    #[test]
    fn swap_is_self_inverse() {
        let t = TransformSpec::new(vec![Step::Permute(vec![1, 0])]);
        assert_eq!(invert(&t, None).unwrap(), t);
    }

    #[test]
    fn compact_and_recorded_inverse() {
        let a = arr(1, vec![(vec![3], "x"), (vec![9], "y")]);
        let t = TransformSpec::new(vec![Step::Compact(0)]);
        let (compacted, trace) = transform_traced(&a, &t).unwrap();
        assert_eq!(compacted, arr(1, vec![(vec![0], "x"), (vec![1], "y")]));
        assert_eq!(
            trace.step_inverses(),
            &[Step::Remap {
                dim: 0,
                table: BTreeMap::from([(0, 3), (1, 9)])
            }]
        );
        let back = invert(&t, Some(&trace)).unwrap();
        assert_eq!(transform(&compacted, &back).unwrap(), a);
        assert!(matches!(invert(&t, None), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn remove_dim_round_trip_with_varying_coordinate() {
        let a = arr(2, vec![(vec![0, 4], "x"), (vec![1, 7], "y")]);
        let t = TransformSpec::new(vec![Step::RemoveDim(1)]);
        let (reduced, trace) = transform_traced(&a, &t).unwrap();
        let back = invert(&t, Some(&trace)).unwrap();
        assert_eq!(transform(&reduced, &back).unwrap(), a);
    }

    #[test]
    fn insert_then_remove() {
        let t = TransformSpec::new(vec![Step::InsertDim {
            position: 1,
            value: 7,
        }]);
        let up = transform(&m(), &t).unwrap();
        assert_eq!(up.arity(), 3);
        assert!(up.contains(&Index::from([1, 7, 0])));
        assert_eq!(
            transform(&up, &invert(&t, None).unwrap()).unwrap(),
            m()
        );
    }

    #[test]
    fn bad_steps() {
        let cases = [
            Step::Permute(vec![0, 0]),
            Step::Permute(vec![0]),
            Step::Translate { dim: 2, offset: 1 },
            Step::InsertDim {
                position: 3,
                value: 0,
            },
            Step::Compact(5),
        ];
        for step in cases {
            let t = TransformSpec::new(vec![step]);
            assert!(matches!(transform(&m(), &t), Err(Error::BadStep(_))));
        }
        let one = arr(1, vec![(vec![0], "x")]);
        let t = TransformSpec::new(vec![Step::RemoveDim(0)]);
        assert!(matches!(transform(&one, &t), Err(Error::BadStep(_))));
    }

    #[test]
    fn translate_overflow() {
        let a = arr(1, vec![(vec![i64::MAX], "x")]);
        let t = TransformSpec::new(vec![Step::Translate { dim: 0, offset: 1 }]);
        assert!(matches!(transform(&a, &t), Err(Error::BadStep(_))));
    }

    #[test]
    fn non_injective_remap() {
        let t = TransformSpec::new(vec![Step::Remap {
            dim: 0,
            table: BTreeMap::from([(0, 0), (1, 0)]),
        }]);
        assert!(matches!(
            transform(&m(), &t),
            Err(Error::NotInjective { .. })
        ));
        assert!(matches!(invert(&t, None), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn output_arity_tracks_steps() {
        let t = TransformSpec::new(vec![
            Step::InsertDim {
                position: 0,
                value: 1,
            },
            Step::InsertDim {
                position: 3,
                value: 1,
            },
            Step::RemoveDim(3),
        ]);
        assert_eq!(t.output_arity(2).unwrap(), 3);
        assert_eq!(transform(&m(), &t).unwrap().arity(), 3);
    }
}
