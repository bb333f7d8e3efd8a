//! Partitioning arrays into fragments and putting them back together.
//!
//! Naming follows the array-algebra convention, which is the reverse of
//! the relational one:
//!
//! * **vertical** partitioning splits the *support*: each fragment is
//!   `select(A, p_k)` for pairwise disjoint, jointly exhaustive predicates,
//!   and the fragments are recombined with `union`. (A relational engine
//!   would call this a horizontal, row-wise split.)
//! * **horizontal** partitioning splits the *value*: every fragment keeps
//!   the full support and a slice of each tuple value. Fragments are
//!   recombined with equi-joins on all index dimensions. (Relationally, a
//!   vertical or column-wise split.)
//!
//! A [`Placement`] carries everything needed to reassemble; the source
//! array is never consulted again.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{equi_join, select, semi_join, transform, union, Predicate, Step, TransformSpec};
use crate::array::{Array, Index};
use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionScheme {
    Vertical {
        predicates: Vec<Predicate>,
    },
    Horizontal {
        slices: Vec<BTreeSet<usize>>,
        /// Number of components in every value tuple of the source.
        width: usize,
    },
}

impl PartitionScheme {
    pub fn fragment_count(&self) -> usize {
        match self {
            PartitionScheme::Vertical { predicates } => predicates.len(),
            PartitionScheme::Horizontal { slices, .. } => slices.len(),
        }
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self, PartitionScheme::Vertical { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub id: usize,
    pub shard: usize,
    pub array: Array,
}

/// Fragments of one array, their simulated shard labels, and the scheme
/// that defines them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    scheme: PartitionScheme,
    origin_arity: usize,
    fragments: Vec<Fragment>,
}

impl Placement {
    /// Reassembles a placement from stored parts, e.g. a manifest and its
    /// fragment files. Fragments are ordered by id.
    pub fn from_parts(
        scheme: PartitionScheme,
        origin_arity: usize,
        mut fragments: Vec<Fragment>,
    ) -> Result<Placement> {
        fragments.sort_by_key(|f| f.id);
        if fragments.len() != scheme.fragment_count() {
            return Err(Error::BadPlacement(format!(
                "scheme defines {} fragments, found {}",
                scheme.fragment_count(),
                fragments.len()
            )));
        }
        for (k, f) in fragments.iter().enumerate() {
            if f.id != k {
                return Err(Error::BadPlacement(format!(
                    "fragment ids must be 0..{}, found {}",
                    fragments.len(),
                    f.id
                )));
            }
            if f.array.arity() != origin_arity {
                return Err(Error::ArityMismatch {
                    expected: origin_arity,
                    found: f.array.arity(),
                });
            }
        }
        if let PartitionScheme::Horizontal { slices, width } = &scheme {
            check_slices(slices, *width)?;
        }
        Ok(Placement {
            scheme,
            origin_arity,
            fragments,
        })
    }

    fn new(scheme: PartitionScheme, origin_arity: usize, arrays: Vec<Array>) -> Placement {
        let fragments = arrays
            .into_iter()
            .enumerate()
            .map(|(id, array)| Fragment {
                id,
                shard: id,
                array,
            })
            .collect();
        Placement {
            scheme,
            origin_arity,
            fragments,
        }
    }

    pub fn scheme(&self) -> &PartitionScheme {
        &self.scheme
    }

    pub fn origin_arity(&self) -> usize {
        self.origin_arity
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn fragment(&self, id: usize) -> Option<&Fragment> {
        self.fragments.get(id)
    }

    /// Round-robin placement over `shards` shards.
    pub fn assign_shards(mut self, shards: usize) -> Placement {
        let shards = shards.max(1);
        for f in &mut self.fragments {
            f.shard = f.id % shards;
        }
        self
    }
}

pub fn partition_vertical(a: &Array, predicates: &[Predicate]) -> Result<Placement> {
    if predicates.is_empty() {
        return Err(Error::BadPlacement("at least one fragment is required".into()));
    }
    for p in predicates {
        p.check_arity(a.arity())?;
    }
    for (i, v) in a {
        let mut owners = predicates
            .iter()
            .enumerate()
            .filter(|(_, p)| p.eval(i, v))
            .map(|(k, _)| k);
        match (owners.next(), owners.next()) {
            (None, _) => return Err(Error::NotExhaustive { index: i.clone() }),
            (Some(first), Some(second)) => {
                return Err(Error::NotDisjoint {
                    index: i.clone(),
                    first,
                    second,
                })
            }
            (Some(_), None) => {}
        }
    }
    let arrays = predicates
        .iter()
        .map(|p| select(a, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Placement::new(
        PartitionScheme::Vertical {
            predicates: predicates.to_vec(),
        },
        a.arity(),
        arrays,
    ))
}

pub(crate) fn check_slices(slices: &[BTreeSet<usize>], width: usize) -> Result<()> {
    if slices.is_empty() {
        return Err(Error::BadSlices("at least one slice is required".into()));
    }
    let mut seen = BTreeSet::new();
    for s in slices {
        if s.is_empty() {
            return Err(Error::BadSlices("empty slice".into()));
        }
        for &pos in s {
            if !seen.insert(pos) {
                return Err(Error::BadSlices(format!("position {pos} appears twice")));
            }
        }
    }
    let expected: BTreeSet<usize> = (0..width).collect();
    if seen != expected {
        return Err(Error::BadSlices(format!(
            "slices cover {seen:?}, values have positions 0..{width}"
        )));
    }
    Ok(())
}

/// Width of the uniform tuple values of `a`, if there is one.
fn tuple_width(a: &Array) -> Result<Option<usize>> {
    let mut width = None;
    for (i, v) in a {
        match v {
            Value::Tuple(items) if width.is_none() || width == Some(items.len()) => {
                width = Some(items.len());
            }
            _ => return Err(Error::NotTupleValued { index: i.clone() }),
        }
    }
    Ok(width)
}

fn slice_value(items: &[Value], slice: &BTreeSet<usize>) -> Value {
    if slice.len() == 1 {
        let pos = *slice.iter().next().unwrap();
        items[pos].clone()
    } else {
        Value::Tuple(slice.iter().map(|&p| items[p].clone()).collect())
    }
}

/// Splits every tuple value across the slices; each fragment repeats the
/// full support. Single-position slices store the bare component.
pub fn partition_horizontal(a: &Array, slices: &[BTreeSet<usize>]) -> Result<Placement> {
    let width = match tuple_width(a)? {
        Some(w) => w,
        None => slices
            .iter()
            .flat_map(|s| s.iter().copied())
            .max()
            .map_or(0, |m| m + 1),
    };
    check_slices(slices, width)?;
    let arrays = slices
        .iter()
        .map(|slice| {
            let assoc: BTreeMap<Index, Value> = a
                .iter()
                .map(|(i, v)| match v {
                    Value::Tuple(items) => (i.clone(), slice_value(items, slice)),
                    _ => unreachable!("checked by tuple_width"),
                })
                .collect();
            Array::from_map(a.arity(), assoc)
        })
        .collect();
    Ok(Placement::new(
        PartitionScheme::Horizontal {
            slices: slices.to_vec(),
            width,
        },
        a.arity(),
        arrays,
    ))
}

pub fn reassemble(p: &Placement) -> Result<Array> {
    match &p.scheme {
        PartitionScheme::Vertical { .. } => {
            let mut acc = Array::empty(p.origin_arity)?;
            for f in &p.fragments {
                acc = union(&acc, &f.array)?;
            }
            Ok(acc)
        }
        PartitionScheme::Horizontal { slices, width } => reassemble_horizontal(p, slices, *width),
    }
}

fn reassemble_horizontal(p: &Placement, slices: &[BTreeSet<usize>], width: usize) -> Result<Array> {
    let n = p.origin_arity;
    let on: Vec<(usize, usize)> = (0..n).map(|d| (d, d)).collect();
    // Equi-joining on every dimension duplicates the index; dropping the
    // right-hand copy is injective because the copies are equal.
    let drop_copy = TransformSpec::new(vec![Step::RemoveDim(n); n]);

    let mut joined = p.fragments[0].array.clone();
    for f in &p.fragments[1..] {
        joined = transform(&equi_join(&joined, &f.array, &on)?, &drop_copy)?;
    }
    for f in &p.fragments {
        if f.array.len() != joined.len() {
            let witness = f
                .array
                .indices()
                .find(|i| !joined.contains(i))
                .or_else(|| joined.indices().find(|i| !f.array.contains(i)))
                .cloned()
                .expect("sizes differ, so some index is unmatched");
            return Err(Error::SupportMismatch { index: witness });
        }
    }

    let mut assoc = BTreeMap::new();
    for (i, v) in &joined {
        let parts = unnest_pairs(v.clone(), slices.len());
        let mut items = vec![Value::Undef; width];
        for (part, slice) in parts.into_iter().zip(slices) {
            scatter(part, slice, &mut items)
                .map_err(|msg| Error::BadPlacement(format!("fragment value at {i}: {msg}")))?;
        }
        assoc.insert(i.clone(), Value::Tuple(items));
    }
    Ok(Array::from_map(n, assoc))
}

/// Undoes `k - 1` left-nested pairings produced by repeated joins.
fn unnest_pairs(mut v: Value, k: usize) -> Vec<Value> {
    let mut parts = Vec::with_capacity(k);
    for _ in 1..k {
        match v {
            Value::Tuple(mut pair) if pair.len() == 2 => {
                parts.push(pair.pop().unwrap());
                v = pair.pop().unwrap();
            }
            _ => unreachable!("equi-join values are pairs"),
        }
    }
    parts.push(v);
    parts.reverse();
    parts
}

fn scatter(part: Value, slice: &BTreeSet<usize>, items: &mut [Value]) -> std::result::Result<(), String> {
    if slice.len() == 1 {
        items[*slice.iter().next().unwrap()] = part;
        return Ok(());
    }
    match part {
        Value::Tuple(values) if values.len() == slice.len() => {
            for (&pos, value) in slice.iter().zip(values) {
                items[pos] = value;
            }
            Ok(())
        }
        other => Err(format!(
            "expected a {}-tuple, found {}",
            slice.len(),
            other.tag()
        )),
    }
}

/// Applies a selection fragment by fragment, so that reassembling the
/// result equals selecting on the reassembled array.
///
/// For horizontal placements the predicate may inspect index coordinates
/// and tuple positions of at most one slice. That slice's fragment is
/// filtered and the others are semi-joined against it.
pub fn push_select(p: &Placement, cond: &Predicate) -> Result<Placement> {
    cond.check_arity(p.origin_arity)?;
    if *cond == Predicate::True {
        return Ok(p.clone());
    }
    match &p.scheme {
        PartitionScheme::Vertical { predicates } => {
            let fragments = p
                .fragments
                .iter()
                .map(|f| {
                    Ok(Fragment {
                        array: select(&f.array, cond)?,
                        ..f.clone()
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let predicates = predicates
                .iter()
                .map(|pk| pk.clone().and(cond.clone()))
                .collect();
            Ok(Placement {
                scheme: PartitionScheme::Vertical { predicates },
                origin_arity: p.origin_arity,
                fragments,
            })
        }
        PartitionScheme::Horizontal { slices, width } => {
            let on: Vec<(usize, usize)> = (0..p.origin_arity).map(|d| (d, d)).collect();
            let (owner, local) = localize(cond, slices, *width)?;
            let fragments = match owner {
                None => p
                    .fragments
                    .iter()
                    .map(|f| {
                        Ok(Fragment {
                            array: select(&f.array, cond)?,
                            ..f.clone()
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
                Some(owner) => {
                    let filtered = select(&p.fragments[owner].array, &local)?;
                    p.fragments
                        .iter()
                        .map(|f| {
                            let array = if f.id == owner {
                                filtered.clone()
                            } else {
                                semi_join(&f.array, &filtered, &on)?
                            };
                            Ok(Fragment { array, ..f.clone() })
                        })
                        .collect::<Result<Vec<_>>>()?
                }
            };
            Ok(Placement {
                scheme: p.scheme.clone(),
                origin_arity: p.origin_arity,
                fragments,
            })
        }
    }
}

/// Finds the single slice a predicate reads from and rewrites its value
/// references into that fragment's layout. `None` means index-only.
fn localize(
    cond: &Predicate,
    slices: &[BTreeSet<usize>],
    width: usize,
) -> Result<(Option<usize>, Predicate)> {
    if cond.uses_whole_value() {
        return match slices {
            [only] if only.len() >= 2 => Ok((Some(0), cond.clone())),
            _ => Err(Error::NotPushable(
                "whole-value comparison spans several slices".into(),
            )),
        };
    }
    let positions = cond.field_positions();
    let Some(&first) = positions.iter().next() else {
        return Ok((None, cond.clone()));
    };
    if let Some(&pos) = positions.iter().find(|&&p| p >= width) {
        return Err(Error::NotPushable(format!(
            "value position {pos} is outside tuples of width {width}"
        )));
    }
    let owner = slices
        .iter()
        .position(|s| s.contains(&first))
        .expect("slices cover every position");
    let slice = &slices[owner];
    if !positions.is_subset(slice) {
        return Err(Error::NotPushable(format!(
            "value positions {positions:?} span several slices"
        )));
    }
    let local = cond.map_fields(&|pos, op, constant| {
        if slice.len() == 1 {
            Predicate::value(op, constant.clone())
        } else {
            let rank = slice.iter().position(|&p| p == pos).unwrap();
            Predicate::field(rank, op, constant.clone())
        }
    });
    Ok((Some(owner), local))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CmpOp;

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

    fn pairs() -> Array {
        Array::new(
            1,
            [
                (
                    Index::from([0]),
                    Value::Tuple(vec![Value::str("x"), Value::Int(1)]),
                ),
                (
                    Index::from([1]),
                    Value::Tuple(vec![Value::str("y"), Value::Int(2)]),
                ),
            ],
        )
        .unwrap()
    }

    fn rows() -> Vec<Predicate> {
        vec![Predicate::coord_eq(0, 0), Predicate::coord_eq(0, 1)]
    }

    fn slices(s: &[&[usize]]) -> Vec<BTreeSet<usize>> {
        s.iter().map(|x| x.iter().copied().collect()).collect()
    }

    #[test]
    fn vertical_row_split() {
        let p = partition_vertical(&m(), &rows()).unwrap();
        let f0 = Array::new(
            2,
            [
                (Index::from([0, 0]), Value::str("a")),
                (Index::from([0, 1]), Value::str("b")),
            ],
        )
        .unwrap();
        assert_eq!(p.fragments()[0].array, f0);
        assert_eq!(p.fragments()[1].array.len(), 2);
        assert_eq!(reassemble(&p).unwrap(), m());
    }

    #[test]
    fn vertical_single_fragment() {
        let p = partition_vertical(&m(), &[Predicate::True]).unwrap();
        assert_eq!(p.fragments().len(), 1);
        assert_eq!(p.fragments()[0].array, m());
        assert_eq!(reassemble(&p).unwrap(), m());
    }

    #[test]
    fn vertical_overlap_and_gap() {
        let err = partition_vertical(&m(), &[Predicate::coord_eq(0, 0), Predicate::coord_eq(0, 0)])
            .unwrap_err();
        assert_eq!(
            err,
            Error::NotDisjoint {
                index: Index::from([0, 0]),
                first: 0,
                second: 1
            }
        );
        let err = partition_vertical(&m(), &[Predicate::coord_eq(0, 0)]).unwrap_err();
        assert_eq!(
            err,
            Error::NotExhaustive {
                index: Index::from([1, 0])
            }
        );
    }

    #[test]
    fn horizontal_split_and_back() {
        let p = partition_horizontal(&pairs(), &slices(&[&[0], &[1]])).unwrap();
        let f0 = Array::new(
            1,
            [
                (Index::from([0]), Value::str("x")),
                (Index::from([1]), Value::str("y")),
            ],
        )
        .unwrap();
        let f1 = Array::new(
            1,
            [
                (Index::from([0]), Value::Int(1)),
                (Index::from([1]), Value::Int(2)),
            ],
        )
        .unwrap();
        assert_eq!(p.fragments()[0].array, f0);
        assert_eq!(p.fragments()[1].array, f1);
        assert_eq!(reassemble(&p).unwrap(), pairs());
    }

    #[test]
    fn horizontal_single_slice_keeps_values() {
        let p = partition_horizontal(&pairs(), &slices(&[&[0, 1]])).unwrap();
        assert_eq!(p.fragments()[0].array, pairs());
        assert_eq!(reassemble(&p).unwrap(), pairs());
    }

    #[test]
    fn horizontal_errors() {
        assert_eq!(
            partition_horizontal(&m(), &slices(&[&[0]])).unwrap_err(),
            Error::NotTupleValued {
                index: Index::from([0, 0])
            }
        );
        for bad in [slices(&[&[0]]), slices(&[&[0, 1], &[1]]), slices(&[&[0], &[]])] {
            assert!(matches!(
                partition_horizontal(&pairs(), &bad),
                Err(Error::BadSlices(_))
            ));
        }
    }

    #[test]
    fn horizontal_reassembly_detects_support_mismatch() {
        let p = partition_horizontal(&pairs(), &slices(&[&[0], &[1]])).unwrap();
        let mut frags = p.fragments().to_vec();
        frags[1].array = Array::new(1, [(Index::from([0]), Value::Int(1))]).unwrap();
        let tampered = Placement::from_parts(p.scheme().clone(), 1, frags).unwrap();
        assert_eq!(
            reassemble(&tampered).unwrap_err(),
            Error::SupportMismatch {
                index: Index::from([1])
            }
        );
    }

    #[test]
    fn vertical_reassembly_detects_conflicting_overlap() {
        let p = partition_vertical(&m(), &rows()).unwrap();
        let mut frags = p.fragments().to_vec();
        frags[1].array = Array::new(2, [(Index::from([0, 0]), Value::str("zz"))]).unwrap();
        let tampered = Placement::from_parts(p.scheme().clone(), 2, frags).unwrap();
        assert!(matches!(
            reassemble(&tampered),
            Err(Error::ConsistencyViolation { .. })
        ));
    }

    #[test]
    fn push_select_vertical() {
        let p = partition_vertical(&m(), &rows()).unwrap();
        let c = Predicate::value_eq("a");
        let pushed = push_select(&p, &c).unwrap();
        assert_eq!(
            reassemble(&pushed).unwrap(),
            select(&m(), &c).unwrap()
        );
        assert_eq!(push_select(&p, &Predicate::True).unwrap(), p);
    }

    #[test]
    fn push_select_horizontal() {
        let p = partition_horizontal(&pairs(), &slices(&[&[0], &[1]])).unwrap();
        for c in [
            Predicate::coord_eq(0, 1),
            Predicate::field(1, CmpOp::Lt, 2),
            Predicate::field(0, CmpOp::Eq, "y").not(),
        ] {
            let pushed = push_select(&p, &c).unwrap();
            assert_eq!(
                reassemble(&pushed).unwrap(),
                select(&pairs(), &c).unwrap(),
                "{c:?}"
            );
        }
        let spanning = Predicate::field(0, CmpOp::Eq, "x").and(Predicate::field(1, CmpOp::Eq, 1));
        assert!(matches!(
            push_select(&p, &spanning),
            Err(Error::NotPushable(_))
        ));
        assert!(matches!(
            push_select(&p, &Predicate::value_eq(1)),
            Err(Error::NotPushable(_))
        ));
    }

    #[test]
    fn shards_round_robin() {
        let p = partition_vertical(&m(), &rows()).unwrap().assign_shards(1);
        assert!(p.fragments().iter().all(|f| f.shard == 0));
    }
}
