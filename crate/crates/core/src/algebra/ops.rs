use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use super::predicate::Predicate;
use crate::array::{Array, Index};
use crate::error::{Error, Result};
use crate::value::Value;

/// Restricts `a` to the indices in `set`. Members of `set` outside the
/// support are ignored; the arity never changes.
pub fn project(a: &Array, set: &BTreeSet<Index>) -> Result<Array> {
    for index in set {
        a.check_arity(index)?;
    }
    let assoc = if set.len() < a.len() {
        set.iter()
            .filter_map(|i| a.lookup(i).ok().flatten().map(|v| (i.clone(), v.clone())))
            .collect()
    } else {
        a.iter()
            .filter(|(i, _)| set.contains(*i))
            .map(|(i, v)| (i.clone(), v.clone()))
            .collect()
    };
    Ok(Array::from_map(a.arity(), assoc))
}

/// Projection onto an index set given intensionally by a coordinate-only
/// predicate.
pub fn project_where(a: &Array, set: &Predicate) -> Result<Array> {
    if !set.is_index_only() {
        return Err(Error::BadProjection(
            "index set predicates may only reference coordinates".into(),
        ));
    }
    select(a, set)
}

pub fn select(a: &Array, cond: &Predicate) -> Result<Array> {
    cond.check_arity(a.arity())?;
    let assoc = a
        .iter()
        .filter(|(i, v)| cond.eval(i, v))
        .map(|(i, v)| (i.clone(), v.clone()))
        .collect();
    Ok(Array::from_map(a.arity(), assoc))
}

/// `a × b`: every pair of associations, indices concatenated and values
/// paired as a two-element tuple.
pub fn cross(a: &Array, b: &Array) -> Array {
    let mut assoc = BTreeMap::new();
    for (i, d) in a {
        for (j, e) in b {
            assoc.insert(i.concat(j), Value::pair(d.clone(), e.clone()));
        }
    }
    Array::from_map(a.arity() + b.arity(), assoc)
}

/// Set union of associations. Fails on the first index (in `b`'s order)
/// where the two arrays disagree.
pub fn union(a: &Array, b: &Array) -> Result<Array> {
    if a.arity() != b.arity() {
        return Err(Error::ArityMismatch {
            expected: a.arity(),
            found: b.arity(),
        });
    }
    let mut assoc: BTreeMap<Index, Value> =
        a.iter().map(|(i, v)| (i.clone(), v.clone())).collect();
    for (i, v) in b {
        match assoc.entry(i.clone()) {
            Entry::Vacant(slot) => {
                slot.insert(v.clone());
            }
            Entry::Occupied(slot) if slot.get() == v => {}
            Entry::Occupied(slot) => {
                return Err(Error::ConsistencyViolation {
                    index: i.clone(),
                    existing: slot.get().clone(),
                    incoming: v.clone(),
                })
            }
        }
    }
    Ok(Array::from_map(a.arity(), assoc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::predicate::CmpOp;

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

    fn vec1(pairs: &[(i64, &str)]) -> Array {
        Array::new(
            1,
            pairs
                .iter()
                .map(|(i, s)| (Index::from([*i]), Value::str(*s))),
        )
        .unwrap()
    }

    #[test]
    fn project_first_column() {
        let set = BTreeSet::from([Index::from([0, 0]), Index::from([1, 0])]);
        let expected = Array::new(
            2,
            [
                (Index::from([0, 0]), Value::str("a")),
                (Index::from([1, 0]), Value::str("c")),
            ],
        )
        .unwrap();
        assert_eq!(project(&m(), &set).unwrap(), expected);
    }

    #[test]
    fn project_identity_and_empty() {
        assert_eq!(project(&m(), &m().support()).unwrap(), m());
        assert_eq!(
            project(&m(), &BTreeSet::new()).unwrap(),
            Array::empty(2).unwrap()
        );
    }

    #[test]
    fn project_ignores_indices_outside_support() {
        let set = BTreeSet::from([Index::from([0, 0]), Index::from([9, 9])]);
        assert_eq!(project(&m(), &set).unwrap().len(), 1);
    }

    #[test]
    fn project_rejects_wrong_arity() {
        let set = BTreeSet::from([Index::from([0])]);
        assert!(matches!(
            project(&m(), &set),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn project_where_rejects_value_predicates() {
        assert!(matches!(
            project_where(&m(), &Predicate::value_eq("a")),
            Err(Error::BadProjection(_))
        ));
        let col = project_where(&m(), &Predicate::coord_eq(1, 0)).unwrap();
        assert_eq!(col.len(), 2);
    }

    #[test]
    fn select_value_b() {
        let expected = Array::new(2, [(Index::from([0, 1]), Value::str("b"))]).unwrap();
        assert_eq!(select(&m(), &Predicate::value_eq("b")).unwrap(), expected);
        assert_eq!(
            select(&m(), &Predicate::value_eq("zzz")).unwrap(),
            Array::empty(2).unwrap()
        );
    }

    #[test]
    fn select_disjunction() {
        let p = Predicate::value_eq("a").or(Predicate::value_eq("d"));
        let expected = Array::new(
            2,
            [
                (Index::from([0, 0]), Value::str("a")),
                (Index::from([1, 1]), Value::str("d")),
            ],
        )
        .unwrap();
        assert_eq!(select(&m(), &p).unwrap(), expected);
    }

    #[test]
    fn select_checks_dims() {
        let p = Predicate::coords(CmpOp::Eq, 0, 2);
        assert_eq!(
            select(&m(), &p),
            Err(Error::PredicateArity { dim: 2, arity: 2 })
        );
    }

    #[test]
    fn cross_small() {
        let a = vec1(&[(0, "a")]);
        let b = vec1(&[(5, "x"), (6, "y")]);
        let expected = Array::new(
            2,
            [
                (
                    Index::from([0, 5]),
                    Value::pair(Value::str("a"), Value::str("x")),
                ),
                (
                    Index::from([0, 6]),
                    Value::pair(Value::str("a"), Value::str("y")),
                ),
            ],
        )
        .unwrap();
        assert_eq!(cross(&a, &b), expected);
    }

    #[test]
    fn cross_with_empty_is_empty() {
        let c = cross(&m(), &Array::empty(1).unwrap());
        assert_eq!(c, Array::empty(3).unwrap());
    }

    #[test]
    fn cross_self_counts() {
        let c = cross(&m(), &m());
        assert_eq!(c.len(), 16);
        assert_eq!(c.arity(), 4);
    }

    #[test]
    fn union_cases() {
        let u = union(&vec1(&[(0, "a")]), &vec1(&[(1, "b")])).unwrap();
        assert_eq!(u, vec1(&[(0, "a"), (1, "b")]));
        assert_eq!(union(&m(), &m()).unwrap(), m());
        let err = union(&vec1(&[(0, "a")]), &vec1(&[(0, "b")])).unwrap_err();
        assert_eq!(
            err,
            Error::ConsistencyViolation {
                index: Index::from([0]),
                existing: Value::str("a"),
                incoming: Value::str("b"),
            }
        );
        assert!(matches!(
            union(&m(), &vec1(&[])),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
