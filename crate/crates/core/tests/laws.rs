mod common;

use std::collections::BTreeSet;

use arrac_core::algebra::{cross, project, select, union, CmpOp, Predicate};
use arrac_core::{Error, Index, Value};
use common::*;
use proptest::prelude::*;

fn predicate(arity: usize) -> impl Strategy<Value = Predicate> {
    let atom = prop_oneof![
        (0..arity, -3i64..3).prop_map(|(d, c)| Predicate::coord(CmpOp::Ge, d, c)),
        (0..arity, 0..arity).prop_map(|(l, r)| Predicate::coords(CmpOp::Le, l, r)),
        leaf().prop_map(Predicate::value_eq),
        (-3i64..3).prop_map(|c| Predicate::value(CmpOp::Lt, c)),
        Just(Predicate::True),
    ];
    atom.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            inner.prop_map(Predicate::not),
        ]
    })
}

fn array_and_predicates() -> impl Strategy<Value = (arrac_core::Array, Predicate, Predicate)> {
    (1usize..=4).prop_flat_map(|n| (array_of_arity(n, 60), predicate(n), predicate(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cross_cardinality_and_arity(a in array(30), b in array(30)) {
        let c = cross(&a, &b);
        prop_assert_eq!(c.len(), a.len() * b.len());
        prop_assert_eq!(c.arity(), a.arity() + b.arity());
        for (i, v) in &a {
            for (j, w) in &b {
                let got = c.lookup(&i.concat(j)).unwrap();
                prop_assert_eq!(got, Some(&Value::pair(v.clone(), w.clone())));
            }
        }
    }

    #[test]
    fn project_is_idempotent_and_a_restriction(a in array(60), keep in prop::collection::vec(any::<prop::sample::Index>(), 0..20)) {
        let support: Vec<Index> = a.indices().cloned().collect();
        let set: BTreeSet<Index> = if support.is_empty() {
            BTreeSet::new()
        } else {
            keep.iter().map(|k| k.get(&support).clone()).collect()
        };
        let once = project(&a, &set).unwrap();
        prop_assert_eq!(&project(&once, &set).unwrap(), &once);
        prop_assert_eq!(once.support(), set.clone());
        for (i, v) in &once {
            prop_assert_eq!(a.lookup(i).unwrap(), Some(v));
        }
    }

    #[test]
    fn select_laws((a, p, q) in array_and_predicates()) {
        let pq = select(&a, &p.clone().and(q.clone())).unwrap();
        let p_then_q = select(&select(&a, &p).unwrap(), &q).unwrap();
        let q_then_p = select(&select(&a, &q).unwrap(), &p).unwrap();
        prop_assert_eq!(&pq, &p_then_q);
        prop_assert_eq!(&p_then_q, &q_then_p);
        let sp = select(&a, &p).unwrap();
        prop_assert_eq!(&select(&sp, &p).unwrap(), &sp);
        // Selection never invents or alters associations.
        for (i, v) in &sp {
            prop_assert_eq!(a.lookup(i).unwrap(), Some(v));
            prop_assert!(p.eval(i, v));
        }
        prop_assert_eq!(select(&a, &Predicate::True).unwrap(), a.clone());
    }

    #[test]
    fn union_laws((a, b) in same_arity_pair(60)) {
        let b = make_consistent(&a, &b);
        prop_assert_eq!(&union(&a, &a).unwrap(), &a);
        let ab = union(&a, &b).unwrap();
        prop_assert_eq!(&ab, &union(&b, &a).unwrap());
        prop_assert_eq!(ab.support(), a.support().union(&b.support()).cloned().collect());
    }

    #[test]
    fn union_associative((a, b) in same_arity_pair(40), seed in any::<u64>()) {
        let b = make_consistent(&a, &b);
        // Third operand: a random subset of the entries of a and b.
        let pairs = a.iter().chain(b.iter())
            .enumerate()
            .filter(|(k, _)| (seed >> (k % 64)) & 1 == 1)
            .map(|(_, (i, v))| (i.clone(), v.clone()));
        let mut builder = arrac_core::ArrayBuilder::new(a.arity()).unwrap();
        for (i, v) in pairs {
            if builder.insert(i.clone(), v).is_err() {
                prop_assume!(false);
            }
        }
        let c = builder.finish();
        let left = union(&union(&a, &b).unwrap(), &c).unwrap();
        let right = union(&a, &union(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn union_conflict_has_correct_witness((a, b) in same_arity_pair(30), pick in any::<prop::sample::Index>()) {
        prop_assume!(!a.is_empty());
        let support: Vec<Index> = a.indices().cloned().collect();
        let at = pick.get(&support).clone();
        let old = a.lookup(&at).unwrap().unwrap().clone();
        let changed = Value::tuple(vec![old.clone(), Value::str("changed")]).unwrap();
        let b = make_consistent(&a, &b);
        let pairs = b.iter().filter(|(i, _)| **i != at).map(|(i, v)| (i.clone(), v.clone()))
            .chain([(at.clone(), changed.clone())]);
        let b = arrac_core::Array::new(a.arity(), pairs).unwrap();
        match union(&a, &b) {
            Err(Error::ConsistencyViolation { index, existing, incoming }) => {
                prop_assert_eq!(&index, &at);
                prop_assert_eq!(existing, old);
                prop_assert_eq!(incoming, changed);
            }
            other => prop_assert!(false, "expected conflict, got {:?}", other),
        }
    }

    #[test]
    fn closure_under_operators((a, b) in same_arity_pair(40)) {
        // Results are always well-formed arrays: rebuilding them through the
        // checked constructor succeeds and gives the same array.
        let b = make_consistent(&a, &b);
        let results = [
            union(&a, &b).unwrap(),
            cross(&a, &b),
            select(&a, &Predicate::True).unwrap(),
            project(&a, &b.support()).unwrap(),
        ];
        for r in results {
            let rebuilt = arrac_core::Array::new(r.arity(), r.iter().map(|(i, v)| (i.clone(), v.clone()))).unwrap();
            prop_assert_eq!(rebuilt, r);
        }
    }
}

#[test]
fn cross_with_empty_is_empty() {
    let a = arrac_core::Array::new(1, [(Index::from([0]), Value::Int(1))]).unwrap();
    let e = arrac_core::Array::empty(2).unwrap();
    assert!(cross(&a, &e).is_empty());
    assert_eq!(cross(&a, &e).arity(), 3);
}
