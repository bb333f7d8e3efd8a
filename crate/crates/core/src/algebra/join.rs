//! Joins derived from cross product, selection and projection.
//!
//! Join conditions equate index coordinates only; values are treated as
//! opaque. `on` lists `(dim_of_left, dim_of_right)` pairs. An empty list
//! makes the equi-join a plain cross product.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::ops::{cross, select};
use super::predicate::{CmpOp, Predicate};
use crate::array::{Array, Index};
use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JoinKind {
    Equi,
    Semi,
    Anti,
}

impl JoinKind {
    pub fn name(self) -> &'static str {
        match self {
            JoinKind::Equi => "equijoin",
            JoinKind::Semi => "semijoin",
            JoinKind::Anti => "antijoin",
        }
    }
}

pub fn check_on(left_arity: usize, right_arity: usize, on: &[(usize, usize)]) -> Result<()> {
    for &(l, r) in on {
        if l >= left_arity {
            return Err(Error::PredicateArity {
                dim: l,
                arity: left_arity,
            });
        }
        if r >= right_arity {
            return Err(Error::PredicateArity {
                dim: r,
                arity: right_arity,
            });
        }
    }
    Ok(())
}

/// The join condition over the crossed index: `⋀ dim_l = n_left + dim_r`.
pub fn join_predicate(left_arity: usize, on: &[(usize, usize)]) -> Predicate {
    Predicate::all(
        on.iter()
            .map(|&(l, r)| Predicate::coords(CmpOp::Eq, l, left_arity + r)),
    )
}

/// `σ_p(A × B)` evaluated literally. Quadratic; [`equi_join`] computes the
/// same array without materializing the cross product.
pub fn equi_join_by_cross(a: &Array, b: &Array, on: &[(usize, usize)]) -> Result<Array> {
    check_on(a.arity(), b.arity(), on)?;
    select(&cross(a, b), &join_predicate(a.arity(), on))
}

fn key(index: &Index, dims: impl Iterator<Item = usize>) -> Vec<i64> {
    dims.map(|d| index.coord(d)).collect()
}

pub fn equi_join(a: &Array, b: &Array, on: &[(usize, usize)]) -> Result<Array> {
    check_on(a.arity(), b.arity(), on)?;
    let mut buckets: HashMap<Vec<i64>, Vec<(&Index, &Value)>> = HashMap::new();
    for (j, e) in b {
        buckets
            .entry(key(j, on.iter().map(|p| p.1)))
            .or_default()
            .push((j, e));
    }
    let mut assoc = BTreeMap::new();
    for (i, d) in a {
        if let Some(matches) = buckets.get(&key(i, on.iter().map(|p| p.0))) {
            for (j, e) in matches {
                assoc.insert(i.concat(j), Value::pair(d.clone(), (*e).clone()));
            }
        }
    }
    Ok(Array::from_map(a.arity() + b.arity(), assoc))
}

fn filter_by_match(a: &Array, b: &Array, on: &[(usize, usize)], keep_matching: bool) -> Result<Array> {
    check_on(a.arity(), b.arity(), on)?;
    let keys: HashSet<Vec<i64>> = b.indices().map(|j| key(j, on.iter().map(|p| p.1))).collect();
    let assoc = a
        .iter()
        .filter(|(i, _)| keys.contains(&key(i, on.iter().map(|p| p.0))) == keep_matching)
        .map(|(i, v)| (i.clone(), v.clone()))
        .collect();
    Ok(Array::from_map(a.arity(), assoc))
}

/// Associations of `a` whose index matches at least one index of `b`.
/// Same arity and values as `a`.
pub fn semi_join(a: &Array, b: &Array, on: &[(usize, usize)]) -> Result<Array> {
    filter_by_match(a, b, on, true)
}

/// Associations of `a` whose index matches no index of `b`.
pub fn anti_join(a: &Array, b: &Array, on: &[(usize, usize)]) -> Result<Array> {
    filter_by_match(a, b, on, false)
}

pub fn join(kind: JoinKind, a: &Array, b: &Array, on: &[(usize, usize)]) -> Result<Array> {
    match kind {
        JoinKind::Equi => equi_join(a, b, on),
        JoinKind::Semi => semi_join(a, b, on),
        JoinKind::Anti => anti_join(a, b, on),
    }
}
