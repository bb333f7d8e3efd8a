//! The array data model: an `n`-dimensional array is a finite partial
//! function from integer index tuples to [`Value`]s.
//!
//! Associations are kept in a `BTreeMap`, which gives the functional
//! invariant (one value per index) and the canonical lexicographic
//! enumeration for free.

use std::collections::btree_map::{self, Entry};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::value::Value;

/// A fixed-arity tuple of signed coordinates. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Index(Vec<i64>);

impl Index {
    pub fn new(coords: Vec<i64>) -> Self {
        Index(coords)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    pub fn coord(&self, dim: usize) -> i64 {
        self.0[dim]
    }

    /// `self ∘ other`
    pub fn concat(&self, other: &Index) -> Index {
        let mut coords = Vec::with_capacity(self.0.len() + other.0.len());
        coords.extend_from_slice(&self.0);
        coords.extend_from_slice(&other.0);
        Index(coords)
    }
}

impl From<Vec<i64>> for Index {
    fn from(coords: Vec<i64>) -> Self {
        Index(coords)
    }
}

impl<const N: usize> From<[i64; N]> for Index {
    fn from(coords: [i64; N]) -> Self {
        Index(coords.to_vec())
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// An immutable sparse `n`-dimensional array.
///
/// Equality (`==`) is array equality: same arity and the same set of
/// associations under structural value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Array {
    arity: usize,
    assoc: BTreeMap<Index, Value>,
}

impl Array {
    /// Builds an array from `(index, value)` pairs. Identical repeated pairs
    /// are merged; two pairs sharing an index with different values are a
    /// consistency violation.
    pub fn new<I>(arity: usize, pairs: I) -> Result<Array>
    where
        I: IntoIterator<Item = (Index, Value)>,
    {
        let mut builder = ArrayBuilder::new(arity)?;
        for (index, value) in pairs {
            builder.insert(index, value)?;
        }
        Ok(builder.finish())
    }

    pub fn empty(arity: usize) -> Result<Array> {
        ArrayBuilder::new(arity).map(ArrayBuilder::finish)
    }

    /// Callers guarantee every key has length `arity` and every value is
    /// valid.
    pub(crate) fn from_map(arity: usize, assoc: BTreeMap<Index, Value>) -> Array {
        debug_assert!(arity >= 1);
        debug_assert!(assoc.keys().all(|i| i.arity() == arity));
        Array { arity, assoc }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of associations.
    pub fn len(&self) -> usize {
        self.assoc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assoc.is_empty()
    }

    /// The value stored at `index`, or `None` when the index is outside the
    /// support. A stored [`Value::Undef`] comes back as `Some(&Undef)`.
    pub fn lookup(&self, index: &Index) -> Result<Option<&Value>> {
        self.check_arity(index)?;
        Ok(self.assoc.get(index))
    }

    pub fn contains(&self, index: &Index) -> bool {
        self.assoc.contains_key(index)
    }

    pub fn support(&self) -> BTreeSet<Index> {
        self.assoc.keys().cloned().collect()
    }

    /// Associations in lexicographic index order.
    pub fn iter(&self) -> btree_map::Iter<'_, Index, Value> {
        self.assoc.iter()
    }

    pub fn indices(&self) -> btree_map::Keys<'_, Index, Value> {
        self.assoc.keys()
    }

    pub(crate) fn check_arity(&self, index: &Index) -> Result<()> {
        if index.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: index.arity(),
            });
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Array {
    type Item = (&'a Index, &'a Value);
    type IntoIter = btree_map::Iter<'a, Index, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.assoc.iter()
    }
}

/// Incremental construction of an [`Array`] with the same checks as
/// [`Array::new`].
#[derive(Debug)]
pub struct ArrayBuilder {
    arity: usize,
    assoc: BTreeMap<Index, Value>,
}

impl ArrayBuilder {
    pub fn new(arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::ZeroArity);
        }
        Ok(ArrayBuilder {
            arity,
            assoc: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, index: Index, value: Value) -> Result<()> {
        if index.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: index.arity(),
            });
        }
        value.validate()?;
        match self.assoc.entry(index) {
            Entry::Vacant(slot) => {
                slot.insert(value);
                Ok(())
            }
            Entry::Occupied(slot) if *slot.get() == value => Ok(()),
            Entry::Occupied(slot) => Err(Error::ConsistencyViolation {
                index: slot.key().clone(),
                existing: slot.get().clone(),
                incoming: value,
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.assoc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assoc.is_empty()
    }

    pub fn finish(self) -> Array {
        Array {
            arity: self.arity,
            assoc: self.assoc,
        }
    }
}
