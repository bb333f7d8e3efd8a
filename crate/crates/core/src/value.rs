//! Array entry values.
//!
//! A [`Value`] is a tagged scalar, a tuple of values, or a nested array.
//! Equality is structural and total: floats compare by bit pattern and NaN
//! can never be stored, so every value equals itself.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::array::Array;
use crate::error::{Error, Result};

/// A 64-bit float that is guaranteed not to be NaN.
#[derive(Debug, Clone, Copy)]
pub struct Float(f64);

impl Float {
    pub fn new(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::NanValue)
        } else {
            Ok(Float(x))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Float {}

impl Hash for Float {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl TryFrom<f64> for Float {
    type Error = Error;

    fn try_from(x: f64) -> Result<Self> {
        Float::new(x)
    }
}

/// The codomain of an array: scalars, the explicit undefined marker,
/// tuples and (recursively) arrays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Float(Float),
    Str(String),
    /// A stored "undefined" entry. Distinct from an index that is absent
    /// from the support.
    Undef,
    Tuple(Vec<Value>),
    Array(Arc<Array>),
}

impl Value {
    pub fn float(x: f64) -> Result<Value> {
        Float::new(x).map(Value::Float)
    }

    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn tuple(items: Vec<Value>) -> Result<Value> {
        if items.is_empty() {
            return Err(Error::EmptyTuple);
        }
        Ok(Value::Tuple(items))
    }

    /// Builds the pair used for cross-product entries.
    pub fn pair(left: Value, right: Value) -> Value {
        Value::Tuple(vec![left, right])
    }

    pub fn array(a: Array) -> Value {
        Value::Array(Arc::new(a))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Str(_) => "str",
            Value::Undef => "undef",
            Value::Tuple(_) => "tuple",
            Value::Array(_) => "array",
        }
    }

    /// Checks the construction-time rules that the enum alone cannot
    /// express: tuples are non-empty, all the way down.
    pub fn validate(&self) -> Result<()> {
        match self {
            Value::Tuple(items) => {
                if items.is_empty() {
                    return Err(Error::EmptyTuple);
                }
                items.iter().try_for_each(Value::validate)
            }
            _ => Ok(()),
        }
    }

    /// Ordering used by predicates. Only defined between two ints, two
    /// floats or two strings; everything else is incomparable.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
            (Value::Float(a), Value::Float(b)) => a.0.partial_cmp(&b.0),
            (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

impl From<Float> for Value {
    fn from(v: Float) -> Self {
        Value::Float(v)
    }
}

impl From<Array> for Value {
    fn from(v: Array) -> Self {
        Value::array(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{:?}", v.0),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Undef => f.write_str("undef"),
            Value::Tuple(items) => {
                f.write_str("(")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
            Value::Array(a) => write!(f, "array[{}; {} entries]", a.arity(), a.len()),
        }
    }
}
