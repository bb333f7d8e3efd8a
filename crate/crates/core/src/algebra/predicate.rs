use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::array::Index;
use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Le,
        CmpOp::Gt,
        CmpOp::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }

    fn ints(self, a: i64, b: i64) -> bool {
        self.holds(a.cmp(&b))
    }

    /// `=` and `!=` are structural; ordered operators are false unless both
    /// sides are comparable.
    fn values(self, a: &Value, b: &Value) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            _ => a.compare(b).is_some_and(|ord| self.holds(ord)),
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A condition over one association `(index, value)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    True,
    /// Compares the whole value with a constant.
    Value { op: CmpOp, constant: Value },
    /// Compares component `pos` of a tuple value with a constant. False
    /// when the value is not a tuple or is too short.
    Field { pos: usize, op: CmpOp, constant: Value },
    /// Compares two coordinates of the index.
    Coords { op: CmpOp, left: usize, right: usize },
    /// Compares one coordinate with an integer constant.
    Coord { op: CmpOp, dim: usize, constant: i64 },
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
}

impl Predicate {
    pub fn value(op: CmpOp, constant: impl Into<Value>) -> Predicate {
        Predicate::Value {
            op,
            constant: constant.into(),
        }
    }

    pub fn value_eq(constant: impl Into<Value>) -> Predicate {
        Predicate::value(CmpOp::Eq, constant)
    }

    pub fn field(pos: usize, op: CmpOp, constant: impl Into<Value>) -> Predicate {
        Predicate::Field {
            pos,
            op,
            constant: constant.into(),
        }
    }

    pub fn coords(op: CmpOp, left: usize, right: usize) -> Predicate {
        Predicate::Coords { op, left, right }
    }

    pub fn coord(op: CmpOp, dim: usize, constant: i64) -> Predicate {
        Predicate::Coord { op, dim, constant }
    }

    pub fn coord_eq(dim: usize, constant: i64) -> Predicate {
        Predicate::coord(CmpOp::Eq, dim, constant)
    }

    pub fn and(self, other: Predicate) -> Predicate {
        Predicate::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Predicate) -> Predicate {
        Predicate::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Predicate {
        Predicate::Not(Box::new(self))
    }

    /// Conjunction of all `preds`; `True` when empty.
    pub fn all(preds: impl IntoIterator<Item = Predicate>) -> Predicate {
        preds
            .into_iter()
            .reduce(Predicate::and)
            .unwrap_or(Predicate::True)
    }

    /// Evaluates the predicate. Total: dimensions must have been validated
    /// with [`Predicate::check_arity`] beforehand.
    pub fn eval(&self, index: &Index, value: &Value) -> bool {
        match self {
            Predicate::True => true,
            Predicate::Value { op, constant } => op.values(value, constant),
            Predicate::Field { pos, op, constant } => match value {
                Value::Tuple(items) => items.get(*pos).is_some_and(|v| op.values(v, constant)),
                _ => false,
            },
            Predicate::Coords { op, left, right } => {
                op.ints(index.coord(*left), index.coord(*right))
            }
            Predicate::Coord { op, dim, constant } => op.ints(index.coord(*dim), *constant),
            Predicate::And(l, r) => l.eval(index, value) && r.eval(index, value),
            Predicate::Or(l, r) => l.eval(index, value) || r.eval(index, value),
            Predicate::Not(p) => !p.eval(index, value),
        }
    }

    /// Largest dimension referenced, if any.
    pub fn max_dim(&self) -> Option<usize> {
        match self {
            Predicate::True | Predicate::Value { .. } | Predicate::Field { .. } => None,
            Predicate::Coords { left, right, .. } => Some(*left.max(right)),
            Predicate::Coord { dim, .. } => Some(*dim),
            Predicate::And(l, r) | Predicate::Or(l, r) => match (l.max_dim(), r.max_dim()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
            Predicate::Not(p) => p.max_dim(),
        }
    }

    pub fn check_arity(&self, arity: usize) -> Result<()> {
        match self.max_dim() {
            Some(dim) if dim >= arity => Err(Error::PredicateArity { dim, arity }),
            _ => Ok(()),
        }
    }

    /// True when the predicate inspects the whole value anywhere.
    pub fn uses_whole_value(&self) -> bool {
        match self {
            Predicate::Value { .. } => true,
            Predicate::And(l, r) | Predicate::Or(l, r) => {
                l.uses_whole_value() || r.uses_whole_value()
            }
            Predicate::Not(p) => p.uses_whole_value(),
            _ => false,
        }
    }

    /// Tuple positions referenced through [`Predicate::Field`].
    pub fn field_positions(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_fields(&mut out);
        out
    }

    fn collect_fields(&self, out: &mut BTreeSet<usize>) {
        match self {
            Predicate::Field { pos, .. } => {
                out.insert(*pos);
            }
            Predicate::And(l, r) | Predicate::Or(l, r) => {
                l.collect_fields(out);
                r.collect_fields(out);
            }
            Predicate::Not(p) => p.collect_fields(out),
            _ => {}
        }
    }

    /// True when only index coordinates are inspected.
    pub fn is_index_only(&self) -> bool {
        !self.uses_whole_value() && self.field_positions().is_empty()
    }

    /// Rewrites every `Field` leaf through `f`, which returns the
    /// replacement leaf.
    pub(crate) fn map_fields(&self, f: &impl Fn(usize, CmpOp, &Value) -> Predicate) -> Predicate {
        match self {
            Predicate::Field { pos, op, constant } => f(*pos, *op, constant),
            Predicate::And(l, r) => l.map_fields(f).and(r.map_fields(f)),
            Predicate::Or(l, r) => l.map_fields(f).or(r.map_fields(f)),
            Predicate::Not(p) => p.map_fields(f).not(),
            other => other.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(coords: &[i64]) -> Index {
        Index::new(coords.to_vec())
    }

    #[test]
    fn value_equality_is_structural() {
        let p = Predicate::value_eq("b");
        assert!(p.eval(&at(&[0, 1]), &Value::str("b")));
        assert!(!p.eval(&at(&[0, 1]), &Value::str("a")));
        assert!(!Predicate::value_eq(1).eval(&at(&[0]), &Value::float(1.0).unwrap()));
    }

    #[test]
    fn ordered_comparison_across_tags_is_false() {
        for op in [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge] {
            let p = Predicate::value(op, 3);
            assert!(!p.eval(&at(&[0]), &Value::str("x")));
            assert!(!p.eval(&at(&[0]), &Value::Undef));
        }
        assert!(Predicate::value(CmpOp::Ne, 3).eval(&at(&[0]), &Value::str("x")));
    }

    #[test]
    fn coordinate_leaves() {
        let diag = Predicate::coords(CmpOp::Eq, 0, 1);
        assert!(diag.eval(&at(&[2, 2]), &Value::Undef));
        assert!(!diag.eval(&at(&[2, 3]), &Value::Undef));
        let row = Predicate::coord(CmpOp::Ge, 0, 1);
        assert!(row.eval(&at(&[1, 0]), &Value::Undef));
        assert!(!row.eval(&at(&[0, 0]), &Value::Undef));
    }

    #[test]
    fn field_on_non_tuple_is_false() {
        let p = Predicate::field(1, CmpOp::Eq, 2);
        assert!(p.eval(&at(&[0]), &Value::Tuple(vec![1.into(), 2.into()])));
        assert!(!p.eval(&at(&[0]), &Value::Int(2)));
        assert!(!p.eval(&at(&[0]), &Value::Tuple(vec![2.into()])));
    }

    #[test]
    fn arity_validation() {
        let p = Predicate::coord_eq(0, 1).and(Predicate::coords(CmpOp::Lt, 1, 3));
        assert_eq!(p.max_dim(), Some(3));
        assert_eq!(
            p.check_arity(3),
            Err(Error::PredicateArity { dim: 3, arity: 3 })
        );
        assert!(p.check_arity(4).is_ok());
        assert!(Predicate::value_eq(1).check_arity(1).is_ok());
    }

    #[test]
    fn reference_analysis() {
        let p = Predicate::coord_eq(0, 1).or(Predicate::field(2, CmpOp::Gt, 0).not());
        assert!(!p.uses_whole_value());
        assert_eq!(p.field_positions(), BTreeSet::from([2]));
        assert!(!p.is_index_only());
        assert!(Predicate::coord_eq(0, 1).is_index_only());
        assert!(Predicate::True.is_index_only());
    }
}
