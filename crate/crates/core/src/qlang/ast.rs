use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::algebra::{JoinKind, Predicate, Step, TransformSpec};
use crate::array::Index;
use crate::value::Value;

/// A query expression. Each node is one operator of the algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Ref(String),
    Project(Box<Expr>, BTreeSet<Index>),
    /// Selection. Applied to a placement it is pushed down to the
    /// fragments.
    Select(Box<Expr>, Predicate),
    Cross(Box<Expr>, Box<Expr>),
    Transform(Box<Expr>, TransformSpec),
    Union(Box<Expr>, Box<Expr>),
    Join {
        kind: JoinKind,
        left: Box<Expr>,
        right: Box<Expr>,
        on: Vec<(usize, usize)>,
    },
    VPartition(Box<Expr>, Vec<Predicate>),
    HPartition(Box<Expr>, Vec<BTreeSet<usize>>),
    Reassemble(Box<Expr>),
    /// One fragment of a placement, by id.
    Fragment(Box<Expr>, usize),
}

impl Expr {
    pub fn reference(name: impl Into<String>) -> Expr {
        Expr::Ref(name.into())
    }

    pub fn operator_name(&self) -> &'static str {
        match self {
            Expr::Ref(_) => "ref",
            Expr::Project(..) => "project",
            Expr::Select(..) => "select",
            Expr::Cross(..) => "cross",
            Expr::Transform(..) => "transform",
            Expr::Union(..) => "union",
            Expr::Join { kind, .. } => kind.name(),
            Expr::VPartition(..) => "vpartition",
            Expr::HPartition(..) => "hpartition",
            Expr::Reassemble(_) => "reassemble",
            Expr::Fragment(..) => "fragment",
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Ref(_) => vec![],
            Expr::Project(e, _)
            | Expr::Select(e, _)
            | Expr::Transform(e, _)
            | Expr::VPartition(e, _)
            | Expr::HPartition(e, _)
            | Expr::Reassemble(e)
            | Expr::Fragment(e, _) => vec![e],
            Expr::Cross(l, r) | Expr::Union(l, r) | Expr::Join { left: l, right: r, .. } => {
                vec![l, r]
            }
        }
    }

    /// Every array name referenced, sorted.
    pub fn references(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let Expr::Ref(name) = e {
                out.insert(name.as_str());
            }
            stack.extend(e.children());
        }
        out
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }
}

/// Canonical text: operator calls with `", "` separated arguments and
/// fully parenthesized boolean connectives.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ref(name) => f.write_str(name),
            Expr::Project(e, set) => {
                write!(f, "project({e}, ")?;
                write_index_set(f, set)?;
                f.write_str(")")
            }
            Expr::Select(e, p) => write!(f, "select({e}, {})", PredText(p)),
            Expr::Cross(l, r) => write!(f, "cross({l}, {r})"),
            Expr::Transform(e, spec) => write!(f, "transform({e}, {})", SpecText(spec)),
            Expr::Union(l, r) => write!(f, "union({l}, {r})"),
            Expr::Join {
                kind,
                left,
                right,
                on,
            } => {
                write!(f, "{}({left}, {right}", kind.name())?;
                if !on.is_empty() {
                    f.write_str(", on(")?;
                    for (k, (l, r)) in on.iter().enumerate() {
                        if k > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{l}:{r}")?;
                    }
                    f.write_str(")")?;
                }
                f.write_str(")")
            }
            Expr::VPartition(e, preds) => {
                write!(f, "vpartition({e}")?;
                for p in preds {
                    write!(f, ", {}", PredText(p))?;
                }
                f.write_str(")")
            }
            Expr::HPartition(e, slices) => {
                write!(f, "hpartition({e}")?;
                for s in slices {
                    f.write_str(", {")?;
                    for (k, pos) in s.iter().enumerate() {
                        if k > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{pos}")?;
                    }
                    f.write_str("}")?;
                }
                f.write_str(")")
            }
            Expr::Reassemble(e) => write!(f, "reassemble({e})"),
            Expr::Fragment(e, k) => write!(f, "fragment({e}, {k})"),
        }
    }
}

fn write_index(f: &mut impl fmt::Write, i: &Index) -> fmt::Result {
    write!(f, "{i}")
}

fn write_index_set(f: &mut fmt::Formatter<'_>, set: &BTreeSet<Index>) -> fmt::Result {
    f.write_str("{")?;
    for (k, i) in set.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write_index(f, i)?;
    }
    f.write_str("}")
}

/// Display adapter for predicates in query syntax.
pub struct PredText<'a>(pub &'a Predicate);

impl fmt::Display for PredText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Predicate::True => f.write_str("true"),
            Predicate::Value { op, constant } => {
                write!(f, "val {op} {}", LiteralText(constant))
            }
            Predicate::Field { pos, op, constant } => {
                write!(f, "val.{pos} {op} {}", LiteralText(constant))
            }
            Predicate::Coords { op, left, right } => write!(f, "dim{left} {op} dim{right}"),
            Predicate::Coord { op, dim, constant } => write!(f, "dim{dim} {op} {constant}"),
            Predicate::And(l, r) => write!(f, "({} and {})", PredText(l), PredText(r)),
            Predicate::Or(l, r) => write!(f, "({} or {})", PredText(l), PredText(r)),
            Predicate::Not(p) => write!(f, "not {}", PredText(p)),
        }
    }
}

/// Display adapter for value literals in query syntax.
pub struct LiteralText<'a>(pub &'a Value);

impl fmt::Display for LiteralText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Value::Int(n) => write!(f, "{n}"),
            Value::Float(x) => write!(f, "{:?}", x.get()),
            Value::Str(s) => {
                let mut buf = String::new();
                crate::format::write_string(s, &mut buf);
                f.write_str(&buf)
            }
            Value::Undef => f.write_str("undef"),
            Value::Tuple(items) => {
                f.write_str("(")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", LiteralText(item))?;
                }
                if items.len() == 1 {
                    f.write_str(",")?;
                }
                f.write_str(")")
            }
            Value::Array(a) => {
                write!(f, "array[{}]{{", a.arity())?;
                for (k, (i, v)) in a.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{i}: {}", LiteralText(v))?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Display adapter for transform specs in query syntax.
pub struct SpecText<'a>(pub &'a TransformSpec);

impl fmt::Display for SpecText<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, step) in self.0.steps.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            match step {
                Step::Permute(perm) => {
                    f.write_str("permute(")?;
                    let mut s = String::new();
                    for (j, p) in perm.iter().enumerate() {
                        if j > 0 {
                            s.push(',');
                        }
                        write!(s, "{p}")?;
                    }
                    write!(f, "{s})")?;
                }
                Step::Translate { dim, offset } => write!(f, "translate({dim}, {offset})")?,
                Step::InsertDim { position, value } => write!(f, "insert({position}, {value})")?,
                Step::RemoveDim(p) => write!(f, "remove({p})")?,
                Step::Compact(d) => write!(f, "compact({d})")?,
                Step::Remap { dim, table } => {
                    write!(f, "remap({dim}, {{")?;
                    for (j, (from, to)) in table.iter().enumerate() {
                        if j > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{from}: {to}")?;
                    }
                    f.write_str("})")?;
                }
                Step::Restore { position, table } => {
                    write!(f, "restore({position}, {{")?;
                    for (j, (i, c)) in table.iter().enumerate() {
                        if j > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{i}: {c}")?;
                    }
                    f.write_str("})")?;
                }
            }
        }
        f.write_str("]")
    }
}

/// Canonical text of an expression.
pub fn print(e: &Expr) -> String {
    e.to_string()
}
