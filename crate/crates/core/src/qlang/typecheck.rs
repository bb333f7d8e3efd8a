use super::ast::Expr;
use super::catalog::Catalog;
use crate::algebra::{check_on, JoinKind, Step};
use crate::distribution::check_slices;

/// What a node evaluates to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Array { arity: usize },
    Placement { arity: usize, fragments: usize },
}

impl Shape {
    pub fn arity(self) -> usize {
        match self {
            Shape::Array { arity } | Shape::Placement { arity, .. } => arity,
        }
    }
}

/// An expression tree annotated with the shape of every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checked {
    pub shape: Shape,
    pub children: Vec<Checked>,
}

impl Checked {
    /// Shapes in pre-order, matching the node numbering used in errors.
    pub fn preorder(&self) -> Vec<Shape> {
        let mut out = vec![self.shape];
        for c in &self.children {
            out.extend(c.preorder());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound array name `{name}`")]
    UnboundName { node: usize, name: String },

    #[error("in `{expr}`: {message}")]
    ArityError {
        node: usize,
        expr: String,
        message: String,
    },

    #[error("in `{expr}`: {message}")]
    KindError {
        node: usize,
        expr: String,
        message: String,
    },
}

impl TypeError {
    /// Pre-order number of the offending node.
    pub fn node(&self) -> usize {
        match self {
            TypeError::UnboundName { node, .. }
            | TypeError::ArityError { node, .. }
            | TypeError::KindError { node, .. } => *node,
        }
    }
}

/// Computes the shape of every node, checking operand arities, predicate
/// dimensions, join pairs, transform steps and partition schemes.
pub fn typecheck(e: &Expr, catalog: &Catalog) -> Result<Checked, TypeError> {
    let mut counter = 0;
    check(e, catalog, &mut counter)
}

fn check(e: &Expr, catalog: &Catalog, counter: &mut usize) -> Result<Checked, TypeError> {
    let node = *counter;
    *counter += 1;
    let children = e
        .children()
        .into_iter()
        .map(|c| check(c, catalog, counter))
        .collect::<Result<Vec<_>, _>>()?;

    let arity_err = |message: String| TypeError::ArityError {
        node,
        expr: e.to_string(),
        message,
    };
    let array_arg = |k: usize| match children[k].shape {
        Shape::Array { arity } => Ok(arity),
        Shape::Placement { .. } => Err(TypeError::KindError {
            node,
            expr: e.to_string(),
            message: format!("operand {} is a placement, expected an array", k + 1),
        }),
    };
    let placement_arg = || match children[0].shape {
        Shape::Placement { arity, fragments } => Ok((arity, fragments)),
        Shape::Array { .. } => Err(TypeError::KindError {
            node,
            expr: e.to_string(),
            message: "operand is an array, expected a placement".into(),
        }),
    };

    let shape = match e {
        Expr::Ref(name) => match catalog.get(name) {
            Some(a) => Shape::Array { arity: a.arity() },
            None => {
                return Err(TypeError::UnboundName {
                    node,
                    name: name.clone(),
                })
            }
        },
        Expr::Project(_, set) => {
            let arity = array_arg(0)?;
            if let Some(bad) = set.iter().find(|i| i.arity() != arity) {
                return Err(arity_err(format!(
                    "index {bad} has {} coordinates, operand has arity {arity}",
                    bad.arity()
                )));
            }
            Shape::Array { arity }
        }
        Expr::Select(_, pred) => {
            let shape = children[0].shape;
            pred.check_arity(shape.arity())
                .map_err(|err| arity_err(err.to_string()))?;
            shape
        }
        Expr::Cross(..) => Shape::Array {
            arity: array_arg(0)? + array_arg(1)?,
        },
        Expr::Union(..) => {
            let (l, r) = (array_arg(0)?, array_arg(1)?);
            if l != r {
                return Err(arity_err(format!(
                    "union of arrays with arity {l} and {r}"
                )));
            }
            Shape::Array { arity: l }
        }
        Expr::Transform(_, spec) => {
            let mut arity = array_arg(0)?;
            for step in &spec.steps {
                if let Step::Restore { table, .. } = step {
                    if let Some(i) = table.keys().find(|i| i.arity() != arity) {
                        return Err(arity_err(format!(
                            "restore key {i} does not have arity {arity}"
                        )));
                    }
                }
                arity = step
                    .output_arity(arity)
                    .map_err(|err| arity_err(err.to_string()))?;
            }
            Shape::Array { arity }
        }
        Expr::Join { kind, on, .. } => {
            let (l, r) = (array_arg(0)?, array_arg(1)?);
            check_on(l, r, on).map_err(|err| arity_err(err.to_string()))?;
            Shape::Array {
                arity: match kind {
                    JoinKind::Equi => l + r,
                    JoinKind::Semi | JoinKind::Anti => l,
                },
            }
        }
        Expr::VPartition(_, preds) => {
            let arity = array_arg(0)?;
            for p in preds {
                p.check_arity(arity)
                    .map_err(|err| arity_err(err.to_string()))?;
            }
            Shape::Placement {
                arity,
                fragments: preds.len(),
            }
        }
        Expr::HPartition(_, slices) => {
            let arity = array_arg(0)?;
            let width = slices
                .iter()
                .flat_map(|s| s.iter().copied())
                .max()
                .map_or(0, |m| m + 1);
            check_slices(slices, width).map_err(|err| arity_err(err.to_string()))?;
            Shape::Placement {
                arity,
                fragments: slices.len(),
            }
        }
        Expr::Reassemble(_) => Shape::Array {
            arity: placement_arg()?.0,
        },
        Expr::Fragment(_, k) => {
            let (arity, fragments) = placement_arg()?;
            if *k >= fragments {
                return Err(arity_err(format!(
                    "fragment {k} requested from a placement with {fragments} fragments"
                )));
            }
            Shape::Array { arity }
        }
    };
    Ok(Checked { shape, children })
}
