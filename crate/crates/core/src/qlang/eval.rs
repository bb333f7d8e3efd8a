use super::ast::Expr;
use super::catalog::Catalog;
use super::typecheck::{typecheck, TypeError};
use crate::algebra::{cross, join, project, select, transform, union};
use crate::array::Array;
use crate::distribution::{partition_horizontal, partition_vertical, push_select, reassemble, Placement};
use crate::error::Error;

/// Result of evaluating a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluated {
    Array(Array),
    Placement(Placement),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Type(#[from] TypeError),

    /// An operator failed at run time. `node` is the pre-order number of
    /// the failing node.
    #[error("in `{expr}`: {source}")]
    Operator {
        node: usize,
        expr: String,
        #[source]
        source: Error,
    },
}

impl EvalError {
    pub fn node(&self) -> usize {
        match self {
            EvalError::Type(t) => t.node(),
            EvalError::Operator { node, .. } => *node,
        }
    }
}

/// Typechecks and evaluates `e`; the root must produce an array.
pub fn evaluate(e: &Expr, catalog: &Catalog) -> Result<Array, EvalError> {
    match evaluate_any(e, catalog)? {
        Evaluated::Array(a) => Ok(a),
        Evaluated::Placement(_) => Err(TypeError::KindError {
            node: 0,
            expr: e.to_string(),
            message: "expression yields a placement; wrap it in reassemble(...) or fragment(..., k)".into(),
        }
        .into()),
    }
}

pub fn evaluate_any(e: &Expr, catalog: &Catalog) -> Result<Evaluated, EvalError> {
    typecheck(e, catalog)?;
    let mut counter = 0;
    eval(e, catalog, &mut counter)
}

fn eval(e: &Expr, catalog: &Catalog, counter: &mut usize) -> Result<Evaluated, EvalError> {
    let node = *counter;
    *counter += 1;
    let fail = |source: Error| EvalError::Operator {
        node,
        expr: e.to_string(),
        source,
    };
    let kind = |message: &str| -> EvalError {
        TypeError::KindError {
            node,
            expr: e.to_string(),
            message: message.into(),
        }
        .into()
    };

    let mut args = Vec::new();
    for child in e.children() {
        args.push(eval(child, catalog, counter)?);
    }
    let array = |k: usize| match &args[k] {
        Evaluated::Array(a) => Ok(a),
        Evaluated::Placement(_) => Err(kind("expected an array operand")),
    };
    let placement = || match &args[0] {
        Evaluated::Placement(p) => Ok(p),
        Evaluated::Array(_) => Err(kind("expected a placement operand")),
    };

    let out = match e {
        Expr::Ref(name) => Evaluated::Array(
            catalog
                .get(name)
                .cloned()
                .ok_or_else(|| TypeError::UnboundName {
                    node,
                    name: name.clone(),
                })?,
        ),
        Expr::Project(_, set) => Evaluated::Array(project(array(0)?, set).map_err(fail)?),
        Expr::Select(_, pred) => match &args[0] {
            Evaluated::Array(a) => Evaluated::Array(select(a, pred).map_err(fail)?),
            Evaluated::Placement(p) => Evaluated::Placement(push_select(p, pred).map_err(fail)?),
        },
        Expr::Cross(..) => Evaluated::Array(cross(array(0)?, array(1)?)),
        Expr::Transform(_, spec) => Evaluated::Array(transform(array(0)?, spec).map_err(fail)?),
        Expr::Union(..) => Evaluated::Array(union(array(0)?, array(1)?).map_err(fail)?),
        Expr::Join { kind, on, .. } => {
            Evaluated::Array(join(*kind, array(0)?, array(1)?, on).map_err(fail)?)
        }
        Expr::VPartition(_, preds) => {
            Evaluated::Placement(partition_vertical(array(0)?, preds).map_err(fail)?)
        }
        Expr::HPartition(_, slices) => {
            Evaluated::Placement(partition_horizontal(array(0)?, slices).map_err(fail)?)
        }
        Expr::Reassemble(_) => Evaluated::Array(reassemble(placement()?).map_err(fail)?),
        Expr::Fragment(_, k) => {
            let p = placement()?;
            let f = p
                .fragment(*k)
                .ok_or_else(|| fail(Error::BadPlacement(format!("no fragment {k}"))))?;
            Evaluated::Array(f.array.clone())
        }
    };
    Ok(out)
}
