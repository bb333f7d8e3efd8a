//! Operators closed over [`Array`](crate::Array): projection, selection,
//! cross product, index transformations, union, and the joins derived
//! from them.

mod join;
mod ops;
mod predicate;
mod transform;

pub use join::{
    anti_join, check_on, equi_join, equi_join_by_cross, join, join_predicate, semi_join, JoinKind,
};
pub use ops::{cross, project, project_where, select, union};
pub use predicate::{CmpOp, Predicate};
pub use transform::{
    invert, transform, transform_traced, Step, TransformSpec, TransformTrace,
};
