//! Sparse n-dimensional arrays as partial functions from integer indices to
//! values, with an algebra of operators, support- and value-wise
//! partitioning, a relational table bridge and a small query language.

pub mod algebra;
pub mod array;
pub mod distribution;
pub mod error;
pub mod format;
pub mod manifest;
pub mod qlang;
pub mod relbridge;
pub mod value;

pub use array::{Array, ArrayBuilder, Index};
pub use error::{Error, Result};
pub use value::{Float, Value};
