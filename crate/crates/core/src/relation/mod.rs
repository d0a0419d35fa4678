//! In-memory relational algebra over typed datasets with set semantics.

mod dataset;
mod ops;
mod predicate;
mod value;

pub use dataset::{Dataset, DatasetError, Row, Schema, StructuralKey};
pub use ops::{
    check, difference, product, project, rename, select, test, union, Null, RelResult, TypeTest,
};
pub use predicate::{eval_predicate, CmpOp, Operand, Predicate, PredicateError};
pub use value::{ColumnKind, Value};
