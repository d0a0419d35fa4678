//! The ImpRAT intermediate representation: relational expressions with
//! type tests, and the imperative statements that sequence them.

mod analysis;
mod ast;
mod pretty;

pub use analysis::{free_variables, validate, Diagnostic, ValidationError};
pub use ast::{Environment, RelExpr, Stmt};
