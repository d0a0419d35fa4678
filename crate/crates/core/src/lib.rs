//! Typed data-discovery queries.
//!
//! A TQL query describes the datasets a user wants in terms of the
//! transformations and type tests they must survive. [`frontend`] parses
//! TQL and translates it into the ImpRAT IR ([`imprat`]); [`eval`] runs an
//! ImpRAT program with small-step semantics over the relational core in
//! [`relation`]; [`solver`] searches a [`repository`] for input datasets on
//! which the program succeeds; [`oracle`] computes the same result sets by
//! brute force.

pub mod eval;
pub mod frontend;
pub mod imprat;
pub mod oracle;
pub mod relation;
pub mod repository;
pub mod solver;

#[cfg(any(test, feature = "reference"))]
pub mod reference;

pub use eval::{EvalError, Evaluator, Outcome};
pub use imprat::{RelExpr, Stmt};
pub use oracle::{tcra_eval, DatasetSet};
pub use relation::{ColumnKind, Dataset, Predicate, TypeTest, Value};
pub use repository::{load_repository, parse_csv, Repository};
pub use solver::{
    Backtracking, CandidateInput, ChoiceFunction, DiscoveryProgram, SolveResult, Solver,
};
