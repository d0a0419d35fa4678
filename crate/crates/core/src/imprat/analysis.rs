use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::ast::Stmt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("variable `{0}` is declared free more than once")]
    DuplicateDeclaration(String),
}

/// Static problems found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// The program can only finish in ⊤.
    NoReturn,
    UseBeforeDefinition(String),
    DuplicateDeclaration(String),
    /// Statements follow a return on the main sequence.
    UnreachableAfterReturn,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoReturn => {
                f.write_str("program has no return statement and can only complete as top")
            }
            Diagnostic::UseBeforeDefinition(x) => write!(
                f,
                "variable `{x}` is used before it is declared or assigned"
            ),
            Diagnostic::DuplicateDeclaration(x) => {
                write!(f, "variable `{x}` is declared free more than once")
            }
            Diagnostic::UnreachableAfterReturn => {
                f.write_str("statements after a return are unreachable")
            }
        }
    }
}

/// The declared free variables in program order. Their count is the input
/// arity of the program.
pub fn free_variables(s: &Stmt) -> Result<Vec<String>, ValidationError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for stmt in s.flatten() {
        if let Stmt::Declare(x) = stmt {
            if !seen.insert(x.as_str()) {
                return Err(ValidationError::DuplicateDeclaration(x.clone()));
            }
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Runs the static checks. An empty result means the program is valid.
pub fn validate(s: &Stmt) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut defined: HashSet<&str> = HashSet::new();
    let mut declared: HashSet<&str> = HashSet::new();
    let mut returned = false;
    let mut reported_unreachable = false;

    for stmt in s.flatten() {
        if returned && !reported_unreachable {
            diags.push(Diagnostic::UnreachableAfterReturn);
            reported_unreachable = true;
        }
        match stmt {
            Stmt::Declare(x) => {
                if !declared.insert(x) {
                    diags.push(Diagnostic::DuplicateDeclaration(x.clone()));
                }
                defined.insert(x);
            }
            Stmt::Assign(x, e) => {
                for v in e.vars() {
                    if !defined.contains(v) {
                        diags.push(Diagnostic::UseBeforeDefinition(v.to_owned()));
                    }
                }
                defined.insert(x);
            }
            Stmt::Return(e) => {
                for v in e.vars() {
                    if !defined.contains(v) {
                        diags.push(Diagnostic::UseBeforeDefinition(v.to_owned()));
                    }
                }
                returned = true;
            }
            Stmt::Top | Stmt::Bottom => {}
            Stmt::Seq(..) => unreachable!("flatten removes sequences"),
        }
    }
    if !returned {
        diags.push(Diagnostic::NoReturn);
    }
    diags
}
