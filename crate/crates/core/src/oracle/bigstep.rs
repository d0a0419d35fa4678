//! A direct recursive evaluator: expressions evaluate in one call and
//! statements run as a flat list. It shares nothing with the small-step
//! machine except the relational operations, so agreement between the two
//! is a meaningful check.

use std::collections::HashMap;
use std::sync::Arc;

use crate::eval::{EvalError, Outcome};
use crate::imprat::{free_variables, RelExpr, Stmt};
use crate::relation::{self, Dataset};

type Env = HashMap<String, Arc<Dataset>>;

/// Value of `e`, or `None` for ⊥.
pub fn eval_expr(
    e: &RelExpr,
    env: &HashMap<String, Arc<Dataset>>,
) -> Result<Option<Arc<Dataset>>, EvalError> {
    let ok = |r: relation::RelResult| r.ok().map(Arc::new);
    Ok(match e {
        RelExpr::Literal(name) => return Err(EvalError::UnresolvedLiteral(name.clone())),
        RelExpr::Var(x) => Some(
            env.get(x)
                .cloned()
                .ok_or_else(|| EvalError::UnboundVariable(x.clone()))?,
        ),
        RelExpr::Resolved(d) => Some(Arc::clone(d)),
        RelExpr::Null => None,
        RelExpr::Union(l, r) | RelExpr::Difference(l, r) | RelExpr::Product(l, r) => {
            let Some(a) = eval_expr(l, env)? else {
                return Ok(None);
            };
            let Some(b) = eval_expr(r, env)? else {
                return Ok(None);
            };
            ok(match e {
                RelExpr::Union(..) => relation::union(&a, &b),
                RelExpr::Difference(..) => relation::difference(&a, &b),
                _ => relation::product(&a, &b),
            })
        }
        RelExpr::Project(attrs, inner) => {
            eval_expr(inner, env)?.and_then(|d| ok(relation::project(&d, attrs)))
        }
        RelExpr::Select(phi, inner) => {
            eval_expr(inner, env)?.and_then(|d| ok(relation::select(&d, phi)))
        }
        RelExpr::Rename { from, to, expr } => {
            eval_expr(expr, env)?.and_then(|d| ok(relation::rename(&d, from, to)))
        }
        RelExpr::Test(inner, tests) => {
            if tests.is_empty() {
                return Err(EvalError::Stuck("test with no types".into()));
            }
            eval_expr(inner, env)?.filter(|d| tests.iter().all(|t| relation::check(d, t).is_ok()))
        }
    })
}

/// Runs `s` with its free variables bound to `inputs` in declaration order.
pub fn run(s: &Stmt, inputs: &[Arc<Dataset>]) -> Result<Outcome, EvalError> {
    let vars = free_variables(s)?;
    if vars.len() != inputs.len() {
        return Err(EvalError::ArityMismatch {
            expected: vars.len(),
            found: inputs.len(),
        });
    }
    let mut env: Env = vars.into_iter().zip(inputs.iter().cloned()).collect();
    for stmt in s.flatten() {
        match stmt {
            Stmt::Top | Stmt::Declare(_) => {}
            Stmt::Bottom => return Ok(Outcome::Failure),
            Stmt::Assign(x, e) => match eval_expr(e, &env)? {
                Some(d) => {
                    env.insert(x.clone(), d);
                }
                None => return Ok(Outcome::Failure),
            },
            Stmt::Return(e) => {
                return Ok(match eval_expr(e, &env)? {
                    Some(d) => Outcome::Success(d),
                    None => Outcome::Failure,
                })
            }
            Stmt::Seq(..) => unreachable!("flatten removes sequences"),
        }
    }
    Ok(Outcome::CompletedWithoutReturn)
}
