//! Brute-force result sets. [`tcra_eval`] runs a discovery program on every
//! candidate tuple with an evaluator independent of the small-step machine
//! and collects the distinct successful outputs. It is meant for small
//! instances and refuses large ones.

pub mod bigstep;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eval::{EvalError, Outcome};
use crate::imprat::{RelExpr, Stmt};
use crate::relation::{self, Dataset, StructuralKey};
use crate::solver::DiscoveryProgram;

/// Default bound on `|repo|^arity`.
pub const DEFAULT_CEILING: usize = 10_000;

/// A set of datasets under structural equality: same attribute set and
/// same rows, regardless of column order or provenance name.
#[derive(Debug, Clone, Default)]
pub struct DatasetSet {
    members: BTreeMap<StructuralKey, Arc<Dataset>>,
}

impl DatasetSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `d` unless a structurally equal member exists. Returns whether
    /// it was added.
    pub fn insert(&mut self, d: Arc<Dataset>) -> bool {
        let key = d.structural_key();
        if self.members.contains_key(&key) {
            return false;
        }
        self.members.insert(key, d);
        true
    }

    pub fn contains(&self, d: &Dataset) -> bool {
        self.members.contains_key(&d.structural_key())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in canonical order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Arc<Dataset>> {
        self.members.values()
    }

    pub fn is_subset(&self, other: &DatasetSet) -> bool {
        self.members.keys().all(|k| other.members.contains_key(k))
    }

    /// Members of `self` with no structural match in `other`.
    pub fn difference<'a>(
        &'a self,
        other: &'a DatasetSet,
    ) -> impl Iterator<Item = &'a Arc<Dataset>> + 'a {
        self.members
            .iter()
            .filter(|(k, _)| !other.members.contains_key(*k))
            .map(|(_, d)| d)
    }
}

impl PartialEq for DatasetSet {
    fn eq(&self, other: &Self) -> bool {
        self.members.len() == other.members.len() && self.members.keys().eq(other.members.keys())
    }
}

impl Eq for DatasetSet {}

impl FromIterator<Arc<Dataset>> for DatasetSet {
    fn from_iter<I: IntoIterator<Item = Arc<Dataset>>>(iter: I) -> Self {
        let mut s = DatasetSet::new();
        for d in iter {
            s.insert(d);
        }
        s
    }
}

impl FromIterator<Dataset> for DatasetSet {
    fn from_iter<I: IntoIterator<Item = Dataset>>(iter: I) -> Self {
        iter.into_iter().map(Arc::new).collect()
    }
}

impl fmt::Display for DatasetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, d) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

/// `{d}`.
pub fn singleton_inject(d: Dataset) -> DatasetSet {
    std::iter::once(d).collect()
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {} candidate inputs, over the oracle ceiling of {ceiling}", candidates.map_or_else(|| "too many".to_owned(), |c| c.to_string()))]
    CeilingExceeded {
        candidates: Option<usize>,
        ceiling: usize,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// [`tcra_eval_with_ceiling`] with [`DEFAULT_CEILING`].
pub fn tcra_eval(dp: &DiscoveryProgram) -> Result<DatasetSet, OracleError> {
    tcra_eval_with_ceiling(dp, DEFAULT_CEILING)
}

/// All distinct outputs of `dp` over every tuple of repository datasets.
pub fn tcra_eval_with_ceiling(
    dp: &DiscoveryProgram,
    ceiling: usize,
) -> Result<DatasetSet, OracleError> {
    let candidates = dp.candidate_count();
    if candidates.is_none_or(|c| c > ceiling) {
        return Err(OracleError::CeilingExceeded {
            candidates,
            ceiling,
        });
    }
    let pool: Vec<Arc<Dataset>> = dp.repo().datasets().cloned().collect();
    let mut out = DatasetSet::new();
    let mut tuple = Vec::with_capacity(dp.arity());
    collect(dp.resolved(), &pool, dp.arity(), &mut tuple, &mut out)?;
    Ok(out)
}

fn collect(
    s: &Stmt,
    pool: &[Arc<Dataset>],
    arity: usize,
    tuple: &mut Vec<Arc<Dataset>>,
    out: &mut DatasetSet,
) -> Result<(), EvalError> {
    if tuple.len() == arity {
        if let Outcome::Success(d) = bigstep::run(s, tuple)? {
            out.insert(d);
        }
        return Ok(());
    }
    for d in pool {
        tuple.push(Arc::clone(d));
        collect(s, pool, arity, tuple, out)?;
        tuple.pop();
    }
    Ok(())
}

/// Evaluates `e` over sets: every operation applies to each combination of
/// operand members and ⊥ results are dropped.
pub fn lift_expr(e: &RelExpr, env: &HashMap<String, DatasetSet>) -> Result<DatasetSet, EvalError> {
    let each = |inner: &RelExpr,
                f: &dyn Fn(&Dataset) -> relation::RelResult|
     -> Result<DatasetSet, EvalError> {
        Ok(lift_expr(inner, env)?
            .iter()
            .filter_map(|d| f(d).ok())
            .collect())
    };
    Ok(match e {
        RelExpr::Literal(name) => return Err(EvalError::UnresolvedLiteral(name.clone())),
        RelExpr::Var(x) => env
            .get(x)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(x.clone()))?,
        RelExpr::Resolved(d) => std::iter::once(Arc::clone(d)).collect(),
        RelExpr::Null => DatasetSet::new(),
        RelExpr::Union(l, r) | RelExpr::Difference(l, r) | RelExpr::Product(l, r) => {
            let op = match e {
                RelExpr::Union(..) => relation::union,
                RelExpr::Difference(..) => relation::difference,
                _ => relation::product,
            };
            let (ls, rs) = (lift_expr(l, env)?, lift_expr(r, env)?);
            let mut out = DatasetSet::new();
            for a in ls.iter() {
                for b in rs.iter() {
                    if let Ok(d) = op(a, b) {
                        out.insert(Arc::new(d));
                    }
                }
            }
            out
        }
        RelExpr::Project(attrs, inner) => each(inner, &|d| relation::project(d, attrs))?,
        RelExpr::Select(phi, inner) => each(inner, &|d| relation::select(d, phi))?,
        RelExpr::Rename { from, to, expr } => each(expr, &|d| relation::rename(d, from, to))?,
        RelExpr::Test(inner, tests) => lift_expr(inner, env)?
            .iter()
            .filter(|d| tests.iter().all(|t| relation::check(d, t).is_ok()))
            .cloned()
            .collect(),
    })
}

/// Runs a program over sets: each free variable ranges over the whole
/// repository and each assignment binds the lifted value of its
/// expression.
///
/// When every set involved has at most one member this is exact. With
/// larger sets a variable used twice is lifted independently at each use,
/// so the result contains [`tcra_eval`]'s and may be larger.
pub fn lifted_eval(dp: &DiscoveryProgram) -> Result<DatasetSet, EvalError> {
    let everything: DatasetSet = dp.repo().datasets().cloned().collect();
    let env = dp
        .free_variables()
        .iter()
        .map(|x| (x.clone(), everything.clone()))
        .collect();
    lifted_run(dp.resolved(), env)
}

/// [`lifted_eval`] with explicit sets for the free variables.
pub fn lifted_run(s: &Stmt, mut env: HashMap<String, DatasetSet>) -> Result<DatasetSet, EvalError> {
    for stmt in s.flatten() {
        match stmt {
            Stmt::Top => {}
            Stmt::Declare(x) => {
                if !env.contains_key(x) {
                    return Err(EvalError::UnboundVariable(x.clone()));
                }
            }
            Stmt::Bottom => return Ok(DatasetSet::new()),
            Stmt::Assign(x, e) => {
                let v = lift_expr(e, &env)?;
                if v.is_empty() {
                    return Ok(v);
                }
                env.insert(x.clone(), v);
            }
            Stmt::Return(e) => return lift_expr(e, &env),
            Stmt::Seq(..) => unreachable!("flatten removes sequences"),
        }
    }
    Ok(DatasetSet::new())
}
