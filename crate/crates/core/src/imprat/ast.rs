use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::relation::{Dataset, Predicate, TypeTest};

/// Relational expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum RelExpr {
    /// A dataset named in the repository; replaced by `Resolved` at run setup.
    Literal(String),
    Var(String),
    Union(Box<RelExpr>, Box<RelExpr>),
    Difference(Box<RelExpr>, Box<RelExpr>),
    Product(Box<RelExpr>, Box<RelExpr>),
    Project(Vec<String>, Box<RelExpr>),
    Select(Predicate, Box<RelExpr>),
    Rename {
        from: String,
        to: String,
        expr: Box<RelExpr>,
    },
    /// `R { T0, ..., Tn }`; tests are checked left to right.
    Test(Box<RelExpr>, Vec<TypeTest>),
    /// ⊥
    Null,
    /// A concrete dataset value. Only produced during evaluation.
    Resolved(Arc<Dataset>),
}

/// Statements.
#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    /// ⊤
    Top,
    /// ⊥
    Bottom,
    Assign(String, RelExpr),
    /// `!x`: marks `x` as a free input variable.
    Declare(String),
    Seq(Box<Stmt>, Box<Stmt>),
    /// Δ R
    Return(RelExpr),
}

impl RelExpr {
    pub fn lit(name: impl Into<String>) -> Self {
        RelExpr::Literal(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        RelExpr::Var(name.into())
    }

    pub fn union(l: RelExpr, r: RelExpr) -> Self {
        RelExpr::Union(Box::new(l), Box::new(r))
    }

    pub fn difference(l: RelExpr, r: RelExpr) -> Self {
        RelExpr::Difference(Box::new(l), Box::new(r))
    }

    pub fn product(l: RelExpr, r: RelExpr) -> Self {
        RelExpr::Product(Box::new(l), Box::new(r))
    }

    pub fn project<S: Into<String>>(attrs: impl IntoIterator<Item = S>, e: RelExpr) -> Self {
        RelExpr::Project(attrs.into_iter().map(Into::into).collect(), Box::new(e))
    }

    pub fn select(phi: Predicate, e: RelExpr) -> Self {
        RelExpr::Select(phi, Box::new(e))
    }

    pub fn rename(from: impl Into<String>, to: impl Into<String>, e: RelExpr) -> Self {
        RelExpr::Rename {
            from: from.into(),
            to: to.into(),
            expr: Box::new(e),
        }
    }

    pub fn test(e: RelExpr, tests: Vec<TypeTest>) -> Self {
        RelExpr::Test(Box::new(e), tests)
    }

    pub fn resolved(d: Dataset) -> Self {
        RelExpr::Resolved(Arc::new(d))
    }

    /// True for `Resolved` and `Null`, the two irreducible forms.
    pub fn is_value(&self) -> bool {
        matches!(self, RelExpr::Resolved(_) | RelExpr::Null)
    }

    /// Variables referenced, left to right, with repeats.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let RelExpr::Var(x) = e {
                out.push(x.as_str());
            }
        });
        out
    }

    /// Dataset literal names, left to right, with repeats.
    pub fn literals(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let RelExpr::Literal(x) = e {
                out.push(x.as_str());
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a RelExpr)) {
        f(self);
        match self {
            RelExpr::Union(l, r) | RelExpr::Difference(l, r) | RelExpr::Product(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            RelExpr::Project(_, e) | RelExpr::Select(_, e) | RelExpr::Test(e, _) => e.visit(f),
            RelExpr::Rename { expr, .. } => expr.visit(f),
            RelExpr::Literal(_) | RelExpr::Var(_) | RelExpr::Null | RelExpr::Resolved(_) => {}
        }
    }

    /// Replaces every literal with the dataset `resolve` returns for it.
    pub fn resolve_literals<E>(
        &self,
        resolve: &mut impl FnMut(&str) -> Result<Arc<Dataset>, E>,
    ) -> Result<RelExpr, E> {
        let bin = |l: &RelExpr,
                   r: &RelExpr,
                   resolve: &mut _|
         -> Result<(Box<RelExpr>, Box<RelExpr>), E> {
            Ok((
                Box::new(l.resolve_literals(resolve)?),
                Box::new(r.resolve_literals(resolve)?),
            ))
        };
        Ok(match self {
            RelExpr::Literal(name) => RelExpr::Resolved(resolve(name)?),
            RelExpr::Var(_) | RelExpr::Null | RelExpr::Resolved(_) => self.clone(),
            RelExpr::Union(l, r) => {
                let (l, r) = bin(l, r, resolve)?;
                RelExpr::Union(l, r)
            }
            RelExpr::Difference(l, r) => {
                let (l, r) = bin(l, r, resolve)?;
                RelExpr::Difference(l, r)
            }
            RelExpr::Product(l, r) => {
                let (l, r) = bin(l, r, resolve)?;
                RelExpr::Product(l, r)
            }
            RelExpr::Project(a, e) => {
                RelExpr::Project(a.clone(), Box::new(e.resolve_literals(resolve)?))
            }
            RelExpr::Select(p, e) => {
                RelExpr::Select(p.clone(), Box::new(e.resolve_literals(resolve)?))
            }
            RelExpr::Rename { from, to, expr } => RelExpr::Rename {
                from: from.clone(),
                to: to.clone(),
                expr: Box::new(expr.resolve_literals(resolve)?),
            },
            RelExpr::Test(e, t) => RelExpr::Test(Box::new(e.resolve_literals(resolve)?), t.clone()),
        })
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

impl Stmt {
    pub fn assign(x: impl Into<String>, e: RelExpr) -> Self {
        Stmt::Assign(x.into(), e)
    }

    pub fn declare(x: impl Into<String>) -> Self {
        Stmt::Declare(x.into())
    }

    pub fn ret(e: RelExpr) -> Self {
        Stmt::Return(e)
    }

    pub fn then(self, next: Stmt) -> Self {
        Stmt::Seq(Box::new(self), Box::new(next))
    }

    /// Sequences statements right-nested: `a; (b; c)`. An empty list
    /// gives ⊤.
    pub fn seq(stmts: impl IntoIterator<Item = Stmt>) -> Self {
        let mut stmts: Vec<Stmt> = stmts.into_iter().collect();
        let Some(mut acc) = stmts.pop() else {
            return Stmt::Top;
        };
        while let Some(s) = stmts.pop() {
            acc = s.then(acc);
        }
        acc
    }

    /// The non-`Seq` statements in program order.
    pub fn flatten(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        self.flatten_into(&mut out);
        out
    }

    fn flatten_into<'a>(&'a self, out: &mut Vec<&'a Stmt>) {
        match self {
            Stmt::Seq(a, b) => {
                a.flatten_into(out);
                b.flatten_into(out);
            }
            s => out.push(s),
        }
    }

    /// Rebuilds the sequence tree right-nested.
    pub fn normalize(&self) -> Stmt {
        Stmt::seq(self.flatten().into_iter().cloned())
    }

    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            Stmt::Top | Stmt::Bottom | Stmt::Return(RelExpr::Resolved(_))
        )
    }

    pub fn resolve_literals<E>(
        &self,
        resolve: &mut impl FnMut(&str) -> Result<Arc<Dataset>, E>,
    ) -> Result<Stmt, E> {
        Ok(match self {
            Stmt::Top | Stmt::Bottom | Stmt::Declare(_) => self.clone(),
            Stmt::Assign(x, e) => Stmt::Assign(x.clone(), e.resolve_literals(resolve)?),
            Stmt::Return(e) => Stmt::Return(e.resolve_literals(resolve)?),
            Stmt::Seq(a, b) => Stmt::Seq(
                Box::new(a.resolve_literals(resolve)?),
                Box::new(b.resolve_literals(resolve)?),
            ),
        })
    }

    /// Dataset literal names used anywhere in the program.
    pub fn literals(&self) -> Vec<&str> {
        self.flatten()
            .into_iter()
            .flat_map(|s| match s {
                Stmt::Assign(_, e) | Stmt::Return(e) => e.literals(),
                _ => Vec::new(),
            })
            .collect()
    }

    /// Total node count of statements and their expressions.
    pub fn size(&self) -> usize {
        match self {
            Stmt::Top | Stmt::Bottom | Stmt::Declare(_) => 1,
            Stmt::Assign(_, e) | Stmt::Return(e) => 1 + e.size(),
            Stmt::Seq(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// The variable environment κ.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Environment {
    bindings: BTreeMap<String, Arc<Dataset>>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&Arc<Dataset>> {
        self.bindings.get(x)
    }

    /// κ[D/x]
    pub fn bind(&mut self, x: impl Into<String>, d: Arc<Dataset>) {
        self.bindings.insert(x.into(), d);
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Arc<Dataset>)> {
        self.bindings.iter()
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, d)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} = {d}")?;
        }
        f.write_str("}")
    }
}
