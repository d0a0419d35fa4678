//! Relational algebra over plain vectors, written for obviousness rather
//! than speed: linear attribute lookup, nested loops, and duplicate removal
//! by scanning. Used as an oracle for the real operators.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use crate::imprat::{free_variables, RelExpr, Stmt};
use crate::relation::{
    CmpOp, ColumnKind, Dataset, Operand, Predicate, StructuralKey, TypeTest, Value,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub attrs: Vec<String>,
    pub kinds: Vec<ColumnKind>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn from_dataset(d: &Dataset) -> Table {
        Table {
            attrs: d.attrs().to_vec(),
            kinds: d.kinds().to_vec(),
            rows: d.rows().iter().cloned().collect(),
        }
    }

    fn col(&self, attr: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a == attr)
    }

    fn push_unique(&mut self, row: Vec<Value>) {
        if !self.rows.contains(&row) {
            self.rows.push(row);
        }
    }

    fn with_rows_of(&self, rows: impl IntoIterator<Item = Vec<Value>>) -> Table {
        let mut t = Table {
            attrs: self.attrs.clone(),
            kinds: self.kinds.clone(),
            rows: Vec::new(),
        };
        for r in rows {
            t.push_unique(r);
        }
        t
    }

    /// Comparable with [`Dataset::structural_key`].
    pub fn canonical(&self) -> StructuralKey {
        let mut order: Vec<usize> = (0..self.attrs.len()).collect();
        order.sort_by(|&i, &j| self.attrs[i].cmp(&self.attrs[j]));
        StructuralKey {
            attrs: order.iter().map(|&i| self.attrs[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| order.iter().map(|&i| r[i].clone()).collect())
                .collect(),
        }
    }

    /// `other`'s row reordered into this table's column order.
    fn align(&self, other: &Table, row: &[Value]) -> Vec<Value> {
        self.attrs
            .iter()
            .map(|a| row[other.col(a).unwrap()].clone())
            .collect()
    }
}

fn compatible(a: &Table, b: &Table) -> bool {
    a.attrs.len() == b.attrs.len()
        && a.attrs
            .iter()
            .zip(&a.kinds)
            .all(|(name, kind)| b.col(name).is_some_and(|j| b.kinds[j] == *kind))
}

pub fn union(a: &Table, b: &Table) -> Option<Table> {
    if !compatible(a, b) {
        return None;
    }
    let mut out = a.clone();
    for r in &b.rows {
        out.push_unique(a.align(b, r));
    }
    Some(out)
}

pub fn difference(a: &Table, b: &Table) -> Option<Table> {
    if !compatible(a, b) {
        return None;
    }
    let removed: Vec<Vec<Value>> = b.rows.iter().map(|r| a.align(b, r)).collect();
    Some(a.with_rows_of(a.rows.iter().filter(|r| !removed.contains(r)).cloned()))
}

pub fn product(a: &Table, b: &Table) -> Option<Table> {
    if a.attrs.iter().any(|x| b.attrs.contains(x)) {
        return None;
    }
    let mut out = Table {
        attrs: a.attrs.iter().chain(&b.attrs).cloned().collect(),
        kinds: a.kinds.iter().chain(&b.kinds).copied().collect(),
        rows: Vec::new(),
    };
    for l in &a.rows {
        for r in &b.rows {
            out.push_unique(l.iter().chain(r).cloned().collect());
        }
    }
    Some(out)
}

pub fn project(t: &Table, attrs: &[String]) -> Option<Table> {
    if attrs.is_empty() {
        return None;
    }
    for (i, a) in attrs.iter().enumerate() {
        if attrs[..i].contains(a) {
            return None;
        }
    }
    let idx: Vec<usize> = attrs.iter().map(|a| t.col(a)).collect::<Option<_>>()?;
    let mut out = Table {
        attrs: attrs.to_vec(),
        kinds: idx.iter().map(|&i| t.kinds[i]).collect(),
        rows: Vec::new(),
    };
    for r in &t.rows {
        out.push_unique(idx.iter().map(|&i| r[i].clone()).collect());
    }
    Some(out)
}

fn well_typed(t: &Table, phi: &Predicate) -> bool {
    match phi {
        Predicate::Cmp { attr, rhs, .. } => {
            let Some(i) = t.col(attr) else { return false };
            match rhs {
                Operand::Attr(b) => t.col(b).is_some_and(|j| t.kinds[j] == t.kinds[i]),
                Operand::Value(v) => v.kind() == t.kinds[i],
            }
        }
        Predicate::Not(p) => well_typed(t, p),
        Predicate::And(l, r) | Predicate::Or(l, r) => well_typed(t, l) && well_typed(t, r),
    }
}

fn compare(l: &Value, r: &Value) -> Ordering {
    match (l, r) {
        (Value::Number(a), Value::Number(b)) => a.partial_cmp(b).unwrap(),
        (Value::Text(a), Value::Text(b)) => a.as_bytes().cmp(b.as_bytes()),
        _ => panic!("ill-typed comparison reached evaluation"),
    }
}

fn holds(t: &Table, row: &[Value], phi: &Predicate) -> bool {
    match phi {
        Predicate::Cmp { attr, op, rhs } => {
            let l = &row[t.col(attr).unwrap()];
            let r = match rhs {
                Operand::Attr(b) => &row[t.col(b).unwrap()],
                Operand::Value(v) => v,
            };
            let ord = compare(l, r);
            match op {
                CmpOp::Eq => ord == Ordering::Equal,
                CmpOp::Ne => ord != Ordering::Equal,
                CmpOp::Gt => ord == Ordering::Greater,
                CmpOp::Ge => ord != Ordering::Less,
                CmpOp::Lt => ord == Ordering::Less,
                CmpOp::Le => ord != Ordering::Greater,
            }
        }
        Predicate::Not(p) => !holds(t, row, p),
        Predicate::And(l, r) => holds(t, row, l) && holds(t, row, r),
        Predicate::Or(l, r) => holds(t, row, l) || holds(t, row, r),
    }
}

/// Selection; no surviving row is ⊥.
pub fn select(t: &Table, phi: &Predicate) -> Option<Table> {
    if !well_typed(t, phi) {
        return None;
    }
    let out = t.with_rows_of(t.rows.iter().filter(|r| holds(t, r, phi)).cloned());
    (!out.rows.is_empty()).then_some(out)
}

pub fn rename(t: &Table, from: &str, to: &str) -> Option<Table> {
    if from == to || t.col(to).is_some() {
        return None;
    }
    let i = t.col(from)?;
    let mut out = t.clone();
    out.attrs[i] = to.to_owned();
    Some(out)
}

pub fn passes(t: &Table, test: &TypeTest) -> bool {
    match test {
        TypeTest::HasAttributes(attrs) => attrs.iter().all(|a| t.col(a).is_some()),
        TypeTest::Exists(phi) => well_typed(t, phi) && t.rows.iter().any(|r| holds(t, r, phi)),
        TypeTest::Forall(phi) => well_typed(t, phi) && t.rows.iter().all(|r| holds(t, r, phi)),
    }
}

pub fn eval(e: &RelExpr, env: &HashMap<String, Table>) -> Option<Table> {
    match e {
        RelExpr::Resolved(d) => Some(Table::from_dataset(d)),
        RelExpr::Var(x) => Some(env[x].clone()),
        RelExpr::Null => None,
        RelExpr::Literal(name) => panic!("unresolved literal {name}"),
        RelExpr::Union(l, r) => union(&eval(l, env)?, &eval(r, env)?),
        RelExpr::Difference(l, r) => difference(&eval(l, env)?, &eval(r, env)?),
        RelExpr::Product(l, r) => product(&eval(l, env)?, &eval(r, env)?),
        RelExpr::Project(attrs, inner) => project(&eval(inner, env)?, attrs),
        RelExpr::Select(phi, inner) => select(&eval(inner, env)?, phi),
        RelExpr::Rename { from, to, expr } => rename(&eval(expr, env)?, from, to),
        RelExpr::Test(inner, tests) => {
            let t = eval(inner, env)?;
            tests.iter().all(|test| passes(&t, test)).then_some(t)
        }
    }
}

/// Runs a program whose literals are resolved. `None` covers both ⊥ and
/// finishing without a return.
pub fn run(s: &Stmt, inputs: &[Arc<Dataset>]) -> Option<Table> {
    let vars = free_variables(s).expect("reference programs are valid");
    assert_eq!(vars.len(), inputs.len(), "one input per free variable");
    let mut env: HashMap<String, Table> = vars
        .into_iter()
        .zip(inputs.iter().map(|d| Table::from_dataset(d)))
        .collect();
    for stmt in s.flatten() {
        match stmt {
            Stmt::Top | Stmt::Declare(_) => {}
            Stmt::Bottom => return None,
            Stmt::Assign(x, e) => {
                let v = eval(e, &env)?;
                env.insert(x.clone(), v);
            }
            Stmt::Return(e) => return eval(e, &env),
            Stmt::Seq(..) => unreachable!(),
        }
    }
    None
}
