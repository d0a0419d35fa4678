//! Primitive relational operations.
//!
//! Every operation is total: an illegal application yields [`Null`] rather
//! than an error, so failures flow through evaluation as the ⊥ value.

use std::collections::BTreeSet;
use std::fmt;

use super::dataset::{Dataset, Row, Schema};
use super::predicate::{eval_predicate, Operand, Predicate, PredicateError};
use super::value::ColumnKind;

/// The failure value ⊥. The reason is diagnostic only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Null {
    pub reason: String,
}

impl Null {
    pub fn new(reason: impl Into<String>) -> Self {
        Null {
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Null {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "null ({})", self.reason)
    }
}

pub type RelResult = Result<Dataset, Null>;

/// A dynamically checked type ascription on a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeTest {
    HasAttributes(Vec<String>),
    Exists(Predicate),
    Forall(Predicate),
}

impl TypeTest {
    pub fn has(attr: impl Into<String>) -> Self {
        TypeTest::HasAttributes(vec![attr.into()])
    }
}

impl fmt::Display for TypeTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTest::HasAttributes(attrs) => f.write_str(&attrs.join(", ")),
            TypeTest::Exists(p) => write!(f, "exists({p})"),
            TypeTest::Forall(p) => write!(f, "forall({p})"),
        }
    }
}

fn union_compatible(d1: &Dataset, d2: &Dataset) -> Result<(), Null> {
    if !d1.schema().same_attribute_set(d2.schema()) {
        return Err(Null::new(format!(
            "not union compatible: [{}] vs [{}]",
            d1.attrs().join(", "),
            d2.attrs().join(", ")
        )));
    }
    for (attr, kind) in d1.attrs().iter().zip(d1.kinds()) {
        let other = d2.kind_of(attr).expect("attribute sets are equal");
        if other != *kind {
            return Err(Null::new(format!(
                "not union compatible: column `{attr}` is {kind} on the left and {other} on the right"
            )));
        }
    }
    Ok(())
}

pub fn union(d1: &Dataset, d2: &Dataset) -> RelResult {
    union_compatible(d1, d2)?;
    let mut rows = d1.rows().clone();
    rows.extend(d2.rows_in_order_of(d1.schema()));
    Ok(Dataset::from_parts(
        d1.schema().clone(),
        d1.kinds().to_vec(),
        rows,
    ))
}

pub fn difference(d1: &Dataset, d2: &Dataset) -> RelResult {
    union_compatible(d1, d2)?;
    let remove: BTreeSet<Row> = d2.rows_in_order_of(d1.schema()).collect();
    let rows = d1.rows().difference(&remove).cloned().collect();
    Ok(Dataset::from_parts(
        d1.schema().clone(),
        d1.kinds().to_vec(),
        rows,
    ))
}

pub fn product(d1: &Dataset, d2: &Dataset) -> RelResult {
    if !d1.schema().is_disjoint(d2.schema()) {
        let shared: Vec<&str> = d1
            .attrs()
            .iter()
            .filter(|a| d2.schema().contains(a))
            .map(String::as_str)
            .collect();
        return Err(Null::new(format!(
            "product operands share attributes: {}",
            shared.join(", ")
        )));
    }
    let schema =
        Schema::new(d1.attrs().iter().chain(d2.attrs()).cloned()).expect("schemas are disjoint");
    let kinds: Vec<ColumnKind> = d1.kinds().iter().chain(d2.kinds()).copied().collect();
    let mut rows = BTreeSet::new();
    for l in d1.rows() {
        for r in d2.rows() {
            let mut row = Vec::with_capacity(l.len() + r.len());
            row.extend_from_slice(l);
            row.extend_from_slice(r);
            rows.insert(row);
        }
    }
    Ok(Dataset::from_parts(schema, kinds, rows))
}

pub fn project<S: AsRef<str>>(d: &Dataset, attrs: &[S]) -> RelResult {
    let names: Vec<String> = attrs.iter().map(|a| a.as_ref().to_owned()).collect();
    if names.is_empty() {
        return Err(Null::new("empty projection list"));
    }
    let schema =
        Schema::new(names.clone()).map_err(|e| Null::new(format!("bad projection list: {e}")))?;
    check(d, &TypeTest::HasAttributes(names))?;
    let idx: Vec<usize> = schema
        .attrs()
        .iter()
        .map(|a| d.schema().index_of(a).expect("attribute test passed"))
        .collect();
    let kinds = idx.iter().map(|&i| d.kinds()[i]).collect();
    let rows = d
        .rows()
        .iter()
        .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
        .collect();
    Ok(Dataset::from_parts(schema, kinds, rows))
}

/// Keeps the rows satisfying `phi`. An empty result is ⊥, since selection
/// is premised on the existential test.
pub fn select(d: &Dataset, phi: &Predicate) -> RelResult {
    check(d, &TypeTest::Exists(phi.clone()))?;
    let mut rows = BTreeSet::new();
    for row in d.rows() {
        if eval_predicate(row, d.schema(), phi).map_err(pred_null)? {
            rows.insert(row.clone());
        }
    }
    Ok(Dataset::from_parts(
        d.schema().clone(),
        d.kinds().to_vec(),
        rows,
    ))
}

pub fn rename(d: &Dataset, from: &str, to: &str) -> RelResult {
    if from == to {
        return Err(Null::new(format!("cannot rename `{from}` to itself")));
    }
    if check(d, &TypeTest::has(to)).is_ok() {
        return Err(Null::new(format!("rename target `{to}` already exists")));
    }
    check(d, &TypeTest::has(from))?;
    let attrs = d
        .attrs()
        .iter()
        .map(|a| if a == from { to.to_owned() } else { a.clone() });
    let schema = Schema::new(attrs).expect("target name is fresh");
    Ok(Dataset::from_parts(
        schema,
        d.kinds().to_vec(),
        d.rows().clone(),
    ))
}

/// Returns `d` unchanged when it passes `t`, otherwise ⊥.
pub fn test(d: &Dataset, t: &TypeTest) -> RelResult {
    check(d, t).map(|()| d.clone())
}

/// The pass/fail decision behind [`test`], without copying the dataset.
pub fn check(d: &Dataset, t: &TypeTest) -> Result<(), Null> {
    match t {
        TypeTest::HasAttributes(attrs) => {
            let missing: Vec<&str> = attrs
                .iter()
                .filter(|a| !d.schema().contains(a))
                .map(String::as_str)
                .collect();
            if missing.is_empty() {
                Ok(())
            } else {
                Err(Null::new(format!(
                    "missing attributes: {}",
                    missing.join(", ")
                )))
            }
        }
        TypeTest::Exists(phi) => {
            check_predicate(d, phi)?;
            for row in d.rows() {
                if eval_predicate(row, d.schema(), phi).map_err(pred_null)? {
                    return Ok(());
                }
            }
            Err(Null::new(format!("no row satisfies {phi}")))
        }
        TypeTest::Forall(phi) => {
            check_predicate(d, phi)?;
            for row in d.rows() {
                if !eval_predicate(row, d.schema(), phi).map_err(pred_null)? {
                    return Err(Null::new(format!("some row violates {phi}")));
                }
            }
            Ok(())
        }
    }
}

/// Static check of attribute references and comparison kinds, so that an
/// ill-typed predicate is ⊥ even on a dataset with no rows.
fn check_predicate(d: &Dataset, phi: &Predicate) -> Result<(), Null> {
    match phi {
        Predicate::Cmp { attr, rhs, .. } => {
            let lhs = d
                .kind_of(attr)
                .ok_or_else(|| pred_null(PredicateError::UnknownAttribute(attr.clone())))?;
            let rhs_kind = match rhs {
                Operand::Attr(b) => d
                    .kind_of(b)
                    .ok_or_else(|| pred_null(PredicateError::UnknownAttribute(b.clone())))?,
                Operand::Value(v) => v.kind(),
            };
            if lhs != rhs_kind {
                return Err(pred_null(PredicateError::KindMismatch {
                    attr: attr.clone(),
                    lhs,
                    rhs: rhs_kind,
                }));
            }
            Ok(())
        }
        Predicate::Not(p) => check_predicate(d, p),
        Predicate::And(l, r) | Predicate::Or(l, r) => {
            check_predicate(d, l)?;
            check_predicate(d, r)
        }
    }
}

fn pred_null(e: PredicateError) -> Null {
    Null::new(e.to_string())
}
