use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use super::dataset::Schema;
use super::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Gt,
    Ge,
    Lt,
    Le,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Gt,
        CmpOp::Ge,
        CmpOp::Lt,
        CmpOp::Le,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Right-hand side of a comparison leaf.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Attr(String),
    Value(Value),
}

/// Boolean expression over attribute comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    Cmp {
        attr: String,
        op: CmpOp,
        rhs: Operand,
    },
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub fn attr_cmp_attr(lhs: impl Into<String>, op: CmpOp, rhs: impl Into<String>) -> Self {
        Predicate::Cmp {
            attr: lhs.into(),
            op,
            rhs: Operand::Attr(rhs.into()),
        }
    }

    pub fn attr_cmp_val(lhs: impl Into<String>, op: CmpOp, rhs: Value) -> Self {
        Predicate::Cmp {
            attr: lhs.into(),
            op,
            rhs: Operand::Value(rhs),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Predicate) -> Self {
        Predicate::Not(Box::new(p))
    }

    pub fn and(l: Predicate, r: Predicate) -> Self {
        Predicate::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Predicate, r: Predicate) -> Self {
        Predicate::Or(Box::new(l), Box::new(r))
    }

    /// Attribute names referenced anywhere in the tree.
    pub fn attributes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_attrs(&mut out);
        out
    }

    fn collect_attrs<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Predicate::Cmp { attr, rhs, .. } => {
                out.push(attr);
                if let Operand::Attr(b) = rhs {
                    out.push(b);
                }
            }
            Predicate::Not(p) => p.collect_attrs(out),
            Predicate::And(l, r) | Predicate::Or(l, r) => {
                l.collect_attrs(out);
                r.collect_attrs(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredicateError {
    #[error("predicate references unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("cannot compare {lhs} with {rhs} in `{attr}`")]
    KindMismatch {
        attr: String,
        lhs: super::ColumnKind,
        rhs: super::ColumnKind,
    },
}

/// Evaluates `phi` against one row.
///
/// All leaves are evaluated, without short-circuiting, so that a bad
/// attribute reference is reported no matter which branch decides the
/// result.
pub fn eval_predicate(
    row: &[Value],
    schema: &Schema,
    phi: &Predicate,
) -> Result<bool, PredicateError> {
    match phi {
        Predicate::Cmp { attr, op, rhs } => {
            let lhs = lookup(row, schema, attr)?;
            let rhs = match rhs {
                Operand::Attr(b) => lookup(row, schema, b)?,
                Operand::Value(v) => v,
            };
            match lhs.compare(rhs) {
                Some(ord) => Ok(op.holds(ord)),
                None => Err(PredicateError::KindMismatch {
                    attr: attr.clone(),
                    lhs: lhs.kind(),
                    rhs: rhs.kind(),
                }),
            }
        }
        Predicate::Not(p) => Ok(!eval_predicate(row, schema, p)?),
        Predicate::And(l, r) => {
            let l = eval_predicate(row, schema, l)?;
            let r = eval_predicate(row, schema, r)?;
            Ok(l && r)
        }
        Predicate::Or(l, r) => {
            let l = eval_predicate(row, schema, l)?;
            let r = eval_predicate(row, schema, r)?;
            Ok(l || r)
        }
    }
}

fn lookup<'a>(row: &'a [Value], schema: &Schema, attr: &str) -> Result<&'a Value, PredicateError> {
    schema
        .index_of(attr)
        .map(|i| &row[i])
        .ok_or_else(|| PredicateError::UnknownAttribute(attr.to_owned()))
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Attr(a) => f.write_str(a),
            Operand::Value(Value::Text(s)) => write!(f, "\"{s}\""),
            Operand::Value(Value::Number(n)) => write!(f, "{n}"),
        }
    }
}

/// ASCII rendering used by the IR printer, fully parenthesizing binary
/// connectives.
impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Cmp { attr, op, rhs } => write!(f, "{attr} {op} {rhs}"),
            Predicate::Not(p) => write!(f, "!({p})"),
            Predicate::And(l, r) => write!(f, "({l} && {r})"),
            Predicate::Or(l, r) => write!(f, "({l} || {r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn age_schema() -> Schema {
        Schema::new(["age"]).unwrap()
    }

    #[test]
    fn direct_comparison() {
        let phi = Predicate::attr_cmp_val("age", CmpOp::Ge, Value::num(30.0));
        assert!(eval_predicate(&[Value::num(30.0)], &age_schema(), &phi).unwrap());
    }

    #[test]
    fn negated_equality() {
        let phi = Predicate::not(Predicate::attr_cmp_val("age", CmpOp::Eq, Value::num(30.0)));
        assert!(!eval_predicate(&[Value::num(30.0)], &age_schema(), &phi).unwrap());
    }

    // Truth-table oracle: evaluate each leaf by hand, then combine.
    #[test]
    fn conjunction_against_truth_table() {
        let gt = Predicate::attr_cmp_val("age", CmpOp::Gt, Value::num(20.0));
        let lt = Predicate::attr_cmp_val("age", CmpOp::Lt, Value::num(25.0));
        let schema = age_schema();
        for age in [10.0, 20.0, 22.0, 25.0, 30.0] {
            let row = [Value::num(age)];
            let expected_and = (age > 20.0) && (age < 25.0);
            let expected_or = (age > 20.0) || (age < 25.0);
            let and = Predicate::and(gt.clone(), lt.clone());
            let or = Predicate::or(gt.clone(), lt.clone());
            assert_eq!(
                eval_predicate(&row, &schema, &and).unwrap(),
                expected_and,
                "age={age}"
            );
            assert_eq!(
                eval_predicate(&row, &schema, &or).unwrap(),
                expected_or,
                "age={age}"
            );
        }
        let and = Predicate::and(gt, lt);
        assert!(!eval_predicate(&[Value::num(30.0)], &schema, &and).unwrap());
    }

    #[test]
    fn every_operator_on_numbers_and_text() {
        let schema = Schema::new(["a", "b"]).unwrap();
        let cases = [(1.0, 2.0), (2.0, 2.0), (3.0, 2.0)];
        for (x, y) in cases {
            let row = [Value::num(x), Value::num(y)];
            let trow = [Value::text(format!("{x}")), Value::text(format!("{y}"))];
            for op in CmpOp::ALL {
                let expected = match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                };
                let phi = Predicate::attr_cmp_attr("a", op, "b");
                assert_eq!(eval_predicate(&row, &schema, &phi).unwrap(), expected);
                // single-digit strings order the same way as the numbers
                assert_eq!(eval_predicate(&trow, &schema, &phi).unwrap(), expected);
            }
        }
    }

    #[test]
    fn text_number_mismatch_is_an_error() {
        let schema = Schema::new(["name"]).unwrap();
        let phi = Predicate::attr_cmp_val("name", CmpOp::Eq, Value::num(1.0));
        assert!(matches!(
            eval_predicate(&[Value::text("x")], &schema, &phi),
            Err(PredicateError::KindMismatch { .. })
        ));
    }

    #[test]
    fn missing_attribute_is_an_error_even_in_dead_branch() {
        let phi = Predicate::or(
            Predicate::attr_cmp_val("age", CmpOp::Gt, Value::num(0.0)),
            Predicate::attr_cmp_val("salary", CmpOp::Gt, Value::num(0.0)),
        );
        assert_eq!(
            eval_predicate(&[Value::num(5.0)], &age_schema(), &phi),
            Err(PredicateError::UnknownAttribute("salary".into()))
        );
    }
}
