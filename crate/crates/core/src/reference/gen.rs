//! Grammar-directed random generators. Everything is drawn from small
//! pools so that generated operations succeed often enough to be
//! interesting while still hitting every failure mode.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::frontend::{self as tql, BinOp, Name, PredKind, PropKind, Rhs, StmtKind};
use crate::imprat::{RelExpr, Stmt};
use crate::relation::{CmpOp, ColumnKind, Dataset, Operand, Predicate, Schema, TypeTest, Value};
use crate::repository::Repository;

/// Attribute pool with each attribute's usual kind.
pub const ATTRS: [(&str, ColumnKind); 4] = [
    ("a", ColumnKind::Number),
    ("b", ColumnKind::Number),
    ("c", ColumnKind::Text),
    ("d", ColumnKind::Number),
];

const TEXTS: [&str; 3] = ["p", "q", "r"];

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_datasets: usize,
    pub max_rows: usize,
    /// Statements per program, including the return.
    pub max_stmts: usize,
    pub max_free: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_datasets: 4,
            max_rows: 6,
            max_stmts: 6,
            max_free: 2,
            max_depth: 3,
        }
    }
}

fn value(rng: &mut impl Rng, kind: ColumnKind) -> Value {
    match kind {
        ColumnKind::Number => {
            Value::num(f64::from(rng.gen_range(0..4)) + if rng.gen_bool(0.1) { 0.5 } else { 0.0 })
        }
        ColumnKind::Text => Value::text(*TEXTS.choose(rng).unwrap()),
    }
}

fn attr(rng: &mut impl Rng) -> &'static str {
    ATTRS.choose(rng).unwrap().0
}

/// A dataset over 1–3 pool attributes, in random column order, with up to
/// `max_rows` rows. Occasionally a column takes the unusual kind.
pub fn dataset(rng: &mut impl Rng, max_rows: usize) -> Dataset {
    let mut cols: Vec<(&str, ColumnKind)> = ATTRS.to_vec();
    cols.shuffle(rng);
    cols.truncate(rng.gen_range(1..=3));
    for c in &mut cols {
        if rng.gen_bool(0.08) {
            c.1 = match c.1 {
                ColumnKind::Number => ColumnKind::Text,
                ColumnKind::Text => ColumnKind::Number,
            };
        }
    }
    let rows: Vec<Vec<Value>> = (0..rng.gen_range(0..=max_rows))
        .map(|_| cols.iter().map(|&(_, k)| value(rng, k)).collect())
        .collect();
    let schema = Schema::new(cols.iter().map(|c| c.0)).unwrap();
    Dataset::new(schema, cols.iter().map(|c| c.1).collect(), rows).unwrap()
}

/// 1 to `max_datasets` datasets named `d0`, `d1`, ...
pub fn repository(rng: &mut impl Rng, limits: &Limits) -> Repository {
    let n = rng.gen_range(1..=limits.max_datasets);
    Repository::from_datasets((0..n).map(|i| (format!("d{i}"), dataset(rng, limits.max_rows))))
}

pub fn predicate(rng: &mut impl Rng, depth: usize) -> Predicate {
    if depth == 0 || rng.gen_bool(0.6) {
        let (a, kind) = *ATTRS.choose(rng).unwrap();
        let op = *CmpOp::ALL.choose(rng).unwrap();
        let rhs = if rng.gen_bool(0.15) {
            Operand::Attr(attr(rng).to_owned())
        } else {
            // mostly the attribute's usual kind, sometimes a mismatch
            let k = if rng.gen_bool(0.95) {
                kind
            } else {
                ColumnKind::Text
            };
            Operand::Value(value(rng, k))
        };
        return Predicate::Cmp {
            attr: a.to_owned(),
            op,
            rhs,
        };
    }
    match rng.gen_range(0..3) {
        0 => Predicate::not(predicate(rng, depth - 1)),
        1 => Predicate::and(predicate(rng, depth - 1), predicate(rng, depth - 1)),
        _ => Predicate::or(predicate(rng, depth - 1), predicate(rng, depth - 1)),
    }
}

pub fn type_test(rng: &mut impl Rng) -> TypeTest {
    match rng.gen_range(0..3) {
        0 => TypeTest::has(attr(rng)),
        1 => TypeTest::Exists(predicate(rng, 1)),
        _ => TypeTest::Forall(predicate(rng, 1)),
    }
}

fn type_tests(rng: &mut impl Rng) -> Vec<TypeTest> {
    (0..rng.gen_range(1..=2)).map(|_| type_test(rng)).collect()
}

/// An expression whose leaves are drawn from `vars` and `literals` (at
/// least one of which must be non-empty). Literals appear as `Literal`
/// nodes.
pub fn expr(rng: &mut impl Rng, vars: &[String], literals: &[String], depth: usize) -> RelExpr {
    if depth == 0 || rng.gen_bool(0.5) {
        let use_var = !vars.is_empty() && (literals.is_empty() || rng.gen_bool(0.6));
        return if use_var {
            RelExpr::var(vars.choose(rng).unwrap())
        } else {
            RelExpr::lit(literals.choose(rng).unwrap())
        };
    }
    let sub = |rng: &mut _| expr(rng, vars, literals, depth - 1);
    match rng.gen_range(0..20) {
        0 | 1 => RelExpr::union(sub(rng), sub(rng)),
        2 | 3 => RelExpr::difference(sub(rng), sub(rng)),
        4 | 5 => RelExpr::product(sub(rng), sub(rng)),
        6..=9 => {
            let attrs: Vec<String> = (0..rng.gen_range(1..=2))
                .map(|_| attr(rng).to_owned())
                .collect();
            RelExpr::project(attrs, sub(rng))
        }
        10..=13 => RelExpr::select(predicate(rng, 1), sub(rng)),
        14..=16 => {
            // fresh targets keep renames (and later products) viable
            let to = if rng.gen_bool(0.5) {
                *["e", "f"].choose(rng).unwrap()
            } else {
                attr(rng)
            };
            RelExpr::rename(attr(rng), to, sub(rng))
        }
        17 => RelExpr::Null,
        _ => RelExpr::test(sub(rng), type_tests(rng)),
    }
}

/// A valid program over `repo`'s literals: at most `max_free` free
/// variables and `max_stmts` statements, ending in a return. Every
/// variable is introduced before use.
pub fn program(rng: &mut impl Rng, repo: &Repository, limits: &Limits) -> Stmt {
    let literals: Vec<String> = repo.names().map(str::to_owned).collect();
    let mut stmts = Vec::new();
    let mut defined: Vec<String> = Vec::new();
    let mut free = 0;
    let body = rng.gen_range(0..limits.max_stmts);
    for _ in 0..body {
        let roll = rng.gen_range(0..10);
        if roll < 4 && free < limits.max_free {
            let x = format!("x{free}");
            free += 1;
            stmts.push(Stmt::declare(&x));
            defined.push(x);
        } else if roll < 6 && !defined.is_empty() {
            // the shape a typed declaration translates to
            let x = defined.choose(rng).unwrap().clone();
            stmts.push(Stmt::assign(
                &x,
                RelExpr::test(RelExpr::var(&x), type_tests(rng)),
            ));
        } else {
            let e = expr(rng, &defined, &literals, limits.max_depth);
            let x = if !defined.is_empty() && rng.gen_bool(0.4) {
                defined.choose(rng).unwrap().clone()
            } else {
                format!("t{}", stmts.len())
            };
            stmts.push(Stmt::assign(&x, e));
            if !defined.contains(&x) {
                defined.push(x);
            }
        }
    }
    stmts.push(Stmt::ret(expr(rng, &defined, &literals, limits.max_depth)));
    Stmt::seq(stmts)
}

/// A program with no free variables.
pub fn closed_program(rng: &mut impl Rng, repo: &Repository, limits: &Limits) -> Stmt {
    program(
        rng,
        repo,
        &Limits {
            max_free: 0,
            ..*limits
        },
    )
}

/// Resolves literals against `repo`, panicking on unknown names.
pub fn resolve(s: &Stmt, repo: &Repository) -> Stmt {
    s.resolve_literals(&mut |n| repo.lookup(n).map(Arc::clone))
        .unwrap()
}

/// Datasets for each free variable of a program, drawn from `repo`.
pub fn inputs(rng: &mut impl Rng, repo: &Repository, arity: usize) -> Vec<Arc<Dataset>> {
    let all: Vec<&Arc<Dataset>> = repo.datasets().collect();
    (0..arity)
        .map(|_| Arc::clone(all.choose(rng).unwrap()))
        .collect()
}

// TQL syntax trees, for printer/parser round trips. These need not be
// meaningful programs, so names and numbers range widely.

fn ident(rng: &mut impl Rng) -> Name {
    const FIRST: &[char] = &['a', 'b', 'x', 'y', 't', '_', 'R', 'λ', 'é'];
    const REST: &[char] = &['a', 'z', '0', '9', '_', 'Q', 'ß'];
    loop {
        let mut s = String::new();
        s.push(*FIRST.choose(rng).unwrap());
        for _ in 0..rng.gen_range(0..6) {
            s.push(*REST.choose(rng).unwrap());
        }
        if s != "return" {
            return Name::new(s);
        }
    }
}

fn quoted_body(rng: &mut impl Rng, forbidden: char) -> Name {
    const CHARS: &[char] = &[
        'a', 'g', 'e', ' ', '-', '>', '_', '1', ';', ']', '[', '\\', '/', '"', '\'', 'ö', '中',
        '\t',
    ];
    let s: String = (0..rng.gen_range(0..8))
        .map(|_| *CHARS.choose(rng).unwrap())
        .filter(|&c| c != forbidden)
        .collect();
    Name::new(s)
}

fn number(rng: &mut impl Rng) -> f64 {
    let n = match rng.gen_range(0..5) {
        0 => f64::from(rng.gen_range(0..100)),
        1 => f64::from(rng.gen_range(0..10_000)) / 100.0,
        2 => rng.gen::<f64>() * 10f64.powi(rng.gen_range(-12..25)),
        3 => rng.gen::<f64>(),
        _ => 0.0,
    };
    if rng.gen_bool(0.3) {
        -n
    } else {
        n
    }
}

fn tql_pred(rng: &mut impl Rng, depth: usize) -> tql::Pred {
    if depth == 0 || rng.gen_bool(0.5) {
        let rhs = if rng.gen_bool(0.3) {
            Rhs::Attr(quoted_body(rng, '\''))
        } else {
            Rhs::Num(number(rng))
        };
        return tql::Pred::new(PredKind::Cmp(
            quoted_body(rng, '\''),
            *CmpOp::ALL.choose(rng).unwrap(),
            rhs,
        ));
    }
    let sub = |rng: &mut _| Box::new(tql_pred(rng, depth - 1));
    tql::Pred::new(match rng.gen_range(0..3) {
        0 => PredKind::Not(sub(rng)),
        1 => PredKind::And(sub(rng), sub(rng)),
        _ => PredKind::Or(sub(rng), sub(rng)),
    })
}

fn tql_type(rng: &mut impl Rng) -> tql::TypeSpec {
    let props = (0..rng.gen_range(1..=3))
        .map(|_| match rng.gen_range(0..3) {
            0 => PropKind::Exists(tql_pred(rng, 2)),
            1 => PropKind::Forall(tql_pred(rng, 2)),
            _ => PropKind::HasAttr(quoted_body(rng, '\'')),
        })
        .collect();
    tql::TypeSpec::new(props)
}

fn tql_expr(rng: &mut impl Rng, depth: usize) -> tql::Expr {
    use tql::ExprKind;
    if depth == 0 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.5) {
            tql::Expr::new(ExprKind::Var(ident(rng)))
        } else {
            tql::Expr::new(ExprKind::Lit(quoted_body(rng, '"')))
        };
    }
    let sub = |rng: &mut _| Box::new(tql_expr(rng, depth - 1));
    let kind = match rng.gen_range(0..6) {
        0 => ExprKind::Binary(BinOp::Union, sub(rng), sub(rng)),
        1 => ExprKind::Binary(BinOp::Difference, sub(rng), sub(rng)),
        2 => ExprKind::Binary(BinOp::Product, sub(rng), sub(rng)),
        3 => ExprKind::Rename(sub(rng), quoted_body(rng, '\''), quoted_body(rng, '\'')),
        4 => ExprKind::Filter(sub(rng), tql_pred(rng, 2)),
        _ => {
            let attrs = (0..rng.gen_range(1..=3))
                .map(|_| quoted_body(rng, '\''))
                .collect();
            ExprKind::Project(sub(rng), attrs)
        }
    };
    tql::Expr::new(kind)
}

/// A random TQL syntax tree with up to 6 statements, all spans default.
pub fn tql_program(rng: &mut impl Rng) -> tql::Program {
    let stmts = (0..rng.gen_range(0..=6))
        .map(|_| {
            tql::Stmt::new(match rng.gen_range(0..5) {
                0 => StmtKind::Free(ident(rng)),
                1 => StmtKind::FreeTyped(ident(rng), tql_type(rng)),
                2 => StmtKind::Assign(ident(rng), tql_expr(rng, 4)),
                3 => StmtKind::AssignTyped(ident(rng), tql_type(rng), tql_expr(rng, 4)),
                _ => StmtKind::Return(tql_expr(rng, 4)),
            })
        })
        .collect();
    tql::Program { stmts }
}
