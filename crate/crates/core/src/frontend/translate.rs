use super::ast::*;
use crate::imprat::{RelExpr, Stmt as IrStmt};
use crate::relation::{Operand, Predicate, TypeTest, Value};

/// Translates a TQL program into ImpRAT, one statement at a time.
///
/// Declarations with a type (`t:{tp}`) become `!t; t := t{tp}`: the test
/// is applied by assigning the variable through it, which fails exactly
/// when the test fails and otherwise leaves the binding unchanged.
pub fn translate(program: &Program) -> IrStmt {
    IrStmt::seq(program.stmts.iter().flat_map(stmt))
}

fn stmt(s: &Stmt) -> Vec<IrStmt> {
    match &s.kind {
        StmtKind::Free(x) => vec![IrStmt::declare(&x.text)],
        StmtKind::FreeTyped(x, tp) => vec![IrStmt::declare(&x.text), self_test(&x.text, tp)],
        StmtKind::Assign(x, e) => vec![IrStmt::assign(&x.text, expr(e))],
        StmtKind::AssignTyped(x, tp, e) => {
            vec![IrStmt::assign(&x.text, expr(e)), self_test(&x.text, tp)]
        }
        StmtKind::Return(e) => vec![IrStmt::ret(expr(e))],
    }
}

fn self_test(x: &str, tp: &TypeSpec) -> IrStmt {
    IrStmt::assign(x, RelExpr::test(RelExpr::var(x), type_spec(tp)))
}

pub(crate) fn type_spec(tp: &TypeSpec) -> Vec<TypeTest> {
    tp.props
        .iter()
        .map(|p| match &p.kind {
            PropKind::Exists(phi) => TypeTest::Exists(pred(phi)),
            PropKind::Forall(phi) => TypeTest::Forall(pred(phi)),
            PropKind::HasAttr(a) => TypeTest::has(&a.text),
        })
        .collect()
}

pub(crate) fn expr(e: &Expr) -> RelExpr {
    match &e.kind {
        ExprKind::Var(x) => RelExpr::var(&x.text),
        ExprKind::Lit(d) => RelExpr::lit(&d.text),
        ExprKind::Binary(op, l, r) => {
            let (l, r) = (expr(l), expr(r));
            match op {
                BinOp::Union => RelExpr::union(l, r),
                BinOp::Difference => RelExpr::difference(l, r),
                BinOp::Product => RelExpr::product(l, r),
            }
        }
        ExprKind::Rename(inner, a, b) => RelExpr::rename(&a.text, &b.text, expr(inner)),
        ExprKind::Filter(inner, phi) => RelExpr::select(pred(phi), expr(inner)),
        ExprKind::Project(inner, attrs) => {
            RelExpr::project(attrs.iter().map(|a| a.text.clone()), expr(inner))
        }
    }
}

pub(crate) fn pred(p: &Pred) -> Predicate {
    match &p.kind {
        PredKind::Cmp(a, op, rhs) => Predicate::Cmp {
            attr: a.text.clone(),
            op: *op,
            rhs: match rhs {
                Rhs::Attr(b) => Operand::Attr(b.text.clone()),
                Rhs::Num(n) => Operand::Value(Value::num(*n)),
            },
        },
        PredKind::Not(inner) => Predicate::not(pred(inner)),
        PredKind::And(l, r) => Predicate::and(pred(l), pred(r)),
        PredKind::Or(l, r) => Predicate::or(pred(l), pred(r)),
    }
}
