//! Canonical TQL source rendering. `parse_program(&pretty_print(p))` gives
//! back `p` up to spans; parentheses are emitted only where precedence
//! requires them.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.stmts {
        stmt(&mut out, s);
        out.push_str(";\n");
    }
    out
}

fn stmt(out: &mut String, s: &Stmt) {
    match &s.kind {
        StmtKind::Free(x) => out.push_str(&x.text),
        StmtKind::FreeTyped(x, tp) => {
            out.push_str(&x.text);
            type_spec(out, tp);
        }
        StmtKind::Assign(x, e) => {
            let _ = write!(out, "{} = ", x.text);
            expr(out, e, 0);
        }
        StmtKind::AssignTyped(x, tp, e) => {
            out.push_str(&x.text);
            type_spec(out, tp);
            out.push_str(" = ");
            expr(out, e, 0);
        }
        StmtKind::Return(e) => {
            out.push_str("return ");
            expr(out, e, 0);
        }
    }
}

fn type_spec(out: &mut String, tp: &TypeSpec) {
    out.push_str(":{");
    for (i, p) in tp.props.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        match &p.kind {
            PropKind::Exists(phi) => {
                out.push_str("\\/(");
                pred(out, phi, 0);
                out.push(')');
            }
            PropKind::Forall(phi) => {
                out.push_str("/\\(");
                pred(out, phi, 0);
                out.push(')');
            }
            PropKind::HasAttr(a) => {
                let _ = write!(out, "['{}']", a.text);
            }
        }
    }
    out.push('}');
}

const POSTFIX: u8 = 3;

fn expr(out: &mut String, e: &Expr, min_prec: u8) {
    let prec = match &e.kind {
        ExprKind::Binary(op, ..) => op.precedence(),
        _ => POSTFIX,
    };
    let paren = prec < min_prec;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Var(x) => out.push_str(&x.text),
        ExprKind::Lit(d) => {
            let _ = write!(out, "\"{}\"", d.text);
        }
        ExprKind::Binary(op, l, r) => {
            expr(out, l, prec);
            let _ = write!(out, " {} ", op.symbol());
            expr(out, r, prec + 1);
        }
        ExprKind::Rename(inner, a, b) => {
            expr(out, inner, POSTFIX);
            let _ = write!(out, "['{}' -> '{}']", a.text, b.text);
        }
        ExprKind::Filter(inner, phi) => {
            expr(out, inner, POSTFIX);
            out.push('[');
            pred(out, phi, 0);
            out.push(']');
        }
        ExprKind::Project(inner, attrs) => {
            expr(out, inner, POSTFIX);
            out.push('[');
            for (i, a) in attrs.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                let _ = write!(out, "'{}'", a.text);
            }
            out.push(']');
        }
    }
    if paren {
        out.push(')');
    }
}

fn pred(out: &mut String, p: &Pred, min_prec: u8) {
    let prec = match &p.kind {
        PredKind::Or(..) => 1,
        PredKind::And(..) => 2,
        PredKind::Not(_) => 3,
        PredKind::Cmp(..) => 4,
    };
    let paren = prec < min_prec;
    if paren {
        out.push('(');
    }
    match &p.kind {
        PredKind::Cmp(a, op, rhs) => {
            let _ = write!(out, "'{}' {} ", a.text, op.symbol());
            match rhs {
                Rhs::Attr(b) => {
                    let _ = write!(out, "'{}'", b.text);
                }
                Rhs::Num(n) => {
                    let _ = write!(out, "{n}");
                }
            }
        }
        PredKind::Not(inner) => {
            out.push('!');
            pred(out, inner, 3);
        }
        PredKind::And(l, r) => {
            pred(out, l, 2);
            out.push_str(" && ");
            pred(out, r, 3);
        }
        PredKind::Or(l, r) => {
            pred(out, l, 1);
            out.push_str(" || ");
            pred(out, r, 2);
        }
    }
    if paren {
        out.push(')');
    }
}
