//! Canonical ASCII rendering of ImpRAT programs.
//!
//! ```text
//! !x; x := sigma[age > 30](x); ret pi[name](x{forall(age >= 18)})
//! ```

use std::fmt;

use super::ast::{RelExpr, Stmt};

impl fmt::Display for RelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelExpr::Literal(name) => write!(f, "\"{name}\""),
            RelExpr::Var(x) => f.write_str(x),
            RelExpr::Union(l, r) => write!(f, "({l} union {r})"),
            RelExpr::Difference(l, r) => write!(f, "({l} minus {r})"),
            RelExpr::Product(l, r) => write!(f, "({l} times {r})"),
            RelExpr::Project(attrs, e) => write!(f, "pi[{}]({e})", attrs.join(", ")),
            RelExpr::Select(phi, e) => write!(f, "sigma[{phi}]({e})"),
            RelExpr::Rename { from, to, expr } => write!(f, "rho[{from}/{to}]({expr})"),
            RelExpr::Test(e, tests) => {
                write!(f, "{e}{{")?;
                for (i, t) in tests.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("}")
            }
            RelExpr::Null => f.write_str("bot"),
            RelExpr::Resolved(d) => write!(f, "<{d}>"),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Top => f.write_str("top"),
            Stmt::Bottom => f.write_str("bot"),
            Stmt::Assign(x, e) => write!(f, "{x} := {e}"),
            Stmt::Declare(x) => write!(f, "!{x}"),
            Stmt::Seq(a, b) => write!(f, "{a}; {b}"),
            Stmt::Return(e) => write!(f, "ret {e}"),
        }
    }
}
