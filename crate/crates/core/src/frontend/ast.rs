//! TQL syntax trees. Every node carries the span it was parsed from;
//! hand-built trees use `Span::default()`.

use super::lexer::Span;
use crate::relation::CmpOp;

/// A variable, attribute, or dataset name with its location.
#[derive(Debug, Clone, PartialEq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name {
            text: text.into(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// `x`
    Free(Name),
    /// `x:{tp}`
    FreeTyped(Name, TypeSpec),
    /// `x = expr`
    Assign(Name, Expr),
    /// `x:{tp} = expr`
    AssignTyped(Name, TypeSpec, Expr),
    /// `return expr`
    Return(Expr),
}

/// A non-empty list of properties.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSpec {
    pub props: Vec<Prop>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prop {
    pub kind: PropKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropKind {
    /// `\/(pred)`
    Exists(Pred),
    /// `/\(pred)`
    Forall(Pred),
    /// `['a']`
    HasAttr(Name),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Union,
    Difference,
    Product,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Union => "+",
            BinOp::Difference => "-",
            BinOp::Product => "*",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Union | BinOp::Difference => 1,
            BinOp::Product => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Var(Name),
    /// `"name"`
    Lit(Name),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `e['a' -> 'b']`
    Rename(Box<Expr>, Name, Name),
    /// `e[pred]`
    Filter(Box<Expr>, Pred),
    /// `e['a'; 'b']`, never empty.
    Project(Box<Expr>, Vec<Name>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pred {
    pub kind: PredKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredKind {
    Cmp(Name, CmpOp, Rhs),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    Attr(Name),
    Num(f64),
}

// Builders for hand-written trees (tests, generators).

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt {
            kind,
            span: Span::default(),
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn var(x: &str) -> Self {
        Expr::new(ExprKind::Var(Name::new(x)))
    }

    pub fn lit(d: &str) -> Self {
        Expr::new(ExprKind::Lit(Name::new(d)))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Binary(op, Box::new(l), Box::new(r)))
    }
}

impl Pred {
    pub fn new(kind: PredKind) -> Self {
        Pred {
            kind,
            span: Span::default(),
        }
    }

    pub fn cmp_num(a: &str, op: CmpOp, n: f64) -> Self {
        Pred::new(PredKind::Cmp(Name::new(a), op, Rhs::Num(n)))
    }
}

impl TypeSpec {
    pub fn new(props: Vec<PropKind>) -> Self {
        TypeSpec {
            props: props
                .into_iter()
                .map(|kind| Prop {
                    kind,
                    span: Span::default(),
                })
                .collect(),
            span: Span::default(),
        }
    }
}

/// Resets every span in a tree, for comparisons that ignore locations.
pub trait EraseSpans {
    fn erase_spans(&mut self);

    fn without_spans(mut self) -> Self
    where
        Self: Sized,
    {
        self.erase_spans();
        self
    }
}

impl EraseSpans for Name {
    fn erase_spans(&mut self) {
        self.span = Span::default();
    }
}

impl EraseSpans for Program {
    fn erase_spans(&mut self) {
        self.stmts.iter_mut().for_each(EraseSpans::erase_spans);
    }
}

impl EraseSpans for Stmt {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            StmtKind::Free(x) => x.erase_spans(),
            StmtKind::FreeTyped(x, tp) => {
                x.erase_spans();
                tp.erase_spans();
            }
            StmtKind::Assign(x, e) => {
                x.erase_spans();
                e.erase_spans();
            }
            StmtKind::AssignTyped(x, tp, e) => {
                x.erase_spans();
                tp.erase_spans();
                e.erase_spans();
            }
            StmtKind::Return(e) => e.erase_spans(),
        }
    }
}

impl EraseSpans for TypeSpec {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        for p in &mut self.props {
            p.span = Span::default();
            match &mut p.kind {
                PropKind::Exists(phi) | PropKind::Forall(phi) => phi.erase_spans(),
                PropKind::HasAttr(a) => a.erase_spans(),
            }
        }
    }
}

impl EraseSpans for Expr {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Var(x) | ExprKind::Lit(x) => x.erase_spans(),
            ExprKind::Binary(_, l, r) => {
                l.erase_spans();
                r.erase_spans();
            }
            ExprKind::Rename(e, a, b) => {
                e.erase_spans();
                a.erase_spans();
                b.erase_spans();
            }
            ExprKind::Filter(e, phi) => {
                e.erase_spans();
                phi.erase_spans();
            }
            ExprKind::Project(e, attrs) => {
                e.erase_spans();
                attrs.iter_mut().for_each(EraseSpans::erase_spans);
            }
        }
    }
}

impl EraseSpans for Pred {
    fn erase_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            PredKind::Cmp(a, _, rhs) => {
                a.erase_spans();
                if let Rhs::Attr(b) = rhs {
                    b.erase_spans();
                }
            }
            PredKind::Not(p) => p.erase_spans(),
            PredKind::And(l, r) | PredKind::Or(l, r) => {
                l.erase_spans();
                r.erase_spans();
            }
        }
    }
}
