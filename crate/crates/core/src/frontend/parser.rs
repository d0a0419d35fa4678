use thiserror::Error;

use super::ast::*;
use super::lexer::{Span, Token, TokenKind};
use crate::relation::CmpOp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    /// What would have been accepted at `span`.
    pub expected: Vec<String>,
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

fn cmp_op(kind: &TokenKind) -> Option<CmpOp> {
    Some(match kind {
        TokenKind::EqEq => CmpOp::Eq,
        TokenKind::NotEq => CmpOp::Ne,
        TokenKind::Gt => CmpOp::Gt,
        TokenKind::Ge => CmpOp::Ge,
        TokenKind::Lt => CmpOp::Lt,
        TokenKind::Le => CmpOp::Le,
        _ => return None,
    })
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, k: usize) -> &'t TokenKind {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].kind
    }

    fn advance(&mut self) -> &'t Token {
        let t = self.peek();
        if t.kind != TokenKind::Eof {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        let expected: Vec<String> = expected.iter().map(|s| (*s).to_owned()).collect();
        ParseError {
            span: t.span,
            message: format!(
                "expected {}, found {}",
                expected.join(" or "),
                t.kind.describe()
            ),
            expected,
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.peek().kind == kind {
            Ok(self.advance().span)
        } else {
            Err(self.error(&[&format!("`{}`", kind.symbol())]))
        }
    }

    fn attr(&mut self) -> PResult<Name> {
        match &self.peek().kind {
            TokenKind::Attr(a) => {
                let span = self.advance().span;
                Ok(Name {
                    text: a.clone(),
                    span,
                })
            }
            _ => Err(self.error(&["attribute"])),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut stmts = Vec::new();
        while self.peek().kind != TokenKind::Eof {
            stmts.push(self.stmt()?);
            if !self.eat(&TokenKind::Semi) && self.peek().kind != TokenKind::Eof {
                return Err(self.error(&["`;`", "end of input"]));
            }
        }
        Ok(Program { stmts })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.peek().span;
        let kind = match &self.peek().kind {
            TokenKind::Return => {
                self.advance();
                StmtKind::Return(self.expr()?)
            }
            TokenKind::Ident(x) => {
                let var = Name {
                    text: x.clone(),
                    span: self.advance().span,
                };
                if self.eat(&TokenKind::Colon) {
                    let tp = self.type_spec()?;
                    if self.eat(&TokenKind::Assign) {
                        StmtKind::AssignTyped(var, tp, self.expr()?)
                    } else {
                        StmtKind::FreeTyped(var, tp)
                    }
                } else if self.eat(&TokenKind::Assign) {
                    StmtKind::Assign(var, self.expr()?)
                } else {
                    StmtKind::Free(var)
                }
            }
            _ => return Err(self.error(&["identifier", "`return`"])),
        };
        Ok(Stmt {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn type_spec(&mut self) -> PResult<TypeSpec> {
        let start = self.expect(TokenKind::LBrace)?;
        let mut props = vec![self.prop()?];
        while self.eat(&TokenKind::Semi) {
            props.push(self.prop()?);
        }
        let end = self.expect(TokenKind::RBrace)?;
        Ok(TypeSpec {
            props,
            span: start.to(end),
        })
    }

    fn prop(&mut self) -> PResult<Prop> {
        let start = self.peek().span;
        let kind = match self.peek().kind {
            TokenKind::Exists | TokenKind::Forall => {
                let exists = self.advance().kind == TokenKind::Exists;
                self.expect(TokenKind::LParen)?;
                let phi = self.pred()?;
                self.expect(TokenKind::RParen)?;
                if exists {
                    PropKind::Exists(phi)
                } else {
                    PropKind::Forall(phi)
                }
            }
            TokenKind::LBracket => {
                self.advance();
                let a = self.attr()?;
                self.expect(TokenKind::RBracket)?;
                PropKind::HasAttr(a)
            }
            _ => return Err(self.error(&["`\\/`", "`/\\`", "`[`"])),
        };
        Ok(Prop {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    // Precedence climbing over left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = if min_prec > 2 {
            self.postfix()?
        } else {
            self.binary(min_prec + 1)?
        };
        if min_prec > 2 {
            return Ok(lhs);
        }
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinOp::Union,
                TokenKind::Minus => BinOp::Difference,
                TokenKind::Star => BinOp::Product,
                _ => return Ok(lhs),
            };
            if op.precedence() != min_prec {
                return Ok(lhs);
            }
            self.advance();
            let rhs = self.binary(min_prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.eat(&TokenKind::LBracket) {
            let inner = Box::new(e);
            let kind = match (self.peek_at(0), self.peek_at(1)) {
                (TokenKind::Attr(_), TokenKind::Arrow) => {
                    let from = self.attr()?;
                    self.advance();
                    let to = self.attr()?;
                    ExprKind::Rename(inner, from, to)
                }
                (TokenKind::Attr(_), TokenKind::Semi | TokenKind::RBracket) => {
                    let mut attrs = vec![self.attr()?];
                    while self.eat(&TokenKind::Semi) {
                        attrs.push(self.attr()?);
                    }
                    ExprKind::Project(inner, attrs)
                }
                (TokenKind::Attr(_), k) if cmp_op(k).is_some() => {
                    ExprKind::Filter(inner, self.pred()?)
                }
                (TokenKind::Bang | TokenKind::LParen, _) => ExprKind::Filter(inner, self.pred()?),
                (TokenKind::Attr(_), _) => {
                    self.advance();
                    return Err(self.error(&["`->`", "comparison operator", "`;`", "`]`"]));
                }
                _ => return Err(self.error(&["attribute", "`!`", "`(`"])),
            };
            let end = self.expect(TokenKind::RBracket)?;
            let span = match &kind {
                ExprKind::Rename(e, ..) | ExprKind::Filter(e, _) | ExprKind::Project(e, _) => {
                    e.span.to(end)
                }
                _ => unreachable!(),
            };
            e = Expr { kind, span };
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek();
        match &t.kind {
            TokenKind::Ident(x) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Var(Name {
                        text: x.clone(),
                        span: t.span,
                    }),
                    span: t.span,
                })
            }
            TokenKind::Lit(d) => {
                self.advance();
                Ok(Expr {
                    kind: ExprKind::Lit(Name {
                        text: d.clone(),
                        span: t.span,
                    }),
                    span: t.span,
                })
            }
            TokenKind::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            _ => Err(self.error(&["identifier", "dataset literal", "`(`"])),
        }
    }

    fn pred(&mut self) -> PResult<Pred> {
        let mut lhs = self.conj()?;
        while self.eat(&TokenKind::OrOr) {
            let rhs = self.conj()?;
            let span = lhs.span.to(rhs.span);
            lhs = Pred {
                kind: PredKind::Or(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> PResult<Pred> {
        let mut lhs = self.unary()?;
        while self.eat(&TokenKind::AndAnd) {
            let rhs = self.unary()?;
            let span = lhs.span.to(rhs.span);
            lhs = Pred {
                kind: PredKind::And(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Pred> {
        let start = self.peek().span;
        match self.peek().kind {
            TokenKind::Bang => {
                self.advance();
                let p = self.unary()?;
                let span = start.to(p.span);
                Ok(Pred {
                    kind: PredKind::Not(Box::new(p)),
                    span,
                })
            }
            TokenKind::LParen => {
                self.advance();
                let p = self.pred()?;
                self.expect(TokenKind::RParen)?;
                Ok(p)
            }
            TokenKind::Attr(_) => {
                let a = self.attr()?;
                let Some(op) = cmp_op(&self.peek().kind) else {
                    return Err(self.error(&["comparison operator"]));
                };
                self.advance();
                let rhs = match self.peek().kind {
                    TokenKind::Attr(_) => Rhs::Attr(self.attr()?),
                    TokenKind::Num(n) => {
                        self.advance();
                        Rhs::Num(n)
                    }
                    TokenKind::Minus if matches!(self.peek_at(1), TokenKind::Num(_)) => {
                        self.advance();
                        let TokenKind::Num(n) = self.advance().kind else {
                            unreachable!()
                        };
                        Rhs::Num(-n)
                    }
                    _ => return Err(self.error(&["attribute", "number"])),
                };
                Ok(Pred {
                    kind: PredKind::Cmp(a, op, rhs),
                    span: start.to(self.prev_span()),
                })
            }
            _ => Err(self.error(&["attribute", "`!`", "`(`"])),
        }
    }
}

/// Parses a token stream (as produced by [`tokenize`](super::tokenize)).
pub fn parse(tokens: &[Token]) -> Result<Program, ParseError> {
    assert!(
        tokens.last().is_some_and(|t| t.kind == TokenKind::Eof),
        "token stream must end with Eof"
    );
    Parser {
        toks: tokens,
        pos: 0,
    }
    .program()
}
