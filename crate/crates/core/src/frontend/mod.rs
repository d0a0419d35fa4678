//! TQL, the surface query language: lexer, parser, canonical printer, and
//! translation into ImpRAT.
//!
//! Beyond the core grammar the parser accepts `--` line comments,
//! parentheses around expressions and predicates, and a trailing `;`.

mod ast;
mod lexer;
mod parser;
mod pretty;
mod translate;

use thiserror::Error;

pub use ast::{
    BinOp, EraseSpans, Expr, ExprKind, Name, Pred, PredKind, Program, Prop, PropKind, Rhs, Stmt,
    StmtKind, TypeSpec,
};
pub use lexer::{tokenize, LexError, Span, Token, TokenKind};
pub use parser::{parse, ParseError};
pub use pretty::pretty_print;
pub use translate::translate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("lexical error at {0}")]
    Lex(#[from] LexError),
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
}

impl FrontendError {
    pub fn span(&self) -> Span {
        match self {
            FrontendError::Lex(e) => e.span,
            FrontendError::Parse(e) => e.span,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            FrontendError::Lex(e) => &e.message,
            FrontendError::Parse(e) => &e.message,
        }
    }
}

/// Tokenizes and parses in one go.
pub fn parse_program(source: &str) -> Result<Program, FrontendError> {
    Ok(parse(&tokenize(source)?)?)
}

/// Source text straight to ImpRAT.
pub fn compile(source: &str) -> Result<crate::imprat::Stmt, FrontendError> {
    parse_program(source).map(|p| translate(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ir(src: &str) -> String {
        compile(src).unwrap().to_string()
    }

    #[test]
    fn free_declaration() {
        assert_eq!(ir("x; return x"), "!x; ret x");
    }

    #[test]
    fn rename() {
        assert_eq!(
            ir(r#"x = "d"['a'->'b']; return x"#),
            "x := rho[a/b](\"d\"); ret x"
        );
    }

    #[test]
    fn typed_declaration_desugars_to_self_test() {
        assert_eq!(
            ir(r"t:{/\('age'>0)}; return t"),
            "!t; t := t{forall(age > 0)}; ret t"
        );
    }

    #[test]
    fn free_variable_order_is_declaration_order() {
        let s = compile("b; a:{['k']}; c = a + b; z; return c * z").unwrap();
        assert_eq!(crate::imprat::free_variables(&s).unwrap(), ["b", "a", "z"]);
    }

    #[test]
    fn error_display_has_position() {
        let e = parse_program("x = \n  \"open").unwrap_err();
        assert_eq!(
            e.to_string(),
            "lexical error at 2:3: unterminated \"-quoted string"
        );
    }
}
