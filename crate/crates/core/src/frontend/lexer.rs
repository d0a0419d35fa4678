use std::fmt;

use thiserror::Error;

/// A source location. `line` and `column` are 1-based and refer to the
/// first character; `start..end` is the byte range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl Span {
    /// Smallest span covering both.
    pub fn to(self, other: Span) -> Span {
        let (first, _) = if self.start <= other.start {
            (self, other)
        } else {
            (other, self)
        };
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
            line: first.line,
            column: first.column,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// `'...'`
    Attr(String),
    /// `"..."`
    Lit(String),
    Num(f64),
    Return,
    Plus,
    Minus,
    Star,
    EqEq,
    NotEq,
    Gt,
    Ge,
    Lt,
    Le,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Semi,
    Colon,
    Assign,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    /// `\/`
    Exists,
    /// `/\`
    Forall,
    Eof,
}

impl TokenKind {
    /// Short description used in "expected ..." messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Attr(s) => format!("attribute '{s}'"),
            TokenKind::Lit(s) => format!("dataset \"{s}\""),
            TokenKind::Num(n) => format!("number {n}"),
            TokenKind::Eof => "end of input".to_owned(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub(crate) fn symbol(&self) -> &'static str {
        match self {
            TokenKind::Return => "return",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::EqEq => "==",
            TokenKind::NotEq => "!=",
            TokenKind::Gt => ">",
            TokenKind::Ge => ">=",
            TokenKind::Lt => "<",
            TokenKind::Le => "<=",
            TokenKind::Bang => "!",
            TokenKind::AndAnd => "&&",
            TokenKind::OrOr => "||",
            TokenKind::Arrow => "->",
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::Assign => "=",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::Exists => "\\/",
            TokenKind::Forall => "/\\",
            TokenKind::Ident(_) => "identifier",
            TokenKind::Attr(_) => "attribute",
            TokenKind::Lit(_) => "dataset literal",
            TokenKind::Num(_) => "number",
            TokenKind::Eof => "end of input",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// The exact source text of the token.
    pub text: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            column: self.column,
        }
    }

    fn finish(&self, mut span: Span) -> Span {
        span.end = self.pos;
        span
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek2() == Some('-') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn quoted(&mut self, quote: char, start: Span) -> Result<String, LexError> {
        self.bump();
        let body_start = self.pos;
        loop {
            match self.peek() {
                Some(c) if c == quote => {
                    let body = self.src[body_start..self.pos].to_owned();
                    self.bump();
                    return Ok(body);
                }
                Some(_) => {
                    self.bump();
                }
                None => {
                    return Err(LexError {
                        span: Span {
                            end: start.start + 1,
                            ..start
                        },
                        message: format!("unterminated {quote}-quoted string"),
                    })
                }
            }
        }
    }

    fn number(&mut self, start: Span) -> Result<f64, LexError> {
        self.digits();
        if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            self.digits();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = (self.pos, self.line, self.column);
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.digits();
            } else {
                (self.pos, self.line, self.column) = save;
            }
        }
        let text = &self.src[start.start..self.pos];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(LexError {
                span: self.finish(start),
                message: format!("number `{text}` is out of range"),
            }),
        }
    }

    fn digits(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia();
        let start = self.mark();
        let Some(c) = self.peek() else {
            return Ok(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                span: start,
            });
        };
        let kind = match c {
            '\'' => TokenKind::Attr(self.quoted('\'', start)?),
            '"' => TokenKind::Lit(self.quoted('"', start)?),
            c if c.is_ascii_digit() => TokenKind::Num(self.number(start)?),
            c if c.is_alphabetic() || c == '_' => {
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.bump();
                }
                match &self.src[start.start..self.pos] {
                    "return" => TokenKind::Return,
                    word => TokenKind::Ident(word.to_owned()),
                }
            }
            _ => {
                let two = match (c, self.peek2()) {
                    ('=', Some('=')) => Some(TokenKind::EqEq),
                    ('!', Some('=')) => Some(TokenKind::NotEq),
                    ('>', Some('=')) => Some(TokenKind::Ge),
                    ('<', Some('=')) => Some(TokenKind::Le),
                    ('&', Some('&')) => Some(TokenKind::AndAnd),
                    ('|', Some('|')) => Some(TokenKind::OrOr),
                    ('-', Some('>')) => Some(TokenKind::Arrow),
                    ('\\', Some('/')) => Some(TokenKind::Exists),
                    ('/', Some('\\')) => Some(TokenKind::Forall),
                    _ => None,
                };
                if let Some(kind) = two {
                    self.bump();
                    self.bump();
                    kind
                } else {
                    let kind = match c {
                        '+' => TokenKind::Plus,
                        '-' => TokenKind::Minus,
                        '*' => TokenKind::Star,
                        '>' => TokenKind::Gt,
                        '<' => TokenKind::Lt,
                        '!' => TokenKind::Bang,
                        ';' => TokenKind::Semi,
                        ':' => TokenKind::Colon,
                        '=' => TokenKind::Assign,
                        '{' => TokenKind::LBrace,
                        '}' => TokenKind::RBrace,
                        '[' => TokenKind::LBracket,
                        ']' => TokenKind::RBracket,
                        '(' => TokenKind::LParen,
                        ')' => TokenKind::RParen,
                        other => {
                            self.bump();
                            return Err(LexError {
                                span: self.finish(start),
                                message: format!("unexpected character `{other}`"),
                            });
                        }
                    };
                    self.bump();
                    kind
                }
            }
        };
        let span = self.finish(start);
        Ok(Token {
            kind,
            text: self.src[span.start..span.end].to_owned(),
            span,
        })
    }
}

/// Splits TQL source into tokens, ending with a single `Eof` token.
///
/// Whitespace and `--` line comments are skipped. Quoted strings have no
/// escapes and may not contain their own quote character.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        let tok = lexer.next_token()?;
        let eof = tok.kind == TokenKind::Eof;
        out.push(tok);
        if eof {
            return Ok(out);
        }
    }
}
