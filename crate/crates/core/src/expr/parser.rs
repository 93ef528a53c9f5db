use std::fmt;

use super::{BinOp, Constant, Expr, Func};

/// A syntax error. `offset` is a byte offset into the input; it equals the
/// input length when the input ended too early.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.message, self.offset)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

const OPERAND: &[&str] = &["number", "x", "constant", "function", "(", "-"];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    tok: Tok::Op(c as char),
                    offset: start,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token { tok: Tok::LParen, offset: start });
                i += 1;
            }
            b')' => {
                out.push(Token { tok: Tok::RParen, offset: start });
                i += 1;
            }
            b',' => {
                out.push(Token { tok: Tok::Comma, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent only when digits follow; `2e` is the number 2
                // followed by the constant e.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number"],
                    message: format!("malformed number '{lit}'"),
                })?;
                out.push(Token { tok: Tok::Num(v), offset: start });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    expected: Vec::new(),
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str], message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.peek().offset,
            expected: expected.to_vec(),
            message: message.into(),
        }
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        let what = match &self.peek().tok {
            Tok::Eof => "unexpected end of input".to_string(),
            Tok::Num(v) => format!("unexpected number {v}"),
            Tok::Ident(s) => format!("unexpected identifier '{s}'"),
            Tok::Op(c) => format!("unexpected '{c}'"),
            Tok::LParen => "unexpected '('".to_string(),
            Tok::RParen => "unexpected ')'".to_string(),
            Tok::Comma => "unexpected ','".to_string(),
        };
        self.error(expected, what)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Op('-') {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        match tok.tok {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => {
                    self.bump();
                    Ok(Expr::Var)
                }
                "pi" => {
                    self.bump();
                    Ok(Expr::Const(Constant::Pi))
                }
                "e" => {
                    self.bump();
                    Ok(Expr::Const(Constant::E))
                }
                _ => match Func::from_name(&name) {
                    Some(func) => {
                        self.bump();
                        self.call(func)
                    }
                    None => Err(self.error(OPERAND, format!("unknown identifier '{name}'"))),
                },
            },
            _ => Err(self.unexpected(OPERAND)),
        }
    }

    fn call(&mut self, func: Func) -> Result<Expr, ParseError> {
        if self.peek().tok != Tok::LParen {
            return Err(self.unexpected(&["("]));
        }
        self.bump();
        let mut args = vec![self.expr()?];
        while args.len() < func.arity() {
            if self.peek().tok != Tok::Comma {
                return Err(self.error(
                    &[","],
                    format!("{} takes {} arguments", func.name(), func.arity()),
                ));
            }
            self.bump();
            args.push(self.expr()?);
        }
        if self.peek().tok == Tok::Comma {
            return Err(self.error(
                &[")"],
                format!("{} takes {} argument(s)", func.name(), func.arity()),
            ));
        }
        self.expect_rparen()?;
        Ok(Expr::Call(func, args))
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[")", "operator"]))
        }
    }
}

/// Parses an expression in the variable `x`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}
