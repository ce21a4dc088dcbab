//! Recursive-descent parser.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr   := term  (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          // right-associative
//! atom   := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func   := sqrt | exp | log | sin | cos | tan | abs
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`; an exponent may
//! itself carry a sign, so `2^-1` is accepted. There is no implicit
//! multiplication: `2x` is a syntax error.

use super::token::{Token, TokenKind};
use super::{BinOp, Expr, Func, ParseError};

pub(crate) struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    /// Length of the source, for end-of-input error offsets.
    end: usize,
}

impl<'a> Parser<'a> {
    pub fn new(tokens: &'a [Token], source_len: usize) -> Self {
        Parser {
            tokens,
            pos: 0,
            end: source_len,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if &t.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ParseError::Syntax {
                offset: self.offset(),
                expected: what.into(),
            }),
        }
    }

    pub fn parse(mut self) -> Result<Expr, ParseError> {
        let expr = self.expr()?;
        if let Some(t) = self.peek() {
            return Err(ParseError::Syntax {
                offset: t.offset,
                expected: "end of expression or an operator".into(),
            });
        }
        Ok(expr)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek().and_then(|t| match t.kind {
            TokenKind::Plus => Some(BinOp::Add),
            TokenKind::Minus => Some(BinOp::Sub),
            _ => None,
        }) {
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek().and_then(|t| match t.kind {
            TokenKind::Star => Some(BinOp::Mul),
            TokenKind::Slash => Some(BinOp::Div),
            _ => None,
        }) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.bump();
            // Recursing through `unary` makes `^` right-associative and lets
            // the exponent carry its own sign.
            let exponent = self.unary()?;
            return Ok(Expr::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let Some(token) = self.bump() else {
            return Err(ParseError::Syntax {
                offset,
                expected: "a number, `x`, a constant, a function call, or `(`".into(),
            });
        };
        match &token.kind {
            TokenKind::Number(v) => Ok(Expr::Number(*v)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                match name.as_str() {
                    "x" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Number(std::f64::consts::PI)),
                    "e" => Ok(Expr::Number(std::f64::consts::E)),
                    _ => {
                        if let Some(func) = Func::by_name(&name) {
                            self.expect(&TokenKind::LParen, "`(` after function name")?;
                            let arg = self.expr()?;
                            self.expect(&TokenKind::RParen, "`)`")?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        } else {
                            Err(ParseError::UnknownIdentifier { name, offset })
                        }
                    }
                }
            }
            _ => Err(ParseError::Syntax {
                offset,
                expected: "a number, `x`, a constant, a function call, or `(`".into(),
            }),
        }
    }
}
