//! Parsing and evaluation of integrand expressions `f(x)`.
//!
//! Every other part of the crate consumes integrands through the
//! [`Integrable`] trait, so callers can supply either a parsed [`Integrand`]
//! or any plain `Fn(f64) -> f64` closure.

mod parser;
mod token;

use std::fmt;

use thiserror::Error;

/// Binary operators, in source syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    /// Binding strength used by the printer; higher binds tighter.
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Abs,
}

impl Func {
    fn by_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Abs => "abs",
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    /// The single free variable `x`.
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// A parsed integrand: an immutable expression tree plus its source text.
///
/// Evaluation is pure, so one `Integrand` can be shared freely across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrand {
    root: Expr,
    source: String,
}

/// Errors from [`parse`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

/// Errors from evaluating an integrand at a point. Each variant names the
/// sub-expression that failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in `{expr}` at x = {x}")]
    DivisionByZero { expr: String, x: f64 },
    #[error("square root of negative value {arg} in `{expr}` at x = {x}")]
    SqrtOfNegative { expr: String, arg: f64, x: f64 },
    #[error("logarithm of non-positive value {arg} in `{expr}` at x = {x}")]
    LogNonPositive { expr: String, arg: f64, x: f64 },
    #[error("non-finite value from `{expr}` at x = {x}")]
    NonFinite { expr: String, x: f64 },
}

/// Anything evaluable as a real function of one real variable.
///
/// The `Sync` bound lets batch evaluation fan out across threads.
pub trait Integrable: Sync {
    fn eval_at(&self, x: f64) -> Result<f64, EvalError>;
}

impl Integrable for Integrand {
    fn eval_at(&self, x: f64) -> Result<f64, EvalError> {
        self.evaluate(x)
    }
}

/// Native hook: any infallible closure is an integrand. Non-finite outputs
/// are reported as evaluation errors rather than propagated silently.
impl<F> Integrable for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval_at(&self, x: f64) -> Result<f64, EvalError> {
        let y = self(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(EvalError::NonFinite {
                expr: "<native function>".into(),
                x,
            })
        }
    }
}

/// Parse an expression over the free variable `x`.
///
/// Precedence: `^` (right-associative) binds tightest, then unary minus,
/// then `*`/`/`, then `+`/`-`. Supported functions: `sqrt`, `exp`, `log`
/// (natural), `sin`, `cos`, `tan`, `abs`. Constants: `pi`, `e`.
pub fn parse(source: &str) -> Result<Integrand, ParseError> {
    let tokens = token::tokenize(source)?;
    if tokens.is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            expected: "a non-empty expression".into(),
        });
    }
    let root = parser::Parser::new(&tokens, source.len()).parse()?;
    Ok(Integrand {
        root,
        source: source.to_string(),
    })
}

impl Integrand {
    /// Evaluate `f(x)`. Deterministic: the same tree and the same `x`
    /// produce the identical value on every call.
    pub fn evaluate(&self, x: f64) -> Result<f64, EvalError> {
        eval_node(&self.root, x)
    }

    /// The original source text.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }
}

fn eval_node(node: &Expr, x: f64) -> Result<f64, EvalError> {
    let value = match node {
        Expr::Number(v) => *v,
        Expr::Var => x,
        Expr::Neg(inner) => -eval_node(inner, x)?,
        Expr::Binary(op, lhs, rhs) => {
            let l = eval_node(lhs, x)?;
            let r = eval_node(rhs, x)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(EvalError::DivisionByZero {
                            expr: node.to_string(),
                            x,
                        });
                    }
                    l / r
                }
                BinOp::Pow => l.powf(r),
            }
        }
        Expr::Call(func, arg) => {
            let a = eval_node(arg, x)?;
            match func {
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(EvalError::SqrtOfNegative {
                            expr: node.to_string(),
                            arg: a,
                            x,
                        });
                    }
                    a.sqrt()
                }
                Func::Log => {
                    if a <= 0.0 {
                        return Err(EvalError::LogNonPositive {
                            expr: node.to_string(),
                            arg: a,
                            x,
                        });
                    }
                    a.ln()
                }
                Func::Exp => a.exp(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Abs => a.abs(),
            }
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite {
            expr: node.to_string(),
            x,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f, 0)
    }
}

/// Minimal-parenthesis printer, used to name sub-expressions in errors.
fn write_expr(node: &Expr, f: &mut fmt::Formatter<'_>, parent_prec: u8) -> fmt::Result {
    match node {
        Expr::Number(v) => write!(f, "{v}"),
        Expr::Var => write!(f, "x"),
        Expr::Neg(inner) => {
            // Unary minus sits between `^` and `*`.
            let needs_parens = parent_prec > 3;
            if needs_parens {
                write!(f, "(")?;
            }
            write!(f, "-")?;
            write_expr(inner, f, 3)?;
            if needs_parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expr::Binary(op, lhs, rhs) => {
            let prec = op.precedence();
            let needs_parens = prec < parent_prec;
            if needs_parens {
                write!(f, "(")?;
            }
            write_expr(lhs, f, prec)?;
            write!(f, "{}", op.symbol())?;
            // Right operand of a left-associative operator needs one more
            // level; `^` is right-associative so the asymmetry flips.
            let rhs_prec = if *op == BinOp::Pow { prec } else { prec + 1 };
            write_expr(rhs, f, rhs_prec)?;
            if needs_parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        Expr::Call(func, arg) => {
            write!(f, "{}(", func.name())?;
            write_expr(arg, f, 0)?;
            write!(f, ")")
        }
    }
}
