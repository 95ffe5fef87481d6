//! A small expression language for declaring mappings and retractions in
//! configuration files.
//!
//! ```text
//! expr    := cond ;
//! cond    := or ( "?" expr ":" expr )? ;
//! or      := cmp ;
//! cmp     := add ( ("<"|"<="|">"|">="|"==") add )? ;
//! add     := mul ( ("+"|"-") mul )* ;
//! mul     := unary ( ("*"|"/") unary )* ;
//! unary   := "-" unary | atom ;
//! atom    := NUMBER | IDENT ( "(" expr ("," expr)* ")" )? | "(" expr ")" ;
//! ```
//!
//! Variables are `x` in one dimension and `x0`, `x1`, … otherwise (`x0` is
//! also accepted in one dimension). Comparisons evaluate to `1` or `0` and
//! `==` is exact floating-point equality. A conditional evaluates only the
//! selected branch, so `x > 0 ? log(x) : 0` is safe at `x = 0`.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Clamp,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Min,
        Func::Max,
        Func::Clamp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Clamp => "clamp",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            Func::Clamp => 3,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
}

/// A parsed expression. Equality is structural and ignores source
/// positions.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    /// Byte offset of the node in its source text.
    pub pos: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        use ExprKind::*;
        match (&self.kind, &other.kind) {
            (Const(a), Const(b)) => a.to_bits() == b.to_bits(),
            (Var(a), Var(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Bin(o1, l1, r1), Bin(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Call(f1, a1), Call(f2, a2)) => f1 == f2 && a1 == a2,
            (Cmp(o1, l1, r1), Cmp(o2, l2, r2)) => o1 == o2 && l1 == l2 && r1 == r2,
            (Cond(c1, t1, e1), Cond(c2, t2, e2)) => c1 == c2 && t1 == t2 && e1 == e2,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnknownFunction,
    Arity,
    UnclosedParen,
    BadNumber,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::UnexpectedToken => "unexpected-token",
            ParseErrorKind::UnknownFunction => "unknown-function",
            ParseErrorKind::Arity => "arity",
            ParseErrorKind::UnclosedParen => "unclosed-paren",
            ParseErrorKind::BadNumber => "bad-number",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at byte {position}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, position: usize, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogDomain,
    SqrtDomain,
    ClampBounds,
    NonFinite,
    MissingVariable,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogDomain => "log of a non-positive number",
            EvalErrorKind::SqrtDomain => "sqrt of a negative number",
            EvalErrorKind::ClampBounds => "clamp with lower bound above upper bound",
            EvalErrorKind::NonFinite => "non-finite result",
            EvalErrorKind::MissingVariable => "variable missing from the input point",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation error at byte {position}: {kind}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub position: usize,
}

/// Parses `source` for a mapping of dimension `dim`.
pub fn parse(source: &str, dim: usize) -> Result<Expr, ParseError> {
    if dim == 0 {
        return Err(ParseError::new(
            ParseErrorKind::UnexpectedToken,
            0,
            "dimension must be at least 1",
        ));
    }
    parser::Parser::new(source, dim).parse_all()
}

impl Expr {
    pub(crate) fn new(kind: ExprKind, pos: usize) -> Self {
        Expr { kind, pos }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        use ExprKind::*;
        match &self.kind {
            Const(_) => None,
            Var(i) => Some(*i),
            Neg(e) => e.max_var(),
            Bin(_, l, r) | Cmp(_, l, r) => l.max_var().max(r.max_var()),
            Call(_, args) => args.iter().filter_map(Expr::max_var).max(),
            Cond(c, t, e) => c.max_var().max(t.max_var()).max(e.max_var()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let err = |kind| EvalError {
            kind,
            position: self.pos,
        };
        let v = match &self.kind {
            ExprKind::Const(c) => *c,
            ExprKind::Var(i) => *x.get(*i).ok_or(err(EvalErrorKind::MissingVariable))?,
            ExprKind::Neg(e) => -e.eval(x)?,
            ExprKind::Bin(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(err(EvalErrorKind::DivisionByZero)),
                    BinOp::Div => a / b,
                }
            }
            ExprKind::Cmp(op, l, r) => {
                let a = l.eval(x)?;
                let b = r.eval(x)?;
                let holds = match op {
                    CmpOp::Lt => a < b,
                    CmpOp::Le => a <= b,
                    CmpOp::Gt => a > b,
                    CmpOp::Ge => a >= b,
                    CmpOp::Eq => a == b,
                };
                if holds {
                    1.0
                } else {
                    0.0
                }
            }
            ExprKind::Cond(c, t, e) => {
                if c.eval(x)? != 0.0 {
                    t.eval(x)?
                } else {
                    e.eval(x)?
                }
            }
            ExprKind::Call(f, args) => {
                let a = args
                    .iter()
                    .map(|e| e.eval(x))
                    .collect::<Result<Vec<f64>, _>>()?;
                match f {
                    Func::Sin => a[0].sin(),
                    Func::Cos => a[0].cos(),
                    Func::Tan => a[0].tan(),
                    Func::Tanh => a[0].tanh(),
                    Func::Exp => a[0].exp(),
                    Func::Log if a[0] <= 0.0 => return Err(err(EvalErrorKind::LogDomain)),
                    Func::Log => a[0].ln(),
                    Func::Sqrt if a[0] < 0.0 => return Err(err(EvalErrorKind::SqrtDomain)),
                    Func::Sqrt => a[0].sqrt(),
                    Func::Abs => a[0].abs(),
                    Func::Min => a[0].min(a[1]),
                    Func::Max => a[0].max(a[1]),
                    Func::Clamp if a[1].is_nan() || a[2].is_nan() || a[1] > a[2] => {
                        return Err(err(EvalErrorKind::ClampBounds))
                    }
                    Func::Clamp => a[0].clamp(a[1], a[2]),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err(EvalErrorKind::NonFinite))
        }
    }
}

/// Fully parenthesized form that reparses to a structurally equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Const(c) if c.is_sign_negative() => write!(f, "(-{:?})", -c),
            ExprKind::Const(c) => write!(f, "{c:?}"),
            ExprKind::Var(i) => write!(f, "x{i}"),
            ExprKind::Neg(e) => write!(f, "(-{e})"),
            ExprKind::Bin(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({l} {sym} {r})")
            }
            ExprKind::Cmp(op, l, r) => {
                let sym = match op {
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                    CmpOp::Eq => "==",
                };
                write!(f, "({l} {sym} {r})")
            }
            ExprKind::Cond(c, t, e) => write!(f, "({c} ? {t} : {e})"),
            ExprKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_map_structure() {
        let e = parse("-2*sin(x/2)", 1).unwrap();
        match &e.kind {
            ExprKind::Bin(BinOp::Mul, l, r) => {
                assert!(matches!(l.kind, ExprKind::Const(c) if c == -2.0));
                assert!(matches!(r.kind, ExprKind::Call(Func::Sin, _)));
            }
            other => panic!("unexpected root {other:?}"),
        }
    }

    #[test]
    fn piecewise_is_conditional() {
        let e = parse("x >= 0 ? -2*sin(x/2) : 2*sin(x/2)", 1).unwrap();
        assert!(matches!(e.kind, ExprKind::Cond(..)));
    }

    #[test]
    fn unclosed_call() {
        let err = parse("sin(", 1).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnclosedParen);
        assert_eq!(err.position, 4);
    }

    #[test]
    fn eval_examples() {
        let e = parse("-2*sin(x/2)", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 0.0);
        // −2·sin(0.5), 15 significant digits from an independent table.
        assert!((e.eval(&[1.0]).unwrap() - (-0.958851077208406)).abs() < 1e-15);
        let abs = parse("x >= 0 ? x : -x", 1).unwrap();
        assert_eq!(abs.eval(&[-0.3]).unwrap(), 0.3);
    }

    #[test]
    fn eval_domain_errors() {
        let e = parse("1 / (x - 1)", 1).unwrap();
        let err = e.eval(&[1.0]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::DivisionByZero);
        assert_eq!(err.position, 2);
        assert_eq!(
            parse("log(x)", 1).unwrap().eval(&[0.0]).unwrap_err().kind,
            EvalErrorKind::LogDomain
        );
        assert_eq!(
            parse("sqrt(x)", 1).unwrap().eval(&[-1.0]).unwrap_err().kind,
            EvalErrorKind::SqrtDomain
        );
        assert_eq!(
            parse("exp(x)", 1)
                .unwrap()
                .eval(&[1000.0])
                .unwrap_err()
                .kind,
            EvalErrorKind::NonFinite
        );
        assert_eq!(
            parse("clamp(x, 1, 0)", 1)
                .unwrap()
                .eval(&[0.5])
                .unwrap_err()
                .kind,
            EvalErrorKind::ClampBounds
        );
    }

    #[test]
    fn conditional_evaluates_one_branch() {
        let e = parse("x > 0 ? log(x) : 0", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn variables_by_dimension() {
        assert!(parse("x0 + x1", 2).is_ok());
        let err = parse("x", 2).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction);
        let err = parse("x0 + x2", 2).unwrap_err();
        assert_eq!(
            (err.kind, err.position),
            (ParseErrorKind::UnknownFunction, 5)
        );
        assert_eq!(parse("x0", 1).unwrap(), parse("x", 1).unwrap());
    }
}
