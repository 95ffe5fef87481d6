use super::lexer::{Lexer, Tok};
use super::{BinOp, CmpOp, Expr, ExprKind, Func, ParseError, ParseErrorKind};

pub(crate) struct Parser<'a> {
    lex: Lexer<'a>,
    src_len: usize,
    dim: usize,
    depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str, dim: usize) -> Self {
        Parser {
            lex: Lexer::new(src),
            src_len: src.len(),
            dim,
            depth: 0,
        }
    }

    pub(crate) fn parse_all(mut self) -> PResult<Expr> {
        let e = self.expr()?;
        let (tok, pos) = self.lex.next()?;
        if tok != Tok::Eof {
            return Err(self.unexpected(&tok, pos));
        }
        Ok(e)
    }

    fn unexpected(&self, tok: &Tok, pos: usize) -> ParseError {
        if *tok == Tok::Eof && self.depth > 0 {
            return ParseError::new(
                ParseErrorKind::UnclosedParen,
                self.src_len,
                "unclosed `(` at end of input",
            );
        }
        ParseError::new(
            ParseErrorKind::UnexpectedToken,
            pos,
            format!("unexpected {}", tok.describe()),
        )
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        let (tok, pos) = self.lex.next()?;
        if tok == want {
            Ok(())
        } else {
            Err(self.unexpected(&tok, pos))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.cond()
    }

    // cond := cmp ( "?" expr ":" expr )?
    fn cond(&mut self) -> PResult<Expr> {
        let c = self.cmp()?;
        if self.lex.peek()?.0 != Tok::Question {
            return Ok(c);
        }
        self.lex.next()?;
        let then = self.expr()?;
        self.expect(Tok::Colon)?;
        let otherwise = self.expr()?;
        let pos = c.pos;
        Ok(Expr::new(
            ExprKind::Cond(Box::new(c), Box::new(then), Box::new(otherwise)),
            pos,
        ))
    }

    // cmp := add ( op add )?
    fn cmp(&mut self) -> PResult<Expr> {
        let lhs = self.add()?;
        let &(ref tok, pos) = self.lex.peek()?;
        let op = match tok {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::EqEq => CmpOp::Eq,
            _ => return Ok(lhs),
        };
        self.lex.next()?;
        let rhs = self.add()?;
        Ok(Expr::new(
            ExprKind::Cmp(op, Box::new(lhs), Box::new(rhs)),
            pos,
        ))
    }

    fn add(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul()?;
        loop {
            let &(ref tok, pos) = self.lex.peek()?;
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.lex.next()?;
            let rhs = self.mul()?;
            lhs = Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn mul(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let &(ref tok, pos) = self.lex.peek()?;
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.lex.next()?;
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    // unary := "-" unary | atom. A negated literal folds into a constant.
    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.lex.peek()?.1;
        if self.lex.peek()?.0 != Tok::Minus {
            return self.atom();
        }
        self.lex.next()?;
        let inner = self.unary()?;
        Ok(match inner.kind {
            ExprKind::Const(c) => Expr::new(ExprKind::Const(-c), pos),
            _ => Expr::new(ExprKind::Neg(Box::new(inner)), pos),
        })
    }

    fn atom(&mut self) -> PResult<Expr> {
        let (tok, pos) = self.lex.next()?;
        match tok {
            Tok::Num(v) => Ok(Expr::new(ExprKind::Const(v), pos)),
            Tok::LParen => {
                self.depth += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                self.depth -= 1;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, pos),
            other => Err(self.unexpected(&other, pos)),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> PResult<Expr> {
        let called = self.lex.peek()?.0 == Tok::LParen;
        if let Some(index) = variable_index(&name, self.dim) {
            let index =
                index.map_err(|msg| ParseError::new(ParseErrorKind::UnknownFunction, pos, msg))?;
            if called {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownFunction,
                    pos,
                    format!("variable `{name}` cannot be called"),
                ));
            }
            return Ok(Expr::new(ExprKind::Var(index), pos));
        }
        let func = Func::from_name(&name).ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::UnknownFunction,
                pos,
                format!("unknown function `{name}`"),
            )
        })?;
        if !called {
            return Err(arity_error(func, 0, pos));
        }
        self.lex.next()?;
        self.depth += 1;
        let mut args = vec![self.expr()?];
        loop {
            let (tok, tpos) = self.lex.next()?;
            match tok {
                Tok::Comma => args.push(self.expr()?),
                Tok::RParen => break,
                other => return Err(self.unexpected(&other, tpos)),
            }
        }
        self.depth -= 1;
        if args.len() != func.arity() {
            return Err(arity_error(func, args.len(), pos));
        }
        Ok(Expr::new(ExprKind::Call(func, args), pos))
    }
}

fn arity_error(func: Func, got: usize, pos: usize) -> ParseError {
    ParseError::new(
        ParseErrorKind::Arity,
        pos,
        format!(
            "`{}` takes {} argument(s), got {got}",
            func.name(),
            func.arity()
        ),
    )
}

/// `None` if `name` is not spelled like a variable; otherwise the resolved
/// index or a message explaining why it is out of range.
fn variable_index(name: &str, dim: usize) -> Option<Result<usize, String>> {
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() {
        return Some(if dim == 1 {
            Ok(0)
        } else {
            Err(format!(
                "`x` is ambiguous in dimension {dim}; use x0..x{}",
                dim - 1
            ))
        });
    }
    if !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(match rest.parse::<usize>() {
        Ok(i) if i < dim => Ok(i),
        _ => Err(format!(
            "variable `{name}` out of range for dimension {dim}"
        )),
    })
}
