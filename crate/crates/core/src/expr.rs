//! Series expressions such as `3*pi^-2 + (1+pi)^-5 * pi^4`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' ['+' | '-'] integer)?
//! atom   := integer | 'pi' | '(' expr ')'
//! ```

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic::PadicContext;
use crate::series::LaurentSeries;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Pi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.eat(b'*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let negative = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let k: i64 = self
            .digits()?
            .parse()
            .map_err(|_| self.error("exponent out of range"))?;
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let text = self.digits()?;
                Ok(Expr::Int(text.parse().expect("digits parse")))
            }
            Some(b'p') if self.src[self.pos..].starts_with(b"pi") => {
                self.pos += 2;
                Ok(Expr::Pi)
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut parser = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let expr = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error("trailing input"));
    }
    Ok(expr)
}

impl Expr {
    /// π-adic headroom used while evaluating so that negative powers do not
    /// eat into the requested precision.
    fn pad(&self) -> i64 {
        match self {
            Expr::Int(_) | Expr::Pi => 0,
            Expr::Neg(e) => e.pad(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.pad() + b.pad(),
            Expr::Pow(e, k) => e.pad() * k.unsigned_abs().max(1) as i64 + 2 * (-k).max(0),
        }
    }

    fn eval_at(&self, ctx: &PadicContext, high: i64) -> Result<LaurentSeries> {
        match self {
            Expr::Int(v) => {
                let c = ctx.residue_big(v).value() as i128;
                LaurentSeries::from_monomials(&[(0, c)], ctx, high)
            }
            Expr::Pi => LaurentSeries::from_monomials(&[(1, 1)], ctx, high.max(2)),
            Expr::Neg(e) => Ok(e.eval_at(ctx, high)?.neg()),
            Expr::Add(a, b) => a.eval_at(ctx, high)?.add(&b.eval_at(ctx, high)?),
            Expr::Sub(a, b) => a.eval_at(ctx, high)?.sub(&b.eval_at(ctx, high)?),
            Expr::Mul(a, b) => a.eval_at(ctx, high)?.mul(&b.eval_at(ctx, high)?),
            Expr::Pow(base, k) if **base == Expr::Pi => {
                LaurentSeries::from_monomials(&[(*k, 1)], ctx, high.max(k + 1))
            }
            Expr::Pow(base, k) => base.eval_at(ctx, high)?.pow(*k),
        }
    }

    /// Evaluates to a series known below π^M. Every literal is exact, so the
    /// working precision is raised until divisions stop eating into M.
    pub fn evaluate(&self, ctx: &PadicContext, high: i64) -> Result<LaurentSeries> {
        if high < 1 {
            return Err(Error::InvalidArgument(format!(
                "pi-precision must be positive, got {high}"
            )));
        }
        let mut pad = self.pad();
        let mut value = self.eval_at(ctx, high + pad)?;
        for _ in 0..8 {
            let deficit = high - value.high();
            if deficit <= 0 {
                break;
            }
            pad += deficit;
            value = self.eval_at(ctx, high + pad)?;
        }
        Ok(value.truncate(high))
    }
}

pub fn evaluate(src: &str, ctx: &PadicContext, high: i64) -> Result<LaurentSeries> {
    parse(src)?.evaluate(ctx, high)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PadicContext {
        PadicContext::new(3, 6).unwrap()
    }

    fn show(src: &str, m: i64) -> String {
        evaluate(src, &ctx(), m).unwrap().to_string()
    }

    #[test]
    fn parses_and_evaluates() {
        assert_eq!(show("pi^2", 8), "pi^2 + O(pi^8)");
        assert_eq!(show(" 2 * pi ^ -1 + 1 ", 8), "2*pi^-1 + 1 + O(pi^8)");
        assert_eq!(show("(1+pi)^2", 8), "1 + 2*pi + pi^2 + O(pi^8)");
        assert_eq!(show("(1+pi)^3 - 1", 8), "3*pi + 3*pi^2 + pi^3 + O(pi^8)");
        assert_eq!(show("-pi", 4), "728*pi + O(pi^4)");
        assert_eq!(show("pi - pi", 4), "0 + O(pi^4)");
    }

    #[test]
    fn negative_powers_keep_requested_precision() {
        let s = evaluate("(1+pi)^-1 * pi^-2", &ctx(), 10).unwrap();
        assert_eq!(s.low(), -2);
        assert_eq!(s.high(), 10);
        let t = evaluate("((1+pi)^2 - 1)^-1", &ctx(), 10).unwrap();
        assert_eq!(t.low(), -1);
        assert_eq!(t.high(), 10);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse("pi +"), Err(Error::Parse { .. })));
        assert!(matches!(parse("(1+pi"), Err(Error::Parse { .. })));
        assert!(matches!(parse("pi^x"), Err(Error::Parse { .. })));
        assert!(matches!(parse("2 pi"), Err(Error::Parse { .. })));
        assert!(matches!(parse("q"), Err(Error::Parse { .. })));
        assert_eq!(evaluate("(3+pi)^-1", &ctx(), 8), Err(Error::NonInvertible));
    }
}
