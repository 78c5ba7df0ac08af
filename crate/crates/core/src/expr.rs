//! Rational expressions in `z` and `w` (`"1/w"`, `"(w - z)^2/(z+1)"`, `"2z w"`).

use crate::bigc::BigComplex;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::gauss::GaussianRational;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(GaussianRational),
    Z,
    W,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

/// Values an expression can be evaluated over.
pub trait ExprValue: Sized + Clone {
    fn constant_like(&self, c: &GaussianRational) -> Self;
    fn e_add(&self, o: &Self) -> Self;
    fn e_sub(&self, o: &Self) -> Self;
    fn e_mul(&self, o: &Self) -> Self;
    fn e_div(&self, o: &Self) -> Result<Self>;
    fn e_neg(&self) -> Self;

    fn e_pow(&self, e: i32) -> Result<Self> {
        let one = self.constant_like(&GaussianRational::one());
        let mut acc = one.clone();
        let mut base = self.clone();
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.e_mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.e_mul(&base);
            }
        }
        if e < 0 {
            one.e_div(&acc)
        } else {
            Ok(acc)
        }
    }
}

impl ExprValue for BigComplex {
    fn constant_like(&self, c: &GaussianRational) -> Self {
        BigComplex::from_gaussian(c, self.prec())
    }
    fn e_add(&self, o: &Self) -> Self {
        self + o
    }
    fn e_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn e_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn e_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self / o)
    }
    fn e_neg(&self) -> Self {
        -self
    }
}

impl ExprValue for GaussianRational {
    fn constant_like(&self, c: &GaussianRational) -> Self {
        c.clone()
    }
    fn e_add(&self, o: &Self) -> Self {
        self + o
    }
    fn e_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn e_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn e_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self / o)
    }
    fn e_neg(&self) -> Self {
        -self
    }
}

impl<C: Coeff> ExprValue for TruncatedSeries<C> {
    fn constant_like(&self, c: &GaussianRational) -> Self {
        TruncatedSeries::monomial(C::from_gaussian(c, self.ctx()), 0, self.order().max(0))
    }
    fn e_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn e_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn e_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn e_div(&self, o: &Self) -> Result<Self> {
        let o = o.drop_negligible_leading();
        match o.inv() {
            Ok(inv) => Ok(self.mul(&inv)),
            Err(Error::ZeroSeries) => Err(Error::DenominatorVanishes),
            Err(e) => Err(e),
        }
    }
    fn e_neg(&self) -> Self {
        self.neg()
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            toks: tokenize(src)?,
            pos: 0,
            len: src.len(),
        };
        let e = p.expr()?;
        if p.pos < p.toks.len() {
            return Err(Error::parse(p.toks[p.pos].1, "unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval<V: ExprValue>(&self, z: &V, w: &V) -> Result<V> {
        Ok(match self {
            Expr::Const(c) => z.constant_like(c),
            Expr::Z => z.clone(),
            Expr::W => w.clone(),
            Expr::Neg(a) => a.eval(z, w)?.e_neg(),
            Expr::Add(a, b) => a.eval(z, w)?.e_add(&b.eval(z, w)?),
            Expr::Sub(a, b) => a.eval(z, w)?.e_sub(&b.eval(z, w)?),
            Expr::Mul(a, b) => a.eval(z, w)?.e_mul(&b.eval(z, w)?),
            Expr::Div(a, b) => a.eval(z, w)?.e_div(&b.eval(z, w)?)?,
            Expr::Pow(a, e) => a.eval(z, w)?.e_pow(*e)?,
        })
    }

    pub fn uses_w(&self) -> bool {
        match self {
            Expr::W => true,
            Expr::Const(_) | Expr::Z => false,
            Expr::Neg(a) | Expr::Pow(a, _) => a.uses_w(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.uses_w() || b.uses_w(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Z,
    W,
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            ' ' | '\t' | '\n' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Num(src[start..i].to_string()), start));
                continue;
            }
            'z' => Tok::Z,
            'w' => Tok::W,
            'i' => Tok::I,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' if bytes.get(i + 1) == Some(&b'*') => {
                out.push((Tok::Caret, i));
                i += 2;
                continue;
            }
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(Error::parse(i, format!("unexpected character '{other}'"))),
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.len)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(t) = self.peek() {
            let op = t.clone();
            match op {
                Tok::Plus | Tok::Minus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = if op == Tok::Plus {
                        Expr::Add(Box::new(lhs), Box::new(rhs))
                    } else {
                        Expr::Sub(Box::new(lhs), Box::new(rhs))
                    };
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                // implicit product: "2z", "z(w+1)", "3i"
                Some(Tok::Num(_) | Tok::Z | Tok::W | Tok::I | Tok::LParen) => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let negative = if self.peek() == Some(&Tok::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            let at = self.offset();
            let Some(Tok::Num(n)) = self.peek().cloned() else {
                return Err(Error::parse(at, "expected an integer exponent"));
            };
            self.pos += 1;
            let e: i32 = n.parse().map_err(|_| Error::parse(at, "exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), if negative { -e } else { e }));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let at = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::parse(at, "unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(n) => {
                let v: GaussianRational = n.parse().map_err(|_| Error::parse(at, "bad number"))?;
                Ok(Expr::Const(v))
            }
            Tok::Z => Ok(Expr::Z),
            Tok::W => Ok(Expr::W),
            Tok::I => Ok(Expr::Const(GaussianRational::i())),
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(Error::parse(self.offset(), "expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(Error::parse(at, "expected a number, z, w, i or '('")),
        }
    }
}
