//! Recursive-descent parser for map expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' integer)?
//! base   := integer | 'x' | 'y' | 'z' | '(' expr ')' | 'sqrt' '(' integer ')'
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fields::{Field, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Var(usize),
    Sqrt(i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((off, Tok::Int(s.parse().unwrap())));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((off, Tok::Ident(chars[start..i].iter().map(|&(_, c)| c).collect())));
        } else if "+-*/^(),:[]".contains(c) {
            out.push((off, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { offset: off, message: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, end: text.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.offset(), message: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = self.integer()?;
            let e: i64 = i64::try_from(e).or_else(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" => Ok(Expr::Var(0)),
                    "y" => Ok(Expr::Var(1)),
                    "z" => Ok(Expr::Var(2)),
                    "sqrt" => {
                        self.expect('(')?;
                        let d = self.integer()?;
                        self.expect(')')?;
                        Ok(Expr::Sqrt(i64::try_from(d).or_else(|_| self.err("radicand too large"))?))
                    }
                    _ => {
                        self.pos -= 1;
                        self.err(format!("unknown identifier '{name}'"))
                    }
                }
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.err("expected a number, variable or '('"),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            self.err("trailing input")
        } else {
            Ok(())
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// How a tuple was written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bracket {
    /// `(e1, e2, ...)`
    Paren,
    /// `[f0 : f1 : f2]`
    Square,
}

/// Parses `(e1, ..., en)` or `[e1 : ... : en]` with n >= 2.
pub fn parse_tuple(text: &str) -> Result<(Bracket, Vec<Expr>)> {
    let mut p = Parser::new(text)?;
    let (sep, close, kind) = if p.eat('[') {
        (':', ']', Bracket::Square)
    } else {
        p.expect('(')?;
        (',', ')', Bracket::Paren)
    };
    let mut items = vec![p.expr()?];
    while p.eat(sep) {
        items.push(p.expr()?);
    }
    p.expect(close)?;
    p.finish()?;
    if items.len() < 2 {
        return Err(Error::Syntax { offset: 0, message: "a map needs at least two components".into() });
    }
    Ok((kind, items))
}

/// Sparse polynomial in x, y, z.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly3 {
    pub terms: BTreeMap<[u32; 3], Scalar>,
}

impl Poly3 {
    fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0, 0, 0], c);
        }
        Poly3 { terms }
    }

    fn var(i: usize, field: Field) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Poly3 { terms: BTreeMap::from([(e, field.one())]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Option<&Scalar>> {
        match self.terms.len() {
            0 => Some(None),
            1 => self.terms.get(&[0, 0, 0]).map(Some),
            _ => None,
        }
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Common total degree of all terms, if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e[0] + e[1] + e[2]);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    fn add(&self, o: &Poly3) -> Poly3 {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let v = match terms.get(e) {
                Some(a) => a + c,
                None => c.clone(),
            };
            if v.is_zero() {
                terms.remove(e);
            } else {
                terms.insert(*e, v);
            }
        }
        Poly3 { terms }
    }

    fn neg(&self) -> Poly3 {
        Poly3 { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    fn mul(&self, o: &Poly3) -> Poly3 {
        let mut acc = Poly3::default();
        for (e1, c1) in &self.terms {
            let mut part = BTreeMap::new();
            for (e2, c2) in &o.terms {
                part.insert([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1 * c2);
            }
            acc = acc.add(&Poly3 { terms: part });
        }
        acc
    }

    fn pow(&self, e: u32, field: Field) -> Poly3 {
        let mut acc = Poly3::constant(field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// A fraction of sparse polynomials, not reduced.
#[derive(Clone, Debug)]
pub struct Frac3 {
    pub num: Poly3,
    pub den: Poly3,
}

fn scalar_in(field: Field, n: &BigInt) -> Result<Scalar> {
    field.coerce(&Scalar::Rational(BigRational::from_integer(n.clone())))
}

fn sqrt_scalar(field: Field, d: i64) -> Result<Scalar> {
    if d >= 0 {
        let r = (d as f64).sqrt().round() as i64;
        for s in [r - 1, r, r + 1] {
            if s >= 0 && s * s == d {
                return Ok(field.int(s));
            }
        }
    }
    match field {
        Field::Quad(e) if d > 0 => {
            // sqrt(d) = s·sqrt(e) when d = s² e
            let q = BigRational::new(BigInt::from(d), BigInt::from(e));
            match Scalar::Rational(q).sqrt() {
                Some(Scalar::Rational(s)) => Ok(Scalar::quad(BigRational::zero(), s, e)),
                _ => Err(Error::invalid(format!("sqrt({d}) does not lie in {field}"))),
            }
        }
        Field::Prime(_) => {
            let v = field.int(d);
            v.sqrt().ok_or_else(|| Error::invalid(format!("{d} is not a square in {field}")))
        }
        _ => Err(Error::invalid(format!("sqrt({d}) does not lie in {field}"))),
    }
}

pub fn eval(e: &Expr, field: Field) -> Result<Frac3> {
    let one = || Poly3::constant(field.one());
    Ok(match e {
        Expr::Int(n) => Frac3 { num: Poly3::constant(scalar_in(field, n)?), den: one() },
        Expr::Var(i) => Frac3 { num: Poly3::var(*i, field), den: one() },
        Expr::Sqrt(d) => Frac3 { num: Poly3::constant(sqrt_scalar(field, *d)?), den: one() },
        Expr::Neg(a) => {
            let a = eval(a, field)?;
            Frac3 { num: a.num.neg(), den: a.den }
        }
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let (a, mut b) = (eval(a, field)?, eval(b, field)?);
            if matches!(e, Expr::Sub(..)) {
                b.num = b.num.neg();
            }
            if a.den == b.den {
                Frac3 { num: a.num.add(&b.num), den: a.den }
            } else {
                Frac3 { num: a.num.mul(&b.den).add(&b.num.mul(&a.den)), den: a.den.mul(&b.den) }
            }
        }
        Expr::Mul(a, b) => {
            let (a, b) = (eval(a, field)?, eval(b, field)?);
            Frac3 { num: a.num.mul(&b.num), den: a.den.mul(&b.den) }
        }
        Expr::Div(a, b) => {
            let (a, b) = (eval(a, field)?, eval(b, field)?);
            if b.num.is_zero() {
                return Err(Error::invalid("division by zero"));
            }
            Frac3 { num: a.num.mul(&b.den), den: a.den.mul(&b.num) }
        }
        Expr::Pow(a, k) => {
            let a = eval(a, field)?;
            let k32 = u32::try_from(k.unsigned_abs()).map_err(|_| Error::invalid("exponent too large"))?;
            if *k >= 0 {
                Frac3 { num: a.num.pow(k32, field), den: a.den.pow(k32, field) }
            } else {
                if a.num.is_zero() {
                    return Err(Error::invalid("division by zero"));
                }
                Frac3 { num: a.den.pow(k32, field), den: a.num.pow(k32, field) }
            }
        }
    })
}

impl Frac3 {
    pub fn uses(&self, var: usize) -> bool {
        self.num.degree_in(var) > 0 || self.den.degree_in(var) > 0
    }
}

/// Parses an expression and evaluates it over `field`.
pub fn parse_frac(text: &str, field: Field) -> Result<Frac3> {
    eval(&parse_expr(text)?, field)
}
