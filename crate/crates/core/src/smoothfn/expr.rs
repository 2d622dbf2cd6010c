//! Expression trees for elementary smooth functions, and their parser.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::mpoly::MPoly;
use super::series::{Layout, Series, Unary};
use crate::coeff::{parse_rational, Backend, Coefficient};
use crate::error::{Error, Result};

/// Callback returning `∂^α f(p)` for a user-supplied function.
pub type JetFn = dyn Fn(&[u32], &[f64]) -> Result<Complex64> + Send + Sync;

/// A smooth function known only through its partial derivatives.
///
/// Nothing checks that the callback is consistent or smooth.
#[derive(Clone)]
pub struct JetOracle {
    name: String,
    arity: usize,
    jet: Arc<JetFn>,
}

impl JetOracle {
    pub fn new(name: impl Into<String>, arity: usize, jet: impl Fn(&[u32], &[f64]) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        JetOracle { name: name.into(), arity, jet: Arc::new(jet) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn derivative(&self, alpha: &[u32], point: &[f64]) -> Result<Complex64> {
        (self.jet)(alpha, point)
    }
}

impl fmt::Debug for JetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetOracle({}, arity {})", self.name, self.arity)
    }
}

#[derive(Clone, Debug)]
pub enum Expr {
    /// `y_{i+1}`
    Var(usize),
    Const(Coefficient),
    Poly(MPoly),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    PowInt(Box<Expr>, i64),
    PowReal(Box<Expr>, f64),
    Apply(Unary, Box<Expr>),
    Call(JetOracle, Vec<Expr>),
}

impl Expr {
    pub fn apply(f: Unary, e: Expr) -> Expr {
        Expr::Apply(f, Box::new(e))
    }

    /// Largest variable index used, plus one.
    pub fn min_arity(&self) -> usize {
        match self {
            Expr::Var(i) => i + 1,
            Expr::Const(_) => 0,
            Expr::Poly(p) => p.nvars(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.min_arity().max(b.min_arity()),
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::PowReal(a, _) | Expr::Apply(_, a) => a.min_arity(),
            Expr::Call(_, args) => args.iter().map(Expr::min_arity).max().unwrap_or(0),
        }
    }

    pub fn uses_oracle(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Const(_) | Expr::Poly(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.uses_oracle() || b.uses_oracle(),
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::PowReal(a, _) | Expr::Apply(_, a) => a.uses_oracle(),
            Expr::Call(..) => true,
        }
    }

    /// The polynomial this expression denotes, if it is built from
    /// constants and variables with `+ − ×`, nonnegative integer powers
    /// and division by nonzero constants.
    pub fn to_poly(&self, nvars: usize) -> Option<MPoly> {
        Some(match self {
            Expr::Var(i) if *i < nvars => MPoly::var(*i, nvars, Backend::Exact),
            Expr::Var(_) => return None,
            Expr::Const(c) => MPoly::constant(c.clone(), nvars),
            Expr::Poly(p) if p.nvars() == nvars => p.clone(),
            Expr::Poly(_) => return None,
            Expr::Add(a, b) => a.to_poly(nvars)?.add(&b.to_poly(nvars)?).ok()?,
            Expr::Sub(a, b) => a.to_poly(nvars)?.sub(&b.to_poly(nvars)?).ok()?,
            Expr::Mul(a, b) => a.to_poly(nvars)?.mul(&b.to_poly(nvars)?).ok()?,
            Expr::Div(a, b) => {
                let d = b.to_poly(nvars)?.as_constant()?;
                a.to_poly(nvars)?.scale(&d.inv()?)
            }
            Expr::Neg(a) => a.to_poly(nvars)?.neg(),
            Expr::PowInt(a, k) if *k >= 0 => a.to_poly(nvars)?.pow(*k as u32),
            _ => return None,
        })
    }

    /// Replaces `y_i` by `args[i]`.
    pub fn substitute(&self, args: &[Expr]) -> Result<Expr> {
        let sub = |e: &Expr| e.substitute(args).map(Box::new);
        Ok(match self {
            Expr::Var(i) => args
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Shape(format!("variable y{} has no substitute", i + 1)))?,
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Poly(p) => poly_to_expr(p).substitute(args)?,
            Expr::Add(a, b) => Expr::Add(sub(a)?, sub(b)?),
            Expr::Sub(a, b) => Expr::Sub(sub(a)?, sub(b)?),
            Expr::Mul(a, b) => Expr::Mul(sub(a)?, sub(b)?),
            Expr::Div(a, b) => Expr::Div(sub(a)?, sub(b)?),
            Expr::Neg(a) => Expr::Neg(sub(a)?),
            Expr::PowInt(a, k) => Expr::PowInt(sub(a)?, *k),
            Expr::PowReal(a, p) => Expr::PowReal(sub(a)?, *p),
            Expr::Apply(f, a) => Expr::Apply(*f, sub(a)?),
            Expr::Call(o, inner) => Expr::Call(o.clone(), inner.iter().map(|e| e.substitute(args)).collect::<Result<_>>()?),
        })
    }

    /// Truncated Taylor series of the expression around `point`.
    pub(crate) fn series(&self, layout: &Arc<Layout>, point: &[Complex64]) -> Result<Series> {
        Ok(match self {
            Expr::Var(i) => {
                let v = point.get(*i).ok_or_else(|| Error::Shape(format!("no coordinate for y{}", i + 1)))?;
                Series::variable(layout, *i, *v)
            }
            Expr::Const(c) => Series::constant(layout, c.to_complex()),
            Expr::Poly(p) => {
                let vars: Vec<Series> = (0..p.nvars()).map(|i| Series::variable(layout, i, point[i])).collect();
                let mut acc = Series::constant(layout, Complex64::new(0.0, 0.0));
                for (e, c) in p.terms() {
                    let mut t = Series::constant(layout, c.to_complex());
                    for (v, &k) in vars.iter().zip(e) {
                        for _ in 0..k {
                            t = t.mul(v);
                        }
                    }
                    acc = acc.add(&t);
                }
                acc
            }
            Expr::Add(a, b) => a.series(layout, point)?.add(&b.series(layout, point)?),
            Expr::Sub(a, b) => a.series(layout, point)?.sub(&b.series(layout, point)?),
            Expr::Mul(a, b) => a.series(layout, point)?.mul(&b.series(layout, point)?),
            Expr::Div(a, b) => a.series(layout, point)?.div(&b.series(layout, point)?)?,
            Expr::Neg(a) => a.series(layout, point)?.scale(Complex64::new(-1.0, 0.0)),
            Expr::PowInt(a, k) => a.series(layout, point)?.powi(*k)?,
            Expr::PowReal(a, p) => a.series(layout, point)?.powf(*p)?,
            Expr::Apply(f, a) => a.series(layout, point)?.apply(*f)?,
            Expr::Call(o, args) => {
                if args.len() != o.arity() {
                    return Err(Error::Shape(format!("{} takes {} arguments, got {}", o.name(), o.arity(), args.len())));
                }
                let inner: Vec<Series> = args.iter().map(|a| a.series(layout, point)).collect::<Result<_>>()?;
                let at: Vec<f64> = inner
                    .iter()
                    .map(|s| {
                        let v = s.value();
                        if v.im != 0.0 {
                            Err(Error::Domain(format!("{} is applied at a non-real point", o.name())))
                        } else {
                            Ok(v.re)
                        }
                    })
                    .collect::<Result<_>>()?;
                let offsets: Vec<Series> = inner.iter().map(Series::offset).collect();
                compose_oracle(o, &at, &offsets, layout)?
            }
        })
    }
}

/// `Σ_α ∂^α f(at)/α! · ∏ offsets_i^{α_i}` truncated to the layout order.
fn compose_oracle(o: &JetOracle, at: &[f64], offsets: &[Series], layout: &Arc<Layout>) -> Result<Series> {
    let inner_layout = Layout::new(o.arity(), layout.order());
    let inv_fact = super::series::inverse_factorials(layout.order() as usize);
    let mut acc = Series::constant(layout, Complex64::new(0.0, 0.0));
    for alpha in inner_layout.monomials() {
        let mut term = Series::constant(layout, Complex64::new(1.0, 0.0));
        for (off, &k) in offsets.iter().zip(alpha) {
            for _ in 0..k {
                term = term.mul(off);
            }
        }
        if term.is_zero() {
            continue;
        }
        let weight: f64 = alpha.iter().map(|&k| inv_fact[k as usize]).product();
        let d = o.derivative(alpha, at)?;
        acc = acc.add(&term.scale(d * weight));
    }
    Ok(acc)
}

pub(crate) fn poly_to_expr(p: &MPoly) -> Expr {
    let mut acc: Option<Expr> = None;
    for (e, c) in p.terms() {
        let mut t = Expr::Const(c.clone());
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                t = Expr::Mul(Box::new(t), Box::new(Expr::PowInt(Box::new(Expr::Var(i)), i64::from(k))));
            }
        }
        acc = Some(match acc {
            None => t,
            Some(a) => Expr::Add(Box::new(a), Box::new(t)),
        });
    }
    acc.unwrap_or_else(|| Expr::Const(Coefficient::zero(p.backend())))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "y{}", i + 1),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Poly(p) => write!(f, "({p})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::PowInt(a, k) => write!(f, "{a}^{k}"),
            Expr::PowReal(a, p) => write!(f, "{a}^{p:?}"),
            Expr::Apply(u, a) => write!(f, "{}({a})", u.name()),
            Expr::Call(o, args) => {
                write!(f, "{}(", o.name())?;
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

// ---------------------------------------------------------------------------
// Parser

/// Parses an infix expression over `y1..yn`.
///
/// Supports `+ - * / ^` (also `**`), parentheses, decimal and rational
/// literals, the constants `pi` and `e`, and the functions
/// `exp log ln sin cos tan sinh cosh tanh sqrt`.
pub fn parse_expr(src: &str, arity: usize) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0, arity };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some((col, t)) => Err(parse_error(*col, format!("unexpected {t}"))),
    }
}

fn parse_error(col: usize, msg: impl fmt::Display) -> Error {
    Error::Parse(format!("column {col}: {msg}"))
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(s) | Token::Ident(s) => write!(f, "'{s}'"),
            Token::Op(c) => write!(f, "'{c}'"),
            Token::LParen => f.write_str("'('"),
            Token::RParen => f.write_str("')'"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push((col, Token::Num(chars[start..i].iter().collect())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Token::Ident(chars[start..i].iter().collect())));
        } else if c == '*' && chars.get(i + 1) == Some(&'*') {
            out.push((col, Token::Op('^')));
            i += 2;
        } else if "+-*/^,".contains(c) {
            out.push((col, Token::Op(c)));
            i += 1;
        } else if c == '(' {
            out.push((col, Token::LParen));
            i += 1;
        } else if c == ')' {
            out.push((col, Token::RParen));
            i += 1;
        } else {
            return Err(parse_error(col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    arity: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn end_col(&self) -> usize {
        self.tokens.last().map_or(1, |(c, _)| c + 1)
    }

    fn next(&mut self) -> Result<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| parse_error(self.end_col(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eat_op(&mut self, ops: &str) -> Option<char> {
        match self.peek() {
            Some((_, Token::Op(c))) if ops.contains(*c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op("+-") {
            let rhs = self.term()?;
            lhs = if op == '+' { Expr::Add(Box::new(lhs), Box::new(rhs)) } else { Expr::Sub(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op("*/") {
            let rhs = self.unary()?;
            lhs = if op == '*' { Expr::Mul(Box::new(lhs), Box::new(rhs)) } else { Expr::Div(Box::new(lhs), Box::new(rhs)) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.eat_op("+-") {
            Some('-') => Ok(Expr::Neg(Box::new(self.unary()?))),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        let Some((col, _)) = self.peek().cloned() else { return Ok(base) };
        if self.eat_op("^").is_none() {
            return Ok(base);
        }
        let exponent = self.unary()?;
        let value = constant_value(&exponent).ok_or_else(|| parse_error(col, "exponent must be a constant"))?;
        if let Some(k) = value.as_rational().filter(|r| r.is_integer()).and_then(|r| num_traits::ToPrimitive::to_i64(&r.to_integer())) {
            return Ok(Expr::PowInt(Box::new(base), k));
        }
        let z = value.to_complex();
        if z.im != 0.0 {
            return Err(parse_error(col, "exponent must be real"));
        }
        if z.re.fract() == 0.0 && z.re.abs() < 1e15 {
            return Ok(Expr::PowInt(Box::new(base), z.re as i64));
        }
        Ok(Expr::PowReal(Box::new(base), z.re))
    }

    fn primary(&mut self) -> Result<Expr> {
        let (col, tok) = self.next()?;
        match tok {
            Token::Num(s) => {
                let r = parse_rational(&s).map_err(|_| parse_error(col, format!("malformed number '{s}'")))?;
                Ok(Expr::Const(Coefficient::from_rational(r, Backend::Exact)))
            }
            Token::LParen => {
                let e = self.expr()?;
                match self.next()? {
                    (_, Token::RParen) => Ok(e),
                    (c, t) => Err(parse_error(c, format!("expected ')', found {t}"))),
                }
            }
            Token::Ident(name) => {
                if let Some(f) = Unary::from_name(&name) {
                    match self.next()? {
                        (_, Token::LParen) => {}
                        (c, t) => return Err(parse_error(c, format!("expected '(' after {name}, found {t}"))),
                    }
                    let arg = self.expr()?;
                    match self.next()? {
                        (_, Token::RParen) => Ok(Expr::apply(f, arg)),
                        (c, t) => Err(parse_error(c, format!("expected ')', found {t}"))),
                    }
                } else if name == "pi" {
                    Ok(Expr::Const(Coefficient::real(std::f64::consts::PI)))
                } else if name == "e" {
                    Ok(Expr::Const(Coefficient::real(std::f64::consts::E)))
                } else if let Some(idx) = name.strip_prefix('y').and_then(|d| d.parse::<usize>().ok()) {
                    if idx == 0 || idx > self.arity {
                        Err(parse_error(col, format!("variable {name} is out of range y1..y{}", self.arity)))
                    } else {
                        Ok(Expr::Var(idx - 1))
                    }
                } else {
                    Err(parse_error(col, format!("unknown identifier '{name}'")))
                }
            }
            t => Err(parse_error(col, format!("unexpected {t}"))),
        }
    }
}

fn constant_value(e: &Expr) -> Option<Coefficient> {
    if e.min_arity() > 0 {
        return None;
    }
    if let Some(c) = e.to_poly(0).and_then(|p| p.as_constant()) {
        return Some(c);
    }
    let layout = Layout::new(0, 0);
    e.series(&layout, &[]).ok().map(|s| {
        let v = s.value();
        Coefficient::complex(v.re, v.im)
    })
}
