//! Smooth functions on ℝⁿ and super-functions on ℝ^{n|s}.
//!
//! A [`SmoothFunction`] answers jet queries: partial derivatives at a point.
//! Polynomials answer exactly; elementary expressions and user oracles
//! answer in floating point through truncated Taylor arithmetic.

mod expr;
mod mpoly;
mod series;
mod superfn;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;

pub use expr::{parse_expr, Expr, JetFn, JetOracle};
pub use mpoly::MPoly;
pub use series::Unary;
pub use superfn::SuperFunction;

use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};
use series::Layout;

/// Orders of differentiation `(d₁, …, d_k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(d: Vec<u32>) -> Self {
        MultiIndex(d)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = d₁!⋯d_k!`
    pub fn factorial(&self) -> BigUint {
        self.0.iter().fold(BigUint::from(1u32), |acc, &d| acc * factorial(d))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(d: Vec<u32>) -> Self {
        MultiIndex(d)
    }
}

pub(crate) fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionKind {
    Polynomial,
    Elementary,
    Oracle,
}

/// Scaled derivatives `∂^α f(p) / α!` for `|α| ≤ order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jets {
    arity: usize,
    order: u32,
    backend: Backend,
    coeffs: BTreeMap<Vec<u32>, Coefficient>,
}

impl Jets {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// The Taylor coefficient of `δ^α`; zero beyond the stored order.
    pub fn taylor(&self, alpha: &[u32]) -> Coefficient {
        self.coeffs.get(alpha).cloned().unwrap_or_else(|| Coefficient::zero(self.backend))
    }

    /// `∂^α f(p)`
    pub fn derivative(&self, alpha: &[u32]) -> Coefficient {
        let f = MultiIndex(alpha.to_vec()).factorial();
        &self.taylor(alpha) * &Coefficient::from_rational(BigRational::from_integer(f.into()), self.backend)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &Coefficient)> {
        self.coeffs.iter()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Polynomial(MPoly),
    Expr(Expr),
}

type Memo = Arc<Mutex<HashMap<(Vec<String>, u32), Arc<Jets>>>>;

/// An element of C∞(ℝⁿ), given as a polynomial, an elementary expression or an oracle.
#[derive(Clone)]
pub struct SmoothFunction {
    arity: usize,
    repr: Repr,
    memo: Memo,
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunction").field("arity", &self.arity).field("repr", &self.repr).finish()
    }
}

impl fmt::Display for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Polynomial(p) => write!(f, "{p}"),
            Repr::Expr(e) => write!(f, "{e}"),
        }
    }
}

impl SmoothFunction {
    fn from_repr(arity: usize, repr: Repr) -> Self {
        SmoothFunction { arity, repr, memo: Arc::default() }
    }

    pub fn polynomial(p: MPoly) -> Self {
        Self::from_repr(p.nvars(), Repr::Polynomial(p))
    }

    /// An expression; polynomial expressions are stored as polynomials.
    pub fn expression(e: Expr, arity: usize) -> Result<Self> {
        if e.min_arity() > arity {
            return Err(Error::Shape(format!("expression uses y{} but arity is {arity}", e.min_arity())));
        }
        Ok(match e.to_poly(arity) {
            Some(p) => Self::polynomial(p),
            None => Self::from_repr(arity, Repr::Expr(e)),
        })
    }

    pub fn parse(src: &str, arity: usize) -> Result<Self> {
        Self::expression(parse_expr(src, arity)?, arity)
    }

    pub fn oracle(o: JetOracle) -> Self {
        let n = o.arity();
        let args = (0..n).map(Expr::Var).collect();
        Self::from_repr(n, Repr::Expr(Expr::Call(o, args)))
    }

    pub fn constant(c: Coefficient, arity: usize) -> Self {
        Self::polynomial(MPoly::constant(c, arity))
    }

    /// The coordinate function `y_j` (0-based `j`).
    pub fn projection(j: usize, arity: usize) -> Self {
        Self::polynomial(MPoly::var(j, arity, Backend::Exact))
    }

    /// A univariate elementary function such as `exp`.
    pub fn unary(f: Unary) -> Self {
        Self::from_repr(1, Repr::Expr(Expr::apply(f, Expr::Var(0))))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> FunctionKind {
        match &self.repr {
            Repr::Polynomial(_) => FunctionKind::Polynomial,
            Repr::Expr(e) if e.uses_oracle() => FunctionKind::Oracle,
            Repr::Expr(_) => FunctionKind::Elementary,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.repr, Repr::Polynomial(_))
    }

    pub fn as_polynomial(&self) -> Option<&MPoly> {
        match &self.repr {
            Repr::Polynomial(p) => Some(p),
            Repr::Expr(_) => None,
        }
    }

    /// Backend of jets at exact points: exact only for exact polynomials.
    pub fn backend(&self) -> Backend {
        match &self.repr {
            Repr::Polynomial(p) => p.backend(),
            Repr::Expr(_) => Backend::Numeric,
        }
    }

    /// Whether the function is only defined for real arguments.
    ///
    /// Polynomials extend to complex points; everything else is real-domain.
    pub fn real_domain(&self) -> bool {
        !self.is_polynomial()
    }

    pub fn to_expr(&self) -> Expr {
        match &self.repr {
            Repr::Polynomial(p) => Expr::Poly(p.clone()),
            Repr::Expr(e) => e.clone(),
        }
    }

    /// Scaled derivatives at `point` up to total order `order`, memoized.
    pub fn jets(&self, point: &[Coefficient], order: u32) -> Result<Arc<Jets>> {
        if point.len() != self.arity {
            return Err(Error::Shape(format!("point of length {} for arity {}", point.len(), self.arity)));
        }
        let key = (point.iter().map(memo_key).collect::<Vec<_>>(), order);
        if let Some(j) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(j.clone());
        }
        let jets = Arc::new(self.compute_jets(point, order)?);
        self.memo.lock().expect("memo lock").insert(key, jets.clone());
        Ok(jets)
    }

    fn compute_jets(&self, point: &[Coefficient], order: u32) -> Result<Jets> {
        match &self.repr {
            Repr::Polynomial(p) => {
                let shifted = p.shifted(point, order)?;
                let backend = shifted.backend();
                Ok(Jets { arity: self.arity, order, backend, coeffs: shifted.terms().map(|(e, c)| (e.clone(), c.clone())).collect() })
            }
            Repr::Expr(e) => {
                let mut at = Vec::with_capacity(point.len());
                for x in point {
                    let z = x.to_complex();
                    if !x.is_real() {
                        return Err(Error::Domain(format!("{self} is real-domain; point coordinate {x} is not real")));
                    }
                    at.push(z);
                }
                let layout = Layout::new(self.arity, order);
                let s = e.series(&layout, &at)?;
                let mut coeffs = BTreeMap::new();
                for (m, z) in s.coefficients() {
                    if !z.re.is_finite() || !z.im.is_finite() {
                        return Err(Error::Domain(format!("derivative of {self} is not finite")));
                    }
                    if z != Complex64::new(0.0, 0.0) {
                        coeffs.insert(m.clone(), Coefficient::complex(z.re, z.im));
                    }
                }
                Ok(Jets { arity: self.arity, order, backend: Backend::Numeric, coeffs })
            }
        }
    }

    /// `∂^α f(p)`
    pub fn jet(&self, idx: &MultiIndex, point: &[Coefficient]) -> Result<Coefficient> {
        if idx.arity() != self.arity {
            return Err(Error::Shape(format!("multi-index of length {} for arity {}", idx.arity(), self.arity)));
        }
        Ok(self.jets(point, idx.total())?.derivative(&idx.0))
    }

    /// Value at a point.
    pub fn eval(&self, point: &[Coefficient]) -> Result<Coefficient> {
        Ok(self.jets(point, 0)?.taylor(&vec![0; self.arity]))
    }

    /// `Σ_{|α|≤N} ∂^α f(q)/α! · (y − q)^α` as a polynomial.
    pub fn taylor_poly(&self, q: &[Coefficient], degree: u32) -> Result<SmoothFunction> {
        let jets = self.jets(q, degree)?;
        let n = self.arity;
        let backend = jets.backend().join(q.iter().fold(Backend::Exact, |b, x| b.join(x.backend())));
        let delta = MPoly::from_terms(n, backend, jets.iter().map(|(e, c)| (e.clone(), c.clone())))?;
        let shifts: Vec<MPoly> = (0..n)
            .map(|i| MPoly::var(i, n, backend).sub(&MPoly::constant(q[i].to_backend(backend), n)))
            .collect::<Result<_>>()?;
        Ok(SmoothFunction::polynomial(delta.compose(&shifts)?))
    }

    fn check_arity(&self, o: &Self) -> Result<()> {
        if self.arity != o.arity {
            return Err(Error::Shape(format!("arity {} vs {}", self.arity, o.arity)));
        }
        Ok(())
    }

    fn combine(
        &self,
        o: &Self,
        poly: impl Fn(&MPoly, &MPoly) -> Result<MPoly>,
        expr: impl Fn(Box<Expr>, Box<Expr>) -> Expr,
    ) -> Result<Self> {
        self.check_arity(o)?;
        match (&self.repr, &o.repr) {
            (Repr::Polynomial(a), Repr::Polynomial(b)) => Ok(Self::polynomial(poly(a, b)?)),
            _ => Ok(Self::from_repr(self.arity, Repr::Expr(expr(Box::new(self.to_expr()), Box::new(o.to_expr()))))),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.combine(o, MPoly::add, Expr::Add)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, MPoly::sub, Expr::Sub)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.combine(o, MPoly::mul, Expr::Mul)
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Polynomial(p) => Self::polynomial(p.neg()),
            Repr::Expr(e) => Self::from_repr(self.arity, Repr::Expr(Expr::Neg(Box::new(e.clone())))),
        }
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        match &self.repr {
            Repr::Polynomial(p) => Self::polynomial(p.scale(c)),
            Repr::Expr(e) => {
                let k = Expr::Const(c.clone());
                Self::from_repr(self.arity, Repr::Expr(Expr::Mul(Box::new(k), Box::new(e.clone()))))
            }
        }
    }

    /// `g ∘ (f₁, …, f_m)` where `g = self` has arity `m`.
    pub fn compose(&self, fs: &[SmoothFunction]) -> Result<Self> {
        if fs.len() != self.arity {
            return Err(Error::Shape(format!("{} inner functions for arity {}", fs.len(), self.arity)));
        }
        let n = match fs.first() {
            Some(f) => f.arity,
            None => return Ok(self.clone()),
        };
        if fs.iter().any(|f| f.arity != n) {
            return Err(Error::Shape("inner functions must share an arity".into()));
        }
        if let (Repr::Polynomial(g), Some(inner)) =
            (&self.repr, fs.iter().map(|f| f.as_polynomial().cloned()).collect::<Option<Vec<_>>>())
        {
            return Ok(Self::polynomial(g.compose(&inner)?));
        }
        let args: Vec<Expr> = fs.iter().map(SmoothFunction::to_expr).collect();
        Ok(Self::from_repr(n, Repr::Expr(self.to_expr().substitute(&args)?)))
    }
}

fn memo_key(c: &Coefficient) -> String {
    match c {
        Coefficient::Exact(_) => format!("{c}"),
        Coefficient::Numeric(z) => format!("{:x}:{:x}", z.re.to_bits(), z.im.to_bits()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64) -> Coefficient {
        Coefficient::from_int(n, Backend::Exact)
    }

    #[test]
    fn polynomial_jets_are_exact() {
        let f = SmoothFunction::parse("y1^2", 1).unwrap();
        assert_eq!(f.jet(&MultiIndex(vec![2]), &[ex(0)]).unwrap(), ex(2));
        let g = SmoothFunction::parse("y1*y2", 2).unwrap();
        assert_eq!(g.jet(&MultiIndex(vec![1, 1]), &[ex(5), ex(7)]).unwrap(), ex(1));
    }

    #[test]
    fn exp_jets() {
        let f = SmoothFunction::unary(Unary::Exp);
        let d = f.jet(&MultiIndex(vec![3]), &[ex(0)]).unwrap();
        assert!((d.to_complex() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn log_domain_error() {
        let f = SmoothFunction::parse("log(y1)", 1).unwrap();
        assert!(matches!(f.jet(&MultiIndex(vec![1]), &[ex(0)]), Err(Error::Domain(_))));
        assert!(matches!(f.jet(&MultiIndex(vec![0]), &[Coefficient::complex(1.0, 1.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn taylor_polynomials() {
        let x3 = SmoothFunction::parse("y1^3", 1).unwrap();
        assert!(x3.taylor_poly(&[ex(0)], 2).unwrap().as_polynomial().unwrap().is_zero());

        // 1 + 3(x − 1) + 3(x − 1)² = 3x² − 3x + 1
        let t = x3.taylor_poly(&[ex(1)], 2).unwrap();
        let expected = SmoothFunction::parse("1 + 3*(y1 - 1) + 3*(y1 - 1)^2", 1).unwrap();
        assert_eq!(t.as_polynomial(), expected.as_polynomial());

        let e = SmoothFunction::unary(Unary::Exp).taylor_poly(&[ex(0)], 3).unwrap();
        let p = e.as_polynomial().unwrap();
        for (k, want) in [1.0, 1.0, 0.5, 1.0 / 6.0].iter().enumerate() {
            assert!((p.coefficient(&[k as u32]).to_complex().re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_matches_expression() {
        // An oracle for exp(y1)·y2, compared with the parsed expression.
        let o = JetOracle::new("f", 2, |a, p| {
            let v = p[0].exp();
            Ok(Complex64::new(
                match a[1] {
                    0 => v * p[1],
                    1 => v,
                    _ => 0.0,
                },
                0.0,
            ))
        });
        let f = SmoothFunction::oracle(o);
        assert_eq!(f.kind(), FunctionKind::Oracle);
        let g = SmoothFunction::parse("exp(y1)*y2", 2).unwrap();
        let sq = SmoothFunction::parse("y1^2", 1).unwrap();
        let inner = [sq.clone(), SmoothFunction::parse("y1 + 1", 1).unwrap()];
        let fc = f.compose(&inner).unwrap();
        let gc = g.compose(&inner).unwrap();
        let pt = [Coefficient::ratio(1, 3)];
        let (a, b) = (fc.jets(&pt, 4).unwrap(), gc.jets(&pt, 4).unwrap());
        for k in 0..=4 {
            assert!((a.taylor(&[k]).to_complex() - b.taylor(&[k]).to_complex()).norm() < 1e-12);
        }
    }

    #[test]
    fn memo_is_shared_between_clones() {
        let f = SmoothFunction::parse("sin(y1)", 1).unwrap();
        let g = f.clone();
        let a = f.jets(&[ex(1)], 3).unwrap();
        let b = g.jets(&[ex(1)], 3).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
