//! Truncated multivariate Taylor series with complex float coefficients.
//!
//! A series in `k` variables holds the coefficients of `δ^α` for `|α| ≤ order`.
//! Elementary functions act on a series through their univariate Taylor
//! coefficients at the constant term.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug)]
pub(crate) struct Layout {
    order: u32,
    /// Multi-indices sorted by total degree.
    monos: Vec<Vec<u32>>,
    degrees: Vec<u32>,
    codes: Vec<u64>,
    by_code: HashMap<u64, usize>,
    /// `degree_end[d]` = number of monomials of degree ≤ d.
    degree_end: Vec<usize>,
}

impl Layout {
    pub(crate) fn new(k: usize, order: u32) -> Arc<Self> {
        let mut monos = vec![vec![0; k]];
        let mut degree_end = vec![1];
        let mut frontier = monos.clone();
        for _ in 1..=order {
            let mut next: Vec<Vec<u32>> = Vec::new();
            for m in &frontier {
                // Raise only the last nonzero position or later, so each index appears once.
                let start = m.iter().rposition(|&e| e > 0).unwrap_or(0);
                for i in start..k {
                    let mut n = m.clone();
                    n[i] += 1;
                    next.push(n);
                }
            }
            monos.extend(next.iter().cloned());
            degree_end.push(monos.len());
            frontier = next;
        }
        let radix = u64::from(order) + 1;
        let codes: Vec<u64> = monos
            .iter()
            .map(|m| m.iter().rev().fold(0u64, |acc, &e| acc * radix + u64::from(e)))
            .collect();
        let by_code = codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let degrees = monos.iter().map(|m| m.iter().sum()).collect();
        Arc::new(Layout { order, monos, degrees, codes, by_code, degree_end })
    }

    pub(crate) fn order(&self) -> u32 {
        self.order
    }

    pub(crate) fn monomials(&self) -> &[Vec<u32>] {
        &self.monos
    }

    fn len(&self) -> usize {
        self.monos.len()
    }

    fn index_of(&self, m: &[u32]) -> Option<usize> {
        let radix = u64::from(self.order) + 1;
        if m.iter().sum::<u32>() > self.order {
            return None;
        }
        let code = m.iter().rev().fold(0u64, |acc, &e| acc * radix + u64::from(e));
        self.by_code.get(&code).copied()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Series {
    layout: Arc<Layout>,
    c: Vec<Complex64>,
}

impl Series {
    pub(crate) fn constant(layout: &Arc<Layout>, v: Complex64) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); layout.len()];
        c[0] = v;
        Series { layout: layout.clone(), c }
    }

    /// `v + δ_i`
    pub(crate) fn variable(layout: &Arc<Layout>, i: usize, v: Complex64) -> Self {
        let mut s = Self::constant(layout, v);
        let mut e = vec![0; layout.monos[0].len()];
        e[i] = 1;
        if let Some(idx) = layout.index_of(&e) {
            s.c[idx] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub(crate) fn coefficients(&self) -> impl Iterator<Item = (&Vec<u32>, Complex64)> {
        self.layout.monos.iter().zip(self.c.iter().copied())
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub(crate) fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect();
        Series { layout: self.layout.clone(), c }
    }

    pub(crate) fn sub(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect();
        Series { layout: self.layout.clone(), c }
    }

    pub(crate) fn scale(&self, k: Complex64) -> Self {
        Series { layout: self.layout.clone(), c: self.c.iter().map(|a| a * k).collect() }
    }

    pub(crate) fn add_constant(&self, k: Complex64) -> Self {
        let mut s = self.clone();
        s.c[0] += k;
        s
    }

    pub(crate) fn mul(&self, o: &Self) -> Self {
        let l = &self.layout;
        let mut out = vec![Complex64::new(0.0, 0.0); l.len()];
        for (i, a) in self.c.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let limit = l.degree_end[(l.order - l.degrees[i]) as usize];
            for (j, b) in o.c[..limit].iter().enumerate() {
                if *b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let idx = l.by_code[&(l.codes[i] + l.codes[j])];
                out[idx] += a * b;
            }
        }
        Series { layout: l.clone(), c: out }
    }

    /// The series with its constant term removed.
    pub(crate) fn offset(&self) -> Self {
        let mut s = self.clone();
        s.c[0] = Complex64::new(0.0, 0.0);
        s
    }

    /// `Σ_k a_k (self − self₀)^k` by Horner's scheme.
    pub(crate) fn apply_taylor(&self, a: &[Complex64]) -> Self {
        let delta = self.offset();
        let mut acc = Self::constant(&self.layout, Complex64::new(0.0, 0.0));
        for &ak in a.iter().rev() {
            acc = acc.mul(&delta).add_constant(ak);
        }
        acc
    }

    fn order(&self) -> usize {
        self.layout.order as usize
    }

    pub(crate) fn unary(&self, f: Unary) -> Result<Self> {
        let u0 = self.value();
        let n = self.order();
        let a = f.taylor_coefficients(u0, n)?;
        Ok(self.apply_taylor(&a))
    }

    pub(crate) fn recip(&self) -> Result<Self> {
        let u0 = self.value();
        if u0.norm() == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let inv = u0.inv();
        let a: Vec<Complex64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { inv.powu(k as u32 + 1) } else { -inv.powu(k as u32 + 1) })
            .collect();
        Ok(self.apply_taylor(&a))
    }

    pub(crate) fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    pub(crate) fn powi(&self, p: i64) -> Result<Self> {
        if p >= 0 {
            let mut acc = Self::constant(&self.layout, Complex64::new(1.0, 0.0));
            for _ in 0..p {
                acc = acc.mul(self);
            }
            Ok(acc)
        } else {
            self.recip()?.powi(-p)
        }
    }

    /// `u^p` for real, non-integer `p`; needs a positive real constant term.
    pub(crate) fn powf(&self, p: f64) -> Result<Self> {
        let u0 = self.value();
        if u0.im != 0.0 || u0.re < 0.0 || (u0.re == 0.0 && (p < 0.0 || self.order() > 0)) {
            return Err(Error::Domain(format!("power {p} is not smooth at {u0}")));
        }
        // Generalized binomial coefficients C(p, k) u0^{p-k}.
        let mut a = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        for k in 0..=self.order() {
            a.push(Complex64::new(binom * u0.re.powf(p - k as f64), 0.0));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        Ok(self.apply_taylor(&a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unary {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Unary {
    pub fn name(self) -> &'static str {
        match self {
            Unary::Exp => "exp",
            Unary::Log => "log",
            Unary::Sin => "sin",
            Unary::Cos => "cos",
            Unary::Tan => "tan",
            Unary::Sinh => "sinh",
            Unary::Cosh => "cosh",
            Unary::Tanh => "tanh",
            Unary::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => Unary::Exp,
            "log" | "ln" => Unary::Log,
            "sin" => Unary::Sin,
            "cos" => Unary::Cos,
            "tan" => Unary::Tan,
            "sinh" => Unary::Sinh,
            "cosh" => Unary::Cosh,
            "tanh" => Unary::Tanh,
            "sqrt" => Unary::Sqrt,
            _ => return None,
        })
    }

    /// `f^{(k)}(u0) / k!` for `k = 0..=n`.
    fn taylor_coefficients(self, u0: Complex64, n: usize) -> Result<Vec<Complex64>> {
        if u0.im != 0.0 {
            return Err(Error::Domain(format!("{} is applied at the non-real point {u0}", self.name())));
        }
        let x = u0.re;
        let inv_fact: Vec<f64> = inverse_factorials(n);
        let real = |v: Vec<f64>| v.into_iter().map(|r| Complex64::new(r, 0.0)).collect::<Vec<_>>();
        let out = match self {
            Unary::Exp => real((0..=n).map(|k| x.exp() * inv_fact[k]).collect()),
            Unary::Sin | Unary::Cos => {
                let (s, c) = x.sin_cos();
                // Derivatives cycle through sin, cos, −sin, −cos.
                let cycle = if self == Unary::Sin { [s, c, -s, -c] } else { [c, -s, -c, s] };
                real((0..=n).map(|k| cycle[k % 4] * inv_fact[k]).collect())
            }
            Unary::Sinh | Unary::Cosh => {
                let (sh, ch) = (x.sinh(), x.cosh());
                let pair = if self == Unary::Sinh { [sh, ch] } else { [ch, sh] };
                real((0..=n).map(|k| pair[k % 2] * inv_fact[k]).collect())
            }
            Unary::Log => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log is not defined at {x}")));
                }
                let mut v = vec![x.ln()];
                for k in 1..=n {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    v.push(sign / (k as f64 * x.powi(k as i32)));
                }
                real(v)
            }
            Unary::Tan | Unary::Tanh | Unary::Sqrt => {
                unreachable!("handled through other series operations")
            }
        };
        if out.iter().any(|z| !z.re.is_finite()) {
            return Err(Error::Domain(format!("{} overflows at {x}", self.name())));
        }
        Ok(out)
    }
}

impl Series {
    pub(crate) fn apply(&self, f: Unary) -> Result<Self> {
        match f {
            Unary::Tan => self.unary(Unary::Sin)?.div(&self.unary(Unary::Cos)?),
            Unary::Tanh => self.unary(Unary::Sinh)?.div(&self.unary(Unary::Cosh)?),
            Unary::Sqrt => self.powf(0.5),
            _ => self.unary(f),
        }
    }
}

/// `1/k!` from exact integer factorials.
pub(crate) fn inverse_factorials(n: usize) -> Vec<f64> {
    use num_traits::ToPrimitive;
    let mut f = num_bigint::BigUint::from(1u32);
    let mut out = vec![1.0];
    for k in 1..=n {
        f *= k;
        out.push(1.0 / f.to_f64().unwrap_or(f64::INFINITY));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn layout_enumerates_each_index_once() {
        let l = Layout::new(3, 4);
        // C(3 + 4, 3) monomials of degree ≤ 4 in 3 variables.
        assert_eq!(l.monomials().len(), 35);
        let mut sorted = l.monomials().to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 35);
    }

    #[test]
    fn exp_of_sum_factorizes() {
        let l = Layout::new(2, 5);
        let x = Series::variable(&l, 0, re(0.3));
        let y = Series::variable(&l, 1, re(-0.7));
        let lhs = x.add(&y).apply(Unary::Exp).unwrap();
        let rhs = x.apply(Unary::Exp).unwrap().mul(&y.apply(Unary::Exp).unwrap());
        for ((_, a), (_, b)) in lhs.coefficients().zip(rhs.coefficients()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let l = Layout::new(1, 6);
        let x = Series::variable(&l, 0, re(2.0));
        let r = x.apply(Unary::Sqrt).unwrap();
        let back = r.mul(&r).sub(&x);
        assert!(back.coefficients().all(|(_, z)| z.norm() < 1e-14));
    }

    #[test]
    fn domain_errors() {
        let l = Layout::new(1, 2);
        assert!(Series::variable(&l, 0, re(0.0)).apply(Unary::Log).is_err());
        assert!(Series::variable(&l, 0, re(-1.0)).apply(Unary::Sqrt).is_err());
        assert!(Series::variable(&l, 0, re(0.0)).recip().is_err());
    }
}
