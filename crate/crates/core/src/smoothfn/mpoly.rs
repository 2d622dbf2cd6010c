//! Multivariate polynomials with [`Coefficient`] coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};

/// Sparse polynomial in `y1..yn`, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    nvars: usize,
    backend: Backend,
    terms: BTreeMap<Vec<u32>, Coefficient>,
}

impl MPoly {
    pub fn zero(nvars: usize, backend: Backend) -> Self {
        MPoly { nvars, backend, terms: BTreeMap::new() }
    }

    pub fn constant(c: Coefficient, nvars: usize) -> Self {
        let mut p = Self::zero(nvars, c.backend());
        p.accumulate(vec![0; nvars], c);
        p
    }

    /// `y_i`, 0-based.
    pub fn var(i: usize, nvars: usize, backend: Backend) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars, backend);
        p.accumulate(e, Coefficient::one(backend));
        p
    }

    pub fn from_terms(nvars: usize, backend: Backend, terms: impl IntoIterator<Item = (Vec<u32>, Coefficient)>) -> Result<Self> {
        let mut p = Self::zero(nvars, backend);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Shape(format!("exponent vector of length {} for {nvars} variables", e.len())));
            }
            p.accumulate(e, c.to_backend(backend));
        }
        Ok(p)
    }

    fn accumulate(&mut self, e: Vec<u32>, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let c = c.to_backend(self.backend);
        match self.terms.get_mut(&e) {
            Some(x) => {
                let sum = &*x + &c;
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *x = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> Coefficient {
        self.terms.get(e).cloned().unwrap_or_else(|| Coefficient::zero(self.backend))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// The constant value, if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<Coefficient> {
        match self.terms.len() {
            0 => Some(Coefficient::zero(self.backend)),
            1 => self.terms.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        let mut p = Self::zero(self.nvars, backend);
        for (e, c) in &self.terms {
            p.accumulate(e.clone(), c.to_backend(backend));
        }
        p
    }

    fn check(&self, o: &Self) -> Result<Backend> {
        if self.nvars != o.nvars {
            return Err(Error::Shape(format!("{} vs {} variables", self.nvars, o.nvars)));
        }
        Ok(self.backend.join(o.backend))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let backend = self.check(o)?;
        let mut p = self.to_backend(backend);
        for (e, c) in &o.terms {
            p.accumulate(e.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Coefficient::one(self.backend))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let backend = self.check(o)?;
        let mut p = Self::zero(self.nvars, backend);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.accumulate(e, ca * cb);
            }
        }
        Ok(p)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let backend = self.backend.join(c.backend());
        let mut p = Self::zero(self.nvars, backend);
        for (e, x) in &self.terms {
            p.accumulate(e.clone(), x * c);
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(Coefficient::one(self.backend), self.nvars);
        for _ in 0..k {
            acc = acc.mul(self).expect("same arity");
        }
        acc
    }

    /// `∂^k/∂y_i^k`, 0-based.
    pub fn derivative(&self, i: usize, k: u32) -> Self {
        let mut p = Self::zero(self.nvars, self.backend);
        for (e, c) in &self.terms {
            if e[i] < k {
                continue;
            }
            let falling: i64 = (0..k).map(|j| i64::from(e[i] - j)).product();
            let mut e2 = e.clone();
            e2[i] -= k;
            p.accumulate(e2, c * &Coefficient::from_int(falling, self.backend));
        }
        p
    }

    pub fn eval(&self, point: &[Coefficient]) -> Result<Coefficient> {
        if point.len() != self.nvars {
            return Err(Error::Shape(format!("point of length {} for {} variables", point.len(), self.nvars)));
        }
        let backend = point.iter().fold(self.backend, |b, x| b.join(x.backend()));
        let mut acc = Coefficient::zero(backend);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = &t * &x.pow(k);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Substitutes `y_i ↦ args[i]`; all `args` must share an arity.
    pub fn compose(&self, args: &[MPoly]) -> Result<Self> {
        if args.len() != self.nvars {
            return Err(Error::Shape(format!("{} arguments for {} variables", args.len(), self.nvars)));
        }
        let m = args.first().map_or(0, MPoly::nvars);
        let backend = args.iter().fold(self.backend, |b, a| b.join(a.backend));
        let mut out = Self::zero(m, backend);
        for (e, c) in &self.terms {
            let mut t = Self::constant(c.clone(), m);
            for (a, &k) in args.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&a.pow(k))?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Coefficients of `p(q + δ)` in `δ`, keeping total degree ≤ `order`.
    ///
    /// These are the scaled derivatives `∂^α p(q) / α!`.
    pub fn shifted(&self, q: &[Coefficient], order: u32) -> Result<Self> {
        if q.len() != self.nvars {
            return Err(Error::Shape(format!("point of length {} for {} variables", q.len(), self.nvars)));
        }
        let backend = q.iter().fold(self.backend, |b, x| b.join(x.backend()));
        let mut out = Self::zero(self.nvars, backend);
        for (e, c) in &self.terms {
            // Expand ∏ (δ_i + q_i)^{e_i} one variable at a time.
            let mut partial: Vec<(Vec<u32>, Coefficient)> = vec![(vec![0; self.nvars], c.to_backend(backend))];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut next = Vec::new();
                for (pe, pc) in &partial {
                    let used: u32 = pe.iter().sum();
                    for j in 0..=k.min(order.saturating_sub(used)) {
                        let coeff = &(pc * &binomial(k, j, backend)) * &q[i].pow(k - j);
                        if coeff.is_zero() {
                            continue;
                        }
                        let mut ne = pe.clone();
                        ne[i] = j;
                        next.push((ne, coeff));
                    }
                }
                partial = next;
            }
            for (pe, pc) in partial {
                out.accumulate(pe, pc);
            }
        }
        Ok(out)
    }
}

pub(crate) fn binomial(n: u32, k: u32, backend: Backend) -> Coefficient {
    let mut num = num_bigint::BigInt::from(1);
    let mut den = num_bigint::BigInt::from(1);
    for j in 0..k {
        num *= n - j;
        den *= j + 1;
    }
    Coefficient::from_rational(num_rational::BigRational::new(num, den), backend)
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("y{}", i + 1) } else { format!("y{}^{k}", i + 1) })
                .collect();
            match (vars.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => f.write_str(&vars.join("·"))?,
                (false, false) => write!(f, "{c}·{}", vars.join("·"))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: i64) -> Coefficient {
        Coefficient::from_int(n, Backend::Exact)
    }

    #[test]
    fn derivative_and_eval() {
        // y1² y2 + 3 y2
        let p = MPoly::from_terms(2, Backend::Exact, [(vec![2, 1], ex(1)), (vec![0, 1], ex(3))]).unwrap();
        assert_eq!(p.derivative(0, 2), MPoly::from_terms(2, Backend::Exact, [(vec![0, 1], ex(2))]).unwrap());
        assert_eq!(p.eval(&[ex(2), ex(5)]).unwrap(), ex(35));
    }

    #[test]
    fn shift_is_taylor_expansion() {
        // x³ at 1: 1 + 3δ + 3δ² + δ³
        let x3 = MPoly::var(0, 1, Backend::Exact).pow(3);
        let s = x3.shifted(&[ex(1)], 3).unwrap();
        let expected = MPoly::from_terms(1, Backend::Exact, (0..4).map(|k| (vec![k], binomial(3, k, Backend::Exact)))).unwrap();
        assert_eq!(s, expected);
        let trunc = x3.shifted(&[ex(1)], 1).unwrap();
        assert_eq!(trunc.total_degree(), 1);
    }

    #[test]
    fn composition() {
        let sq = MPoly::var(0, 1, Backend::Exact).pow(2);
        let inner = MPoly::var(0, 1, Backend::Exact).add(&MPoly::constant(ex(1), 1)).unwrap();
        let c = sq.compose(&[inner]).unwrap();
        assert_eq!(c, MPoly::from_terms(1, Backend::Exact, [(vec![0], ex(1)), (vec![1], ex(2)), (vec![2], ex(1))]).unwrap());
    }
}
