use std::collections::BTreeMap;
use std::fmt;

use super::SmoothFunction;
use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};
use crate::grassmann::{AlgebraSignature, Monomial};

/// `f = Σ_I f_I ϑ^I` with smooth coefficients `f_I` on ℝⁿ.
///
/// Monomials `ϑ^I` list their generators in ascending order.
#[derive(Clone, Debug)]
pub struct SuperFunction {
    n: usize,
    s2: u32,
    components: BTreeMap<Monomial, SmoothFunction>,
}

impl SuperFunction {
    pub fn zero(n: usize, s2: u32) -> Self {
        SuperFunction { n, s2, components: BTreeMap::new() }
    }

    pub fn from_components(n: usize, s2: u32, comps: impl IntoIterator<Item = (Monomial, SmoothFunction)>) -> Result<Self> {
        AlgebraSignature::new(s2)?;
        let mut out = Self::zero(n, s2);
        for (m, f) in comps {
            if f.arity() != n {
                return Err(Error::Shape(format!("component on ϑ{:?} has arity {}, expected {n}", m.indices(), f.arity())));
            }
            if m.indices().iter().any(|&i| i > s2) {
                return Err(Error::Structure(format!("monomial {:?} exceeds ϑ{s2}", m.indices())));
            }
            out.accumulate(m, f)?;
        }
        Ok(out)
    }

    /// A purely even super-function `f·1`.
    pub fn even(f: SmoothFunction, s2: u32) -> Self {
        let n = f.arity();
        Self::from_components(n, s2, [(Monomial(0), f)]).expect("empty monomial fits every algebra")
    }

    /// The coordinate `y^j` (1-based `j`).
    pub fn y(j: usize, n: usize, s2: u32) -> Self {
        Self::even(SmoothFunction::projection(j - 1, n), s2)
    }

    /// The odd coordinate `ϑ^l` (1-based `l`).
    pub fn theta(l: u32, n: usize, s2: u32) -> Result<Self> {
        let m = Monomial::from_indices(&[l])?;
        let one = SmoothFunction::constant(Coefficient::one(Backend::Exact), n);
        Self::from_components(n, s2, [(m, one)])
    }

    fn accumulate(&mut self, m: Monomial, f: SmoothFunction) -> Result<()> {
        let next = match self.components.remove(&m) {
            Some(g) => g.add(&f)?,
            None => f,
        };
        let vanished = next.as_polynomial().is_some_and(|p| p.is_zero());
        if !vanished {
            self.components.insert(m, next);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s2(&self) -> u32 {
        self.s2
    }

    pub fn components(&self) -> impl Iterator<Item = (&Monomial, &SmoothFunction)> {
        self.components.iter()
    }

    pub fn component(&self, m: Monomial) -> Option<&SmoothFunction> {
        self.components.get(&m)
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.values().all(SmoothFunction::is_polynomial)
    }

    pub fn even_part(&self) -> Self {
        self.filter(|m| m.is_even())
    }

    pub fn odd_part(&self) -> Self {
        self.filter(|m| !m.is_even())
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        let components = self.components.iter().filter(|(m, _)| keep(m)).map(|(m, f)| (*m, f.clone())).collect();
        SuperFunction { n: self.n, s2: self.s2, components }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n || self.s2 != o.s2 {
            return Err(Error::Shape(format!("ℝ^{{{}|{}}} vs ℝ^{{{}|{}}}", self.n, self.s2, o.n, o.s2)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (m, f) in &o.components {
            out.accumulate(*m, f.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        let components = self.components.iter().map(|(m, f)| (*m, f.neg())).collect();
        SuperFunction { n: self.n, s2: self.s2, components }
    }

    /// Product with the sign from reordering `ϑ^I ϑ^J` into ascending order.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let sig = AlgebraSignature::new(self.s2)?;
        let mut out = Self::zero(self.n, self.s2);
        for (ma, fa) in &self.components {
            for (mb, fb) in &o.components {
                let Some((m, negative)) = sig.multiply_monomials(*ma, *mb) else { continue };
                let prod = fa.mul(fb)?;
                out.accumulate(m, if negative { prod.neg() } else { prod })?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for SuperFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.components.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let theta: String = m.indices().iter().map(|i| format!("ϑ{i}")).collect();
            if theta.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})·{theta}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_of(f: &SuperFunction, idx: &[u32]) -> Option<crate::smoothfn::MPoly> {
        let m = Monomial::from_indices(idx).unwrap();
        f.component(m).map(|c| c.as_polynomial().unwrap().clone())
    }

    fn parse(s: &str) -> SmoothFunction {
        SmoothFunction::parse(s, 1).unwrap()
    }

    #[test]
    fn odd_generators_anticommute() {
        let t1 = SuperFunction::theta(1, 1, 2).unwrap();
        let t2 = SuperFunction::theta(2, 1, 2).unwrap();
        let a = t1.mul(&t2).unwrap();
        let b = t2.mul(&t1).unwrap();
        assert_eq!(poly_of(&a, &[1, 2]), parse("1").as_polynomial().cloned());
        assert_eq!(poly_of(&b, &[1, 2]), parse("-1").as_polynomial().cloned());
    }

    #[test]
    fn square_of_odd_vanishes() {
        let y = SuperFunction::y(1, 1, 1);
        let t = SuperFunction::theta(1, 1, 1).unwrap();
        let prod = y.add(&t).unwrap().mul(&y.sub(&t).unwrap()).unwrap();
        assert_eq!(prod.components().count(), 1);
        assert_eq!(poly_of(&prod, &[]), parse("y1^2").as_polynomial().cloned());
    }

    #[test]
    fn one_plus_y_theta_squared() {
        let f = SuperFunction::from_components(
            1,
            1,
            [(Monomial(0), parse("1")), (Monomial::from_indices(&[1]).unwrap(), parse("y1"))],
        )
        .unwrap();
        let sq = f.mul(&f).unwrap();
        assert_eq!(poly_of(&sq, &[]), parse("1").as_polynomial().cloned());
        assert_eq!(poly_of(&sq, &[1]), parse("2*y1").as_polynomial().cloned());
    }

    #[test]
    fn parts() {
        let f = SuperFunction::from_components(
            1,
            2,
            [(Monomial(0), parse("y1")), (Monomial::from_indices(&[2]).unwrap(), parse("3")), (Monomial(0b11), parse("exp(y1)"))],
        )
        .unwrap();
        assert_eq!(f.even_part().components().count(), 2);
        assert_eq!(f.odd_part().components().count(), 1);
        assert!(!f.is_polynomial());
    }
}
