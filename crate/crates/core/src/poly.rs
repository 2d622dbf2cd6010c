//! Univariate polynomials over [`Coefficient`].
//!
//! Used for characteristic polynomials, Bezout identities and root finding.
//! Exact-backend polynomials are handled with exact field arithmetic;
//! numeric ones only need evaluation and multiplication.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeff::{Backend, Coefficient, GaussRational};
use crate::error::{Error, Result};

/// Coefficients in ascending order of degree, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    backend: Backend,
    coeffs: Vec<Coefficient>,
}

impl Poly {
    pub fn zero(backend: Backend) -> Self {
        Poly { backend, coeffs: Vec::new() }
    }

    pub fn one(backend: Backend) -> Self {
        Self::constant(Coefficient::one(backend))
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::new(c.backend(), vec![c])
    }

    /// `t`
    pub fn t(backend: Backend) -> Self {
        Self::new(backend, vec![Coefficient::zero(backend), Coefficient::one(backend)])
    }

    /// `t - λ`
    pub fn linear(lambda: &Coefficient) -> Self {
        let backend = lambda.backend();
        Self::new(backend, vec![-lambda, Coefficient::one(backend)])
    }

    pub fn new(backend: Backend, coeffs: Vec<Coefficient>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c.to_backend(backend)).collect();
        let mut p = Poly { backend, coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(Backend::Exact, coeffs.iter().map(|&c| Coefficient::from_int(c, Backend::Exact)).collect())
    }

    /// ∏ (t - λᵢ)^{dᵢ}
    pub fn from_roots(roots: &[(Coefficient, usize)], backend: Backend) -> Self {
        roots
            .iter()
            .fold(Self::one(backend), |acc, (lambda, d)| &acc * &Self::linear(&lambda.to_backend(backend)).pow(*d as u32))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Coefficient::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Coefficient {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Coefficient::zero(self.backend))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Coefficient {
        self.coeffs.last().cloned().unwrap_or_else(|| Coefficient::zero(self.backend))
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        Self::new(backend, self.coeffs.clone())
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let backend = self.backend.join(c.backend());
        Self::new(backend, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading().inv() {
            Some(inv) if !self.is_zero() => self.scale(&inv),
            _ => self.clone(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.backend);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Horner evaluation at a scalar.
    pub fn eval(&self, x: &Coefficient) -> Coefficient {
        let backend = self.backend.join(x.backend());
        self.coeffs
            .iter()
            .rev()
            .fold(Coefficient::zero(backend), |acc, c| &(&acc * x) + c)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * &Coefficient::from_int(k as i64, self.backend))
            .collect();
        Self::new(self.backend, coeffs)
    }

    /// Euclidean division: `self = q·d + r`, `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::Precondition("polynomial division by zero".into()));
        }
        let backend = self.backend.join(d.backend);
        let lead_inv = d.leading().inv().expect("nonzero leading coefficient");
        let mut rem = self.to_backend(backend).coeffs;
        let dn = d.degree();
        if rem.len() <= dn {
            return Ok((Poly::zero(backend), Poly::new(backend, rem)));
        }
        let mut quot = vec![Coefficient::zero(backend); rem.len() - dn];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dn] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * dc);
            }
            quot[k] = c;
        }
        rem.truncate(dn);
        Ok((Poly::new(backend, quot), Poly::new(backend, rem)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.div_rem(d)?.1)
    }

    /// Division known to be exact; the remainder is discarded.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        self.div_rem(d).expect("nonzero divisor").0
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (g, _, _) = self.ext_gcd(other);
        g
    }

    /// Returns `(g, u, v)` with `u·self + v·other = g`, `g` monic (or zero).
    ///
    /// Each remainder is normalized to be monic before the next step.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let backend = self.backend.join(other.backend);
        let (mut r0, mut r1) = (self.to_backend(backend), other.to_backend(backend));
        let (mut u0, mut u1) = (Poly::one(backend), Poly::zero(backend));
        let (mut v0, mut v1) = (Poly::zero(backend), Poly::one(backend));
        while !r1.is_zero() {
            let inv = r1.leading().inv().expect("nonzero");
            r1 = r1.scale(&inv);
            u1 = u1.scale(&inv);
            v1 = v1.scale(&inv);
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let u2 = &u0 - &(&q * &u1);
            let v2 = &v0 - &(&q * &v1);
            r0 = std::mem::replace(&mut r1, r);
            u0 = std::mem::replace(&mut u1, u2);
            v0 = std::mem::replace(&mut v1, v2);
        }
        if let Some(inv) = r0.leading().inv().filter(|_| !r0.is_zero()) {
            (r0.scale(&inv), u0.scale(&inv), v0.scale(&inv))
        } else {
            (r0, u0, v0)
        }
    }

    /// Product of the distinct irreducible factors (over ℚ(i)), made monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree() == 0 {
            return Poly::one(self.backend);
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).monic()
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_real)
    }
}

/// Bezout coefficients `h` with `Σ hᵢ gᵢ = 1` for coprime exact polynomials.
pub fn bezout(gs: &[Poly]) -> Result<Vec<Poly>> {
    let Some(first) = gs.first() else {
        return Err(Error::Precondition("bezout needs at least one polynomial".into()));
    };
    let backend = gs.iter().fold(first.backend, |b, g| b.join(g.backend));
    // Running identity: Σ_{i<k} hᵢ gᵢ = acc, acc monic.
    let mut hs = vec![Poly::one(backend)];
    let mut acc = first.clone();
    if let Some(inv) = acc.leading().inv().filter(|_| !acc.is_zero()) {
        acc = acc.scale(&inv);
        hs[0] = hs[0].scale(&inv);
    }
    for g in &gs[1..] {
        let (d, u, v) = acc.ext_gcd(g);
        for h in hs.iter_mut() {
            *h = &*h * &u;
        }
        hs.push(v);
        acc = d;
    }
    if acc.is_zero() || acc.degree() > 0 {
        return Err(Error::NotCoprime { degree: acc.degree() });
    }
    // `acc` is the monic constant 1 here.
    Ok(hs)
}

/// Number of distinct real roots of an exact real polynomial (Sturm's theorem).
pub fn count_distinct_real_roots(p: &Poly) -> Result<usize> {
    if p.backend != Backend::Exact || !p.has_real_coefficients() {
        return Err(Error::Precondition("Sturm sequences need an exact real polynomial".into()));
    }
    if p.degree() == 0 {
        return Ok(0);
    }
    let p = p.squarefree_part();
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1])?;
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    // Sign changes at -∞ and +∞ follow from leading coefficients and degrees.
    let sign_at = |q: &Poly, positive_infinity: bool| -> i32 {
        let lead = q.leading().as_rational().cloned().unwrap_or_else(BigRational::zero);
        let s = if lead.is_positive() { 1 } else if lead.is_negative() { -1 } else { 0 };
        if positive_infinity || q.degree() % 2 == 0 {
            s
        } else {
            -s
        }
    };
    let changes = |positive: bool| {
        let signs: Vec<i32> = seq.iter().map(|q| sign_at(q, positive)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    Ok(changes(false) - changes(true))
}

/// Rational roots of an exact polynomial with rational coefficients, with multiplicities,
/// sorted ascending. Roots outside ℚ are not reported.
pub fn rational_roots(p: &Poly) -> Result<Vec<(BigRational, usize)>> {
    if p.backend != Backend::Exact || !p.has_real_coefficients() {
        return Err(Error::Precondition("rational root search needs an exact real polynomial".into()));
    }
    if p.is_zero() {
        return Err(Error::Precondition("the zero polynomial has every root".into()));
    }
    let sf = p.squarefree_part();
    let mut candidates: Vec<BigRational> = Vec::new();
    if sf.degree() > 0 {
        // Any rational root p/q has q | lead of the primitive integer form;
        // numeric roots of the squarefree part locate them on that grid.
        let lead = primitive_integer_leading(&sf);
        for z in numeric_roots(&sf)? {
            if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                continue;
            }
            let scaled = z.re * lead.to_f64().unwrap_or(f64::INFINITY);
            if !scaled.is_finite() {
                continue;
            }
            let nearest = scaled.round();
            for offset in [0.0, -1.0, 1.0] {
                if let Some(num) = BigRational::from_float(nearest + offset) {
                    candidates.push(num / BigRational::from_integer(lead.clone()));
                }
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    let mut out = Vec::new();
    let mut rest = p.clone();
    for cand in candidates {
        let lin = Poly::linear(&Coefficient::from_rational(cand.clone(), Backend::Exact));
        let mut mult = 0;
        loop {
            let (q, r) = rest.div_rem(&lin)?;
            if !r.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            out.push((cand, mult));
        }
    }
    Ok(out)
}

fn primitive_integer_leading(p: &Poly) -> BigInt {
    let denoms_lcm = p
        .coeffs
        .iter()
        .filter_map(|c| c.as_rational())
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = p
        .coeffs
        .iter()
        .filter_map(|c| c.as_rational())
        .map(|r| (r * BigRational::from_integer(denoms_lcm.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let lead = ints.last().cloned().unwrap_or_else(BigInt::one);
    if content.is_zero() {
        lead.abs()
    } else {
        (lead / content).abs()
    }
}

/// Complex roots via eigenvalues of the companion matrix.
pub fn numeric_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if p.is_zero() {
        return Err(Error::Precondition("the zero polynomial has every root".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<Complex64> = {
        let lead = p.leading().to_complex();
        p.coeffs.iter().map(|c| c.to_complex() / lead).collect()
    };
    let mut companion = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -monic[i];
    }
    crate::linalg::complex_eigenvalues(companion)
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let backend = self.backend.join(o.backend);
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(backend, (0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let backend = self.backend.join(o.backend);
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(backend, (0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let backend = self.backend.join(o.backend);
        if self.is_zero() || o.is_zero() {
            return Poly::zero(backend);
        }
        let mut out = vec![Coefficient::zero(backend); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(backend, out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.backend, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                _ => {
                    if !c.is_one() {
                        write!(f, "{c}·")?;
                    }
                    if k == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl From<GaussRational> for Poly {
    fn from(q: GaussRational) -> Self {
        Poly::constant(Coefficient::Exact(q))
    }
}
