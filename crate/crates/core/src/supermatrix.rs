//! Square matrices over a Grassmann algebra, M_{r×r}(Ĉ_[s]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};
use crate::grassmann::{AlgebraSignature, GrassmannElement, Parity};
use crate::linalg::Mat;
use crate::poly::Poly;

/// Default absolute tolerance for zero tests on the numeric backend.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SuperMatrix {
    r: usize,
    sig: AlgebraSignature,
    backend: Backend,
    entries: Vec<GrassmannElement>,
}

/// Outcome of testing `ab ∓ ba = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutationClass {
    /// `ab = ba` (reported even if `ab = -ba` holds as well).
    Commute,
    Anticommute,
    Neither,
}

impl SuperMatrix {
    pub fn zero(r: usize, sig: AlgebraSignature, backend: Backend) -> Self {
        SuperMatrix { r, sig, backend, entries: vec![GrassmannElement::zero(sig, backend); r * r] }
    }

    pub fn identity(r: usize, sig: AlgebraSignature, backend: Backend) -> Self {
        Self::scalar(&GrassmannElement::one(sig, backend), r)
    }

    /// `x·I`
    pub fn scalar(x: &GrassmannElement, r: usize) -> Self {
        let mut m = Self::zero(r, x.signature(), x.backend());
        for i in 0..r {
            m.entries[i * r + i] = x.clone();
        }
        m
    }

    /// Row-major entries; all must share signature and backend.
    pub fn from_entries(r: usize, entries: Vec<GrassmannElement>) -> Result<Self> {
        if entries.len() != r * r {
            return Err(Error::Shape(format!("{} entries for a {r}×{r} matrix", entries.len())));
        }
        let Some(first) = entries.first() else {
            return Err(Error::Shape("a 0×0 matrix needs an explicit signature; use `zero`".into()));
        };
        let (sig, backend) = (first.signature(), first.backend());
        if let Some(bad) = entries.iter().position(|e| e.signature() != sig || e.backend() != backend) {
            return Err(Error::Structure(format!(
                "entry ({}, {}) is over a different algebra or backend",
                bad / r,
                bad % r
            )));
        }
        Ok(SuperMatrix { r, sig, backend, entries })
    }

    /// Embeds a complex matrix as a matrix with zero soul.
    pub fn from_body(body: &Mat, sig: AlgebraSignature) -> Result<Self> {
        if !body.is_square() {
            return Err(Error::Shape("body must be square".into()));
        }
        let r = body.rows();
        let mut m = Self::zero(r, sig, body.backend());
        for i in 0..r {
            for j in 0..r {
                m.entries[i * r + j] = GrassmannElement::scalar(body[(i, j)].clone(), sig);
            }
        }
        Ok(m)
    }

    pub fn from_ints(rows: &[&[i64]], sig: AlgebraSignature) -> Self {
        Self::from_body(&Mat::from_ints(rows), sig).expect("square integer matrix")
    }

    /// Assembles a matrix from its columns.
    pub fn from_columns(columns: Vec<Vec<GrassmannElement>>) -> Result<Self> {
        let r = columns.len();
        if columns.iter().any(|c| c.len() != r) {
            return Err(Error::Shape("columns must have length equal to their count".into()));
        }
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            for col in &columns {
                entries.push(col[i].clone());
            }
        }
        Self::from_entries(r, entries)
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.sig
    }

    pub fn generators(&self) -> u32 {
        self.sig.generators()
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn entry(&self, i: usize, j: usize) -> &GrassmannElement {
        &self.entries[i * self.r + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, x: GrassmannElement) -> Result<()> {
        if x.signature() != self.sig || x.backend() != self.backend {
            return Err(Error::Structure("entry over a different algebra or backend".into()));
        }
        self.entries[i * self.r + j] = x;
        Ok(())
    }

    pub fn entries(&self) -> &[GrassmannElement] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<GrassmannElement> {
        (0..self.r).map(|i| self.entry(i, j).clone()).collect()
    }

    /// Entrywise body m₍₀₎.
    pub fn body(&self) -> Mat {
        let rows = (0..self.r).map(|i| (0..self.r).map(|j| self.entry(i, j).body()).collect()).collect();
        Mat::from_rows(self.backend, rows).expect("square")
    }

    /// Entrywise soul m̂₍≥₁₎.
    pub fn soul(&self) -> Self {
        self.map(GrassmannElement::soul)
    }

    pub fn parity(&self) -> Parity {
        let mut even = true;
        let mut odd = true;
        for e in &self.entries {
            match e.parity() {
                Parity::Even if e.is_zero() => {}
                Parity::Even => odd = false,
                Parity::Odd => even = false,
                Parity::Mixed => return Parity::Mixed,
            }
        }
        match (even, odd) {
            (true, _) => Parity::Even,
            (false, true) => Parity::Odd,
            (false, false) => Parity::Mixed,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GrassmannElement::is_zero)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.is_negligible(tol))
    }

    /// Zero test: exact on the exact backend, within `tol` otherwise.
    pub fn vanishes(&self, tol: f64) -> bool {
        match self.backend {
            Backend::Exact => self.is_zero(),
            Backend::Numeric => self.is_negligible(tol),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(GrassmannElement::max_abs).fold(0.0, f64::max)
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        if backend == self.backend {
            return self.clone();
        }
        SuperMatrix {
            r: self.r,
            sig: self.sig,
            backend,
            entries: self.entries.iter().map(|e| e.to_backend(backend)).collect(),
        }
    }

    pub fn to_numeric(&self) -> Self {
        self.to_backend(Backend::Numeric)
    }

    fn map(&self, f: impl Fn(&GrassmannElement) -> GrassmannElement) -> Self {
        let entries: Vec<_> = self.entries.iter().map(f).collect();
        let backend = entries.first().map_or(self.backend, GrassmannElement::backend);
        SuperMatrix { r: self.r, sig: self.sig, backend, entries }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.r != other.r {
            return Err(Error::Shape(format!("{}×{} vs {}×{}", self.r, self.r, other.r, other.r)));
        }
        if self.sig != other.sig || self.backend != other.backend {
            return Err(Error::Structure("matrices over different algebras or backends".into()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(SuperMatrix { entries, ..self.clone_shape() })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(SuperMatrix { entries, ..self.clone_shape() })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let r = self.r;
        let mut out = Self::zero(r, self.sig, self.backend);
        for i in 0..r {
            for k in 0..r {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..r {
                    let b = other.entry(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * r + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    fn clone_shape(&self) -> Self {
        SuperMatrix { r: self.r, sig: self.sig, backend: self.backend, entries: Vec::new() }
    }

    /// Multiplies every entry by a scalar; a numeric scalar makes the result numeric.
    pub fn scale(&self, c: &Coefficient) -> Self {
        let backend = self.backend.join(c.backend());
        let mut m = self.map(|e| e.scale(c));
        m.backend = backend;
        m
    }

    /// `x·M`, multiplying each entry by `x` from the left.
    pub fn left_scalar_mul(&self, x: &GrassmannElement) -> Result<Self> {
        let entries = self.entries.iter().map(|e| x.checked_mul(e)).collect::<Result<Vec<_>>>()?;
        Ok(SuperMatrix { entries, ..self.clone_shape() })
    }

    /// `M - λ·I`
    pub fn shift(&self, lambda: &Coefficient) -> Self {
        let backend = self.backend.join(lambda.backend());
        let mut m = self.to_backend(backend);
        for i in 0..self.r {
            let d = &m.entries[i * self.r + i] - &GrassmannElement::scalar(lambda.to_backend(backend), self.sig);
            m.entries[i * self.r + i] = d;
        }
        m
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.r, self.sig, self.backend);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `p(M)` by Horner's scheme.
    pub fn eval_poly(&self, p: &Poly) -> Self {
        let backend = self.backend.join(p.backend());
        let m = self.to_backend(backend);
        let mut acc = Self::zero(self.r, self.sig, backend);
        for c in p.coeffs().iter().rev() {
            acc = (&acc * &m).shift(&-c);
        }
        acc
    }

    /// Two-sided inverse, defined exactly when the body is invertible.
    ///
    /// With `X = m̂₍≥₁₎ m₍₀₎⁻¹`, computes
    /// `m₍₀₎⁻¹ − m₍₀₎⁻¹ m̂₍≥₁₎ m₍₀₎⁻¹ (1 − X + X² − ⋯ + (−1)ˢ Xˢ)`,
    /// which terminates because `Xˢ⁺¹ = 0`.
    pub fn invert(&self) -> Result<Self> {
        let body = self.body();
        let scale = body.to_backend(Backend::Numeric).is_negligible(0.0);
        let tol = if scale { 0.0 } else { 64.0 * f64::EPSILON * self.max_abs().max(1.0) };
        let Some(body_inv) = body.inverse(tol) else {
            return Err(Error::NotInvertible { det: body.det()? });
        };
        let body_inv = Self::from_body(&body_inv, self.sig)?;
        let soul = self.soul();
        let x = &soul * &body_inv;
        let neg_x = -&x;
        let id = Self::identity(self.r, self.sig, self.backend);
        let mut series = id.clone();
        let mut term = id;
        for _ in 0..self.sig.generators() {
            term = &term * &neg_x;
            if term.is_zero() {
                break;
            }
            series = &series + &term;
        }
        Ok(&body_inv - &(&(&(&body_inv * &soul) * &body_inv) * &series))
    }

    /// χ_m̂ = (det(t·I − m₍₀₎))^{s+1}.
    pub fn charpoly(&self) -> Result<CharPoly> {
        Ok(CharPoly { body: self.body().charpoly()?, power: self.sig.generators() + 1 })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?.checked_sub(&other.checked_mul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)?.checked_add(&other.checked_mul(self)?)
    }

    pub fn commutes_with(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.commutator(other)?.vanishes(tol))
    }

    pub fn anticommutes_with(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(self.anticommutator(other)?.vanishes(tol))
    }

    /// Classifies `ab ∓ ba = 0`; exact on the exact backend.
    pub fn commutator_class(&self, other: &Self) -> Result<CommutationClass> {
        self.commutator_class_tol(other, DEFAULT_TOLERANCE)
    }

    pub fn commutator_class_tol(&self, other: &Self, tol: f64) -> Result<CommutationClass> {
        if self.commutes_with(other, tol)? {
            Ok(CommutationClass::Commute)
        } else if self.anticommutes_with(other, tol)? {
            Ok(CommutationClass::Anticommute)
        } else {
            Ok(CommutationClass::Neither)
        }
    }

    /// The square submatrix on the given index set.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let entries = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| self.entry(i, j).clone()).collect();
        SuperMatrix { r: idx.len(), sig: self.sig, backend: self.backend, entries }
    }

    /// Matrix times a column of scalars.
    pub fn apply_to_scalars(&self, v: &[Coefficient]) -> Vec<GrassmannElement> {
        (0..self.r)
            .map(|i| {
                v.iter().enumerate().fold(GrassmannElement::zero(self.sig, self.backend), |acc, (k, c)| {
                    &acc + &self.entry(i, k).scale(&c.to_backend(self.backend))
                })
            })
            .collect()
    }
}

/// Characteristic polynomial χ_m̂ = (χ_{m₍₀₎})^{s+1}, kept in factored power form.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    /// χ_{m₍₀₎} = det(t·I − m₍₀₎)
    pub body: Poly,
    /// s + 1
    pub power: u32,
}

impl CharPoly {
    pub fn expanded(&self) -> Poly {
        self.body.pow(self.power)
    }

    pub fn degree(&self) -> usize {
        self.body.degree() * self.power as usize
    }

    /// `(λ, (s+1)·d)` for a factorization χ_{m₍₀₎} = ∏ (t − λᵢ)^{dᵢ}.
    pub fn factored(&self, roots: &[(Coefficient, usize)]) -> Vec<(Coefficient, usize)> {
        roots.iter().map(|(l, d)| (l.clone(), d * self.power as usize)).collect()
    }

    /// χ(m̂), computed as (χ_{m₍₀₎}(m̂))^{s+1} with Horner's scheme for the inner factor.
    pub fn eval_at(&self, m: &SuperMatrix) -> SuperMatrix {
        m.eval_poly(&self.body).pow(self.power)
    }
}

macro_rules! checked_ops {
    ($($tr:ident $m:ident $checked:ident),*) => {$(
        /// Panics on shape, signature or backend mismatch.
        impl<'a> $tr<&'a SuperMatrix> for &'a SuperMatrix {
            type Output = SuperMatrix;
            fn $m(self, o: &SuperMatrix) -> SuperMatrix {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    )*};
}
checked_ops!(Add add checked_add, Sub sub checked_sub, Mul mul checked_mul);

impl Neg for &SuperMatrix {
    type Output = SuperMatrix;
    fn neg(self) -> SuperMatrix {
        self.map(|e| -e)
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.r {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.r {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(s: u32) -> AlgebraSignature {
        AlgebraSignature::new(s).unwrap()
    }

    fn th(i: u32, s: u32) -> GrassmannElement {
        GrassmannElement::generator(i, sig(s), Backend::Exact).unwrap()
    }

    fn int(n: i64, s: u32) -> GrassmannElement {
        GrassmannElement::scalar(Coefficient::from_int(n, Backend::Exact), sig(s))
    }

    #[test]
    fn products() {
        let a = SuperMatrix::from_ints(&[&[1, 2], &[3, 4]], sig(2));
        let id = SuperMatrix::identity(2, sig(2), Backend::Exact);
        assert_eq!(&id * &a, a);

        let t1 = SuperMatrix::scalar(&th(1, 2), 2);
        assert!((&t1 * &t1).is_zero());

        let upper = |x: GrassmannElement| {
            SuperMatrix::from_entries(2, vec![int(0, 2), x, int(0, 2), int(0, 2)]).unwrap()
        };
        assert!((&upper(th(1, 2)) * &upper(th(2, 2))).is_zero());
    }

    #[test]
    fn inverse_examples() {
        let id = SuperMatrix::identity(2, sig(1), Backend::Exact);
        assert_eq!(id.invert().unwrap(), id);

        let m = SuperMatrix::from_entries(2, vec![int(1, 1), th(1, 1), int(0, 1), int(1, 1)]).unwrap();
        let expected = SuperMatrix::from_entries(2, vec![int(1, 1), -&th(1, 1), int(0, 1), int(1, 1)]).unwrap();
        let inv = m.invert().unwrap();
        assert_eq!(inv, expected);
        assert_eq!(&m * &inv, id);
        assert_eq!(&inv * &m, id);

        let singular = SuperMatrix::from_entries(2, vec![th(1, 1), int(0, 1), int(0, 1), int(1, 1)]).unwrap();
        match singular.invert() {
            Err(Error::NotInvertible { det }) => assert!(det.is_zero()),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
    }

    #[test]
    fn charpoly_examples() {
        let m = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(1));
        let chi = m.charpoly().unwrap();
        let expected = &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[-2, 1]);
        assert_eq!(chi.expanded(), expected.pow(2));
        assert!(chi.eval_at(&m).is_zero());

        let t12 = &th(1, 2) * &th(2, 2);
        let m = SuperMatrix::scalar(&t12, 1);
        let chi = m.charpoly().unwrap();
        assert_eq!(chi.expanded(), Poly::from_ints(&[0, 0, 0, 1]));
        assert!(m.pow(3).is_zero());
        assert!(chi.eval_at(&m).is_zero());

        let n = SuperMatrix::from_ints(&[&[0, 1], &[0, 0]], sig(0));
        let chi = n.charpoly().unwrap();
        assert_eq!(chi.expanded(), Poly::from_ints(&[0, 0, 1]));
        assert!((&n * &n).is_zero());
    }

    #[test]
    fn commutation_classes() {
        let a = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(2));
        let b = SuperMatrix::from_ints(&[&[3, 0], &[0, 4]], sig(2));
        assert_eq!(a.commutator_class(&b).unwrap(), CommutationClass::Commute);

        let a = SuperMatrix::scalar(&th(1, 2), 2);
        let b = SuperMatrix::scalar(&th(2, 2), 2);
        assert_eq!(a.commutator_class(&b).unwrap(), CommutationClass::Anticommute);
        assert!(!a.commutes_with(&b, 0.0).unwrap());

        let a = SuperMatrix::from_ints(&[&[0, 1], &[0, 0]], sig(2));
        let b = SuperMatrix::from_ints(&[&[0, 0], &[1, 0]], sig(2));
        assert_eq!(a.commutator_class(&b).unwrap(), CommutationClass::Neither);
    }

    #[test]
    fn parity_of_matrices() {
        assert_eq!(SuperMatrix::scalar(&th(1, 2), 2).parity(), Parity::Odd);
        assert_eq!(SuperMatrix::identity(2, sig(2), Backend::Exact).parity(), Parity::Even);
        let mixed = SuperMatrix::from_entries(2, vec![int(1, 2), th(1, 2), int(0, 2), int(1, 2)]).unwrap();
        assert_eq!(mixed.parity(), Parity::Mixed);
    }

    #[test]
    fn shape_errors() {
        let a = SuperMatrix::identity(2, sig(1), Backend::Exact);
        let b = SuperMatrix::identity(3, sig(1), Backend::Exact);
        assert!(matches!(a.checked_mul(&b), Err(Error::Shape(_))));
        let c = SuperMatrix::identity(2, sig(2), Backend::Exact);
        assert!(matches!(a.checked_add(&c), Err(Error::Structure(_))));
    }
}
