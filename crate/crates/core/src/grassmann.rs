//! The Grassmann algebra Ĉ_[s] on generators θ¹…θˢ.
//!
//! Elements are stored in canonical form: a map from generator subsets
//! (bitmasks, generator `i` at bit `i - 1`) to nonzero coefficients. The
//! product of two monomials is zero when they share a generator and otherwise
//! picks up the sign of the permutation that sorts the concatenated generator
//! list, computed by counting inversions.
//!
//! Product algebras built by [`merge`] may declare cross-factor generators to
//! commute instead of anticommute; the convention lives in the
//! [`AlgebraSignature`] so every element carries it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};

pub const MAX_GENERATORS: u32 = 63;

/// Relation between generators that come from different factors of a merge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeConvention {
    #[default]
    Anticommute,
    Commute,
}

impl fmt::Display for MergeConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MergeConvention::Anticommute => f.write_str("anticommute"),
            MergeConvention::Commute => f.write_str("commute"),
        }
    }
}

impl std::str::FromStr for MergeConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anticommute" => Ok(MergeConvention::Anticommute),
            "commute" => Ok(MergeConvention::Commute),
            other => Err(Error::Parse(format!("unknown merge convention `{other}`"))),
        }
    }
}

/// Generator count plus the cross-factor relation of a merged algebra.
///
/// Generators `1..=first_factor` form the first factor. Under
/// [`MergeConvention::Anticommute`] the split is irrelevant and is normalized
/// away, so a merged anticommuting algebra equals the plain Ĉ_[s₁+s₂].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraSignature {
    generators: u32,
    first_factor: u32,
    convention: MergeConvention,
}

impl AlgebraSignature {
    pub fn new(generators: u32) -> Result<Self> {
        if generators > MAX_GENERATORS {
            return Err(Error::Structure(format!(
                "{generators} generators exceeds the limit of {MAX_GENERATORS}"
            )));
        }
        Ok(AlgebraSignature { generators, first_factor: generators, convention: MergeConvention::Anticommute })
    }

    pub fn merged(s1: u32, s2: u32, convention: MergeConvention) -> Result<Self> {
        let mut sig = Self::new(s1 + s2)?;
        if convention == MergeConvention::Commute {
            sig.first_factor = s1;
            sig.convention = convention;
        }
        Ok(sig)
    }

    pub fn generators(&self) -> u32 {
        self.generators
    }

    pub fn first_factor(&self) -> u32 {
        self.first_factor
    }

    pub fn convention(&self) -> MergeConvention {
        self.convention
    }

    /// Product of two monomials: `None` if they share a generator, else the
    /// merged monomial and whether reordering introduced a minus sign.
    pub fn multiply_monomials(&self, a: Monomial, b: Monomial) -> Option<(Monomial, bool)> {
        if a.0 & b.0 != 0 {
            return None;
        }
        Some((Monomial(a.0 | b.0), self.product_is_negative(a.0, b.0)))
    }

    /// Sign of reordering `a·b` into ascending generator order.
    fn product_is_negative(&self, a: u64, b: u64) -> bool {
        let swaps = match self.convention {
            MergeConvention::Anticommute => inversions(a, b),
            MergeConvention::Commute => {
                let low = low_mask(self.first_factor);
                inversions(a & low, b & low) + inversions(a & !low, b & !low)
            }
        };
        swaps % 2 == 1
    }

    fn full_mask(&self) -> u64 {
        low_mask(self.generators)
    }
}

fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Number of pairs (i in a, j in b) with i > j.
fn inversions(a: u64, b: u64) -> u32 {
    let mut count = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        count += a.checked_shr(j + 1).unwrap_or(0).count_ones();
        rest &= rest - 1;
    }
    count
}

/// A generator subset θ^{i₁}θ^{i₂}⋯ with i₁ < i₂ < ⋯.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    /// From 1-based generator indices, in any order, without repeats.
    pub fn from_indices(indices: &[u32]) -> Result<Self> {
        let mut mask = 0u64;
        for &i in indices {
            if i == 0 || i > MAX_GENERATORS {
                return Err(Error::Structure(format!("generator index {i} out of range")));
            }
            let bit = 1u64 << (i - 1);
            if mask & bit != 0 {
                return Err(Error::Structure(format!("generator index {i} repeated")));
            }
            mask |= bit;
        }
        Ok(Monomial(mask))
    }

    /// 1-based generator indices in ascending order.
    pub fn indices(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        let mut rest = self.0;
        while rest != 0 {
            out.push(rest.trailing_zeros() + 1);
            rest &= rest - 1;
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_even(&self) -> bool {
        self.degree() % 2 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
            Parity::Mixed => f.write_str("mixed"),
        }
    }
}

/// An element of Ĉ_[s] (or of a merged algebra) in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannElement {
    sig: AlgebraSignature,
    backend: Backend,
    terms: BTreeMap<Monomial, Coefficient>,
}

impl GrassmannElement {
    pub fn zero(sig: AlgebraSignature, backend: Backend) -> Self {
        GrassmannElement { sig, backend, terms: BTreeMap::new() }
    }

    pub fn one(sig: AlgebraSignature, backend: Backend) -> Self {
        Self::scalar(Coefficient::one(backend), sig)
    }

    pub fn scalar(c: Coefficient, sig: AlgebraSignature) -> Self {
        let backend = c.backend();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::ONE, c);
        }
        GrassmannElement { sig, backend, terms }
    }

    /// The generator θ^i (1-based).
    pub fn generator(i: u32, sig: AlgebraSignature, backend: Backend) -> Result<Self> {
        Self::monomial(&[i], Coefficient::one(backend), sig)
    }

    /// `c` times the product of the listed generators, taken in the listed order.
    pub fn monomial(indices: &[u32], c: Coefficient, sig: AlgebraSignature) -> Result<Self> {
        let backend = c.backend();
        let mut acc = Self::scalar(c, sig);
        for &i in indices {
            if i == 0 || i > sig.generators {
                return Err(Error::Structure(format!(
                    "generator θ{i} does not exist in an algebra with {} generators",
                    sig.generators
                )));
            }
            let g = GrassmannElement {
                sig,
                backend,
                terms: BTreeMap::from([(Monomial(1u64 << (i - 1)), Coefficient::one(backend))]),
            };
            acc = acc.checked_mul(&g)?;
        }
        Ok(acc)
    }

    /// Builds an element from (monomial, coefficient) pairs; repeated monomials add up.
    pub fn from_terms(
        sig: AlgebraSignature,
        backend: Backend,
        terms: impl IntoIterator<Item = (Monomial, Coefficient)>,
    ) -> Result<Self> {
        let mut out = Self::zero(sig, backend);
        for (m, c) in terms {
            if m.0 & !sig.full_mask() != 0 {
                return Err(Error::Structure(format!(
                    "monomial {:?} uses generators beyond θ{}",
                    m.indices(),
                    sig.generators
                )));
            }
            if c.backend() != backend {
                return Err(Error::Structure(format!("coefficient {c} is not on the {backend} backend")));
            }
            out.accumulate(m, c);
        }
        Ok(out)
    }

    fn accumulate(&mut self, m: Monomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.sig
    }

    pub fn generators(&self) -> u32 {
        self.sig.generators
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: Monomial) -> Coefficient {
        self.terms.get(&m).cloned().unwrap_or_else(|| Coefficient::zero(self.backend))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero up to `tol` per coefficient (exact zero on the exact backend).
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.is_negligible(tol))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Coefficient::abs).fold(0.0, f64::max)
    }

    /// The empty-monomial coefficient.
    pub fn body(&self) -> Coefficient {
        self.coefficient(Monomial::ONE)
    }

    /// Everything but the body; nilpotent.
    pub fn soul(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Monomial::ONE);
        out
    }

    pub fn body_soul(&self) -> (Coefficient, Self) {
        (self.body(), self.soul())
    }

    pub fn parity(&self) -> Parity {
        let even = self.terms.keys().filter(|m| m.is_even()).count();
        if even == self.terms.len() {
            Parity::Even
        } else if even == 0 {
            Parity::Odd
        } else {
            Parity::Mixed
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        if backend == self.backend {
            return self.clone();
        }
        let mut out = Self::zero(self.sig, backend);
        for (m, c) in &self.terms {
            out.accumulate(*m, c.to_backend(backend));
        }
        out
    }

    pub fn to_numeric(&self) -> Self {
        self.to_backend(Backend::Numeric)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::Structure(format!(
                "signature mismatch: {:?} vs {:?}",
                self.sig, other.sig
            )));
        }
        if self.backend != other.backend {
            return Err(Error::Structure(format!(
                "backend mismatch: {} vs {}",
                self.backend, other.backend
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.sig, self.backend);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.0 & mb.0 != 0 {
                    continue;
                }
                let c = ca * cb;
                let c = if self.sig.product_is_negative(ma.0, mb.0) { -c } else { c };
                out.accumulate(Monomial(ma.0 | mb.0), c);
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by `c`; a numeric `c` makes the result numeric.
    pub fn scale(&self, c: &Coefficient) -> Self {
        let backend = self.backend.join(c.backend());
        let mut out = Self::zero(self.sig, backend);
        for (m, x) in &self.terms {
            out.accumulate(*m, x * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.sig, self.backend);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Reinterprets this element inside a merged algebra whose first factor it is.
    pub fn embed_left(&self, merged: AlgebraSignature) -> Result<Self> {
        self.embed_shifted(merged, 0)
    }

    /// Reinterprets this element inside a merged algebra as its second factor.
    pub fn embed_right(&self, merged: AlgebraSignature) -> Result<Self> {
        let s1 = merged.generators().checked_sub(self.sig.generators).ok_or_else(|| {
            Error::Structure("merged algebra is smaller than the embedded factor".into())
        })?;
        self.embed_shifted(merged, s1)
    }

    fn embed_shifted(&self, merged: AlgebraSignature, shift: u32) -> Result<Self> {
        if self.sig.generators + shift > merged.generators {
            return Err(Error::Structure("embedded factor does not fit the merged algebra".into()));
        }
        // Products inside one factor keep their sign under both conventions,
        // so coefficients carry over unchanged.
        let terms = self.terms.iter().map(|(m, c)| (Monomial(m.0 << shift), c.clone()));
        Self::from_terms(merged, self.backend, terms)
    }
}

/// Embeds `a` (over s₁) and `b` (over s₂) into the merged algebra over s₁+s₂
/// and returns their product `a·b` there.
pub fn merge(a: &GrassmannElement, b: &GrassmannElement, convention: MergeConvention) -> Result<GrassmannElement> {
    if a.backend != b.backend {
        return Err(Error::Structure(format!("backend mismatch: {} vs {}", a.backend, b.backend)));
    }
    let sig = AlgebraSignature::merged(a.generators(), b.generators(), convention)?;
    a.embed_left(sig)?.checked_mul(&b.embed_right(sig)?)
}

macro_rules! checked_ops {
    ($($tr:ident $m:ident $checked:ident),*) => {$(
        /// Panics on signature or backend mismatch; use the `checked_` form to recover.
        impl<'a> $tr<&'a GrassmannElement> for &'a GrassmannElement {
            type Output = GrassmannElement;
            fn $m(self, o: &GrassmannElement) -> GrassmannElement {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr for GrassmannElement {
            type Output = GrassmannElement;
            fn $m(self, o: GrassmannElement) -> GrassmannElement {
                (&self).$m(&o)
            }
        }
    )*};
}
checked_ops!(Add add checked_add, Sub sub checked_sub, Mul mul checked_mul);

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }
}

impl Neg for GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        -&self
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = k > 0 && c.is_real() && c.re_f64() < 0.0;
            let c = &if negative { -c } else { c.clone() };
            if k > 0 {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let gens: String = m.indices().iter().map(|i| format!("θ{i}")).collect();
            match (gens.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => f.write_str(&gens)?,
                (false, false) => write!(f, "{c}·{gens}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(s: u32) -> AlgebraSignature {
        AlgebraSignature::new(s).unwrap()
    }

    fn th(i: u32, s: u32) -> GrassmannElement {
        GrassmannElement::generator(i, sig(s), Backend::Exact).unwrap()
    }

    fn c(n: i64, s: u32) -> GrassmannElement {
        GrassmannElement::scalar(Coefficient::from_int(n, Backend::Exact), sig(s))
    }

    #[test]
    fn generator_products_follow_the_sign_rule() {
        let t12 = &th(1, 2) * &th(2, 2);
        assert_eq!(t12.coefficient(Monomial(0b11)), Coefficient::from_int(1, Backend::Exact));
        assert_eq!(&th(2, 2) * &th(1, 2), -&t12);
        assert!((&th(1, 2) * &th(1, 2)).is_zero());
    }

    #[test]
    fn nilpotent_two_form_inverts() {
        let t12 = &th(1, 2) * &th(2, 2);
        let a = &c(1, 2) + &t12;
        let b = &c(1, 2) - &t12;
        assert_eq!(&a * &b, c(1, 2));
    }

    #[test]
    fn body_soul_split() {
        let t12 = &th(1, 2) * &th(2, 2);
        let a = &c(3, 2) + &(&c(2, 2) * &t12);
        let (body, soul) = a.body_soul();
        assert_eq!(body, Coefficient::from_int(3, Backend::Exact));
        assert_eq!(soul, &c(2, 2) * &t12);

        let (body, soul) = GrassmannElement::zero(sig(2), Backend::Exact).body_soul();
        assert!(body.is_zero() && soul.is_zero());

        let (body, soul) = th(1, 2).body_soul();
        assert!(body.is_zero());
        assert_eq!(soul, th(1, 2));
    }

    #[test]
    fn parity_classification() {
        assert_eq!((&th(1, 3) * &th(2, 3)).parity(), Parity::Even);
        let t123 = &(&th(1, 3) * &th(2, 3)) * &th(3, 3);
        assert_eq!((&th(1, 3) + &t123).parity(), Parity::Odd);
        assert_eq!((&c(1, 3) + &th(1, 3)).parity(), Parity::Mixed);
    }

    #[test]
    fn merge_conventions() {
        let a = th(1, 1);
        let b = th(1, 1);
        let swapped = |conv| {
            let sig = AlgebraSignature::merged(1, 1, conv).unwrap();
            &b.embed_right(sig).unwrap() * &a.embed_left(sig).unwrap()
        };
        let ab = merge(&a, &b, MergeConvention::Anticommute).unwrap();
        assert_eq!(swapped(MergeConvention::Anticommute), -&ab);

        let ab = merge(&a, &b, MergeConvention::Commute).unwrap();
        assert_eq!(swapped(MergeConvention::Commute), ab);
        assert!(!ab.is_zero());

        let x = &c(2, 2) + &(&th(1, 2) * &th(2, 2));
        for conv in [MergeConvention::Anticommute, MergeConvention::Commute] {
            let one = c(1, 0);
            let merged = merge(&one, &x, conv).unwrap();
            let sig = AlgebraSignature::merged(0, 2, conv).unwrap();
            assert_eq!(merged, x.embed_right(sig).unwrap());
        }
    }

    #[test]
    fn commute_convention_keeps_within_factor_signs() {
        let sig = AlgebraSignature::merged(2, 2, MergeConvention::Commute).unwrap();
        let g = |i| GrassmannElement::generator(i, sig, Backend::Exact).unwrap();
        assert_eq!(&g(2) * &g(1), -&(&g(1) * &g(2)));
        assert_eq!(&g(4) * &g(3), -&(&g(3) * &g(4)));
        assert_eq!(&g(3) * &g(1), &g(1) * &g(3));
        assert!((&g(3) * &g(3)).is_zero());
    }

    #[test]
    fn mismatched_signatures_are_rejected() {
        assert!(th(1, 2).checked_mul(&th(1, 3)).is_err());
        let numeric = th(1, 2).to_numeric();
        assert!(th(1, 2).checked_add(&numeric).is_err());
        assert!(AlgebraSignature::new(64).is_err());
    }

    fn element(s: u32) -> impl Strategy<Value = GrassmannElement> {
        let masks = 1u64 << s;
        proptest::collection::vec((0..masks, -3i64..=3), 0..6).prop_map(move |terms| {
            GrassmannElement::from_terms(
                sig(s),
                Backend::Exact,
                terms.into_iter().map(|(m, v)| (Monomial(m), Coefficient::from_int(v, Backend::Exact))),
            )
            .unwrap()
        })
    }

    fn homogeneous(s: u32, odd: bool) -> impl Strategy<Value = GrassmannElement> {
        element(s).prop_map(move |x| {
            let terms = x
                .terms()
                .filter(|(m, _)| m.is_even() != odd)
                .map(|(m, c)| (*m, c.clone()))
                .collect::<Vec<_>>();
            GrassmannElement::from_terms(sig(s), Backend::Exact, terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in element(4), b in element(4), c in element(4)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a * &b).body(), &a.body() * &b.body());
        }

        #[test]
        fn graded_commutativity(
            (pa, pb, a, b) in (any::<bool>(), any::<bool>()).prop_flat_map(|(pa, pb)| {
                (Just(pa), Just(pb), homogeneous(4, pa), homogeneous(4, pb))
            })
        ) {
            let ab = &a * &b;
            let ba = &b * &a;
            if pa && pb {
                prop_assert_eq!(ab, -&ba);
            } else {
                prop_assert_eq!(ab, ba);
            }
        }

        #[test]
        fn soul_is_nilpotent(a in element(4)) {
            prop_assert!(a.soul().pow(5).is_zero());
        }
    }
}
