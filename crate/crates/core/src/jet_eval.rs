//! Smooth functions evaluated at nilpotent perturbations of real points.
//!
//! For `h ∈ C∞(ℝᵏ)` and even elements `xᵢ = rᵢ + nᵢ` with body `rᵢ` and
//! nilpotent soul `nᵢ`,
//!
//! ```text
//! h(x₁, …, x_k) = Σ_α  ∂^α h(r) / α!  ·  n₁^{α₁} ⋯ n_k^{α_k}
//! ```
//!
//! and the sum is finite. The same sum evaluates a function on commuting
//! matrix offsets, see [`taylor_sum`].

use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, Parity};
use crate::smoothfn::SmoothFunction;
use crate::supermatrix::SuperMatrix;

/// Values that can stand in for the offsets `nᵢ` of a finite Taylor sum.
///
/// The offsets passed together must commute with each other.
pub trait TaylorOperand: Clone {
    fn mul(&self, o: &Self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, c: &Coefficient) -> Self;
    /// Exact zero on the exact backend, within `tol` on the numeric one.
    fn vanishes(&self, tol: f64) -> bool;
}

impl TaylorOperand for GrassmannElement {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, c: &Coefficient) -> Self {
        GrassmannElement::scale(self, c)
    }
    fn vanishes(&self, tol: f64) -> bool {
        match self.backend() {
            Backend::Exact => self.is_zero(),
            Backend::Numeric => self.is_negligible(tol),
        }
    }
}

impl TaylorOperand for SuperMatrix {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, c: &Coefficient) -> Self {
        SuperMatrix::scale(self, c)
    }
    fn vanishes(&self, tol: f64) -> bool {
        SuperMatrix::vanishes(self, tol)
    }
}

/// The nonvanishing products `n^α`, grouped by total degree `|α|`.
///
/// Level `d` is empty exactly when every product of degree `d` vanishes,
/// and the list stops there (or after level `cap`).
pub fn offset_monomials<T: TaylorOperand>(one: &T, offsets: &[T], cap: usize, tol: f64) -> Vec<Vec<(Vec<u32>, T)>> {
    let k = offsets.len();
    let mut levels = vec![vec![(vec![0; k], one.clone())]];
    for _ in 1..=cap {
        let prev = levels.last().expect("nonempty");
        let mut next = Vec::new();
        for (alpha, p) in prev {
            // Only raise positions at or after the last nonzero exponent, so
            // every multi-index is produced once.
            let start = alpha.iter().rposition(|&e| e > 0).unwrap_or(0);
            for (i, off) in offsets.iter().enumerate().skip(start) {
                let q = p.mul(off);
                if q.vanishes(tol) {
                    continue;
                }
                let mut beta = alpha.clone();
                beta[i] += 1;
                next.push((beta, q));
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

/// `Σ_α c_α n^α` for precomputed offset products and Taylor coefficients `c`.
pub fn taylor_sum<T: TaylorOperand>(
    zero: &T,
    levels: &[Vec<(Vec<u32>, T)>],
    coeff: impl Fn(&[u32]) -> Coefficient,
) -> T {
    let mut acc = zero.clone();
    for level in levels {
        for (alpha, p) in level {
            let c = coeff(alpha);
            if !c.is_zero() {
                acc = acc.add(&p.scale(&c));
            }
        }
    }
    acc
}

/// Tolerance used for numeric vanishing tests of Grassmann products.
const NUMERIC_TOL: f64 = 1e-14;

/// Evaluates `h` at even Grassmann arguments.
///
/// Each argument splits as body plus soul; the Taylor sum stops at the first
/// degree where all soul monomials vanish.
pub fn eval_even(h: &SmoothFunction, args: &[GrassmannElement]) -> Result<GrassmannElement> {
    if args.len() != h.arity() {
        return Err(Error::Shape(format!("{} arguments for a function of arity {}", args.len(), h.arity())));
    }
    let Some(first) = args.first() else {
        return Err(Error::Shape("eval_even needs at least one argument to fix the algebra".into()));
    };
    let sig = first.signature();
    if let Some(i) = args.iter().position(|a| a.signature() != sig || a.backend() != first.backend()) {
        return Err(Error::Structure(format!("argument {} is over a different algebra or backend", i + 1)));
    }
    for (i, a) in args.iter().enumerate() {
        if a.parity() != Parity::Even {
            return Err(Error::Parity(format!("argument {} has {} parity; only even arguments are allowed", i + 1, a.parity())));
        }
    }
    let backend = first.backend().join(h.backend());
    let args: Vec<GrassmannElement> = args.iter().map(|a| a.to_backend(backend)).collect();
    let (bodies, souls): (Vec<Coefficient>, Vec<GrassmannElement>) = args.iter().map(GrassmannElement::body_soul).unzip();
    if h.real_domain() {
        if let Some(i) = bodies.iter().position(|b| !b.is_real()) {
            return Err(Error::Domain(format!("argument {} has non-real body {}", i + 1, bodies[i])));
        }
    }
    // Each soul is nilpotent of order ≤ s+1, so no term beyond degree k·s survives.
    let cap = args.len() * sig.generators() as usize;
    let one = GrassmannElement::one(sig, backend);
    let levels = offset_monomials(&one, &souls, cap, NUMERIC_TOL);
    let jets = h.jets(&bodies, (levels.len() - 1) as u32)?;
    let zero = GrassmannElement::zero(sig, backend.join(jets.backend()));
    let levels: Vec<Vec<(Vec<u32>, GrassmannElement)>> = if zero.backend() == backend {
        levels
    } else {
        levels.into_iter().map(|l| l.into_iter().map(|(a, p)| (a, p.to_backend(zero.backend()))).collect()).collect()
    };
    Ok(taylor_sum(&zero, &levels, |alpha| jets.taylor(alpha)))
}

/// `h(x) − g(f₁(x), …, f_m(x))` with `h = g ∘ (f₁, …, f_m)` formed symbolically.
pub fn eval_even_composition_check(
    g: &SmoothFunction,
    fs: &[SmoothFunction],
    args: &[GrassmannElement],
) -> Result<GrassmannElement> {
    let h = g.compose(fs)?;
    let direct = eval_even(&h, args)?;
    let inner: Vec<GrassmannElement> = fs.iter().map(|f| eval_even(f, args)).collect::<Result<_>>()?;
    let nested = eval_even(g, &inner)?;
    let backend = direct.backend().join(nested.backend());
    direct.to_backend(backend).checked_sub(&nested.to_backend(backend))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{AlgebraSignature, Monomial};

    fn sig(s: u32) -> AlgebraSignature {
        AlgebraSignature::new(s).unwrap()
    }

    fn ex(n: i64) -> Coefficient {
        Coefficient::from_int(n, Backend::Exact)
    }

    fn elem(s: u32, terms: &[(&[u32], i64)]) -> GrassmannElement {
        GrassmannElement::from_terms(
            sig(s),
            Backend::Exact,
            terms.iter().map(|(idx, c)| (Monomial::from_indices(idx).unwrap(), ex(*c))),
        )
        .unwrap()
    }

    #[test]
    fn square_of_perturbed_three() {
        let h = SmoothFunction::parse("y1^2", 1).unwrap();
        let x = elem(2, &[(&[], 3), (&[1, 2], 1)]);
        assert_eq!(eval_even(&h, &[x]).unwrap(), elem(2, &[(&[], 9), (&[1, 2], 6)]));
    }

    #[test]
    fn projection_returns_argument() {
        let h = SmoothFunction::projection(1, 2);
        let a = elem(2, &[(&[], 1), (&[1, 2], 4)]);
        let b = elem(2, &[(&[], -2), (&[1, 2], 5)]);
        assert_eq!(eval_even(&h, &[a, b.clone()]).unwrap(), b);
    }

    #[test]
    fn exp_of_two_forms() {
        let h = SmoothFunction::unary(crate::smoothfn::Unary::Exp);
        let x = elem(4, &[(&[1, 2], 1), (&[3, 4], 1)]);
        let got = eval_even(&h, &[x]).unwrap();
        let want = elem(4, &[(&[], 1), (&[1, 2], 1), (&[3, 4], 1), (&[1, 2, 3, 4], 1)]);
        assert!(got.checked_sub(&want.to_numeric()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn parity_and_domain_errors() {
        let h = SmoothFunction::parse("y1", 1).unwrap();
        assert!(matches!(eval_even(&h, &[elem(1, &[(&[1], 1)])]), Err(Error::Parity(_))));
        let log = SmoothFunction::parse("log(y1)", 1).unwrap();
        let x = GrassmannElement::scalar(Coefficient::complex(1.0, 1.0), sig(1));
        assert!(matches!(eval_even(&log, &[x]), Err(Error::Domain(_))));
        // Polynomials accept Gaussian bodies.
        let gx = GrassmannElement::scalar(Coefficient::Exact(crate::coeff::GaussRational::new(num_rational::BigRational::from_integer(1.into()), num_rational::BigRational::from_integer(1.into()))), sig(1));
        let sq = SmoothFunction::parse("y1^2", 1).unwrap();
        assert!(eval_even(&sq, &[gx]).is_ok());
    }

    #[test]
    fn composition_residuals() {
        let g = SmoothFunction::parse("y1^2", 1).unwrap();
        let f = SmoothFunction::parse("y1 + 1", 1).unwrap();
        let x = elem(2, &[(&[1, 2], 1)]);
        assert!(eval_even_composition_check(&g, &[f], &[x]).unwrap().is_zero());

        let g = SmoothFunction::parse("exp(y1)", 1).unwrap();
        let f = SmoothFunction::parse("2*y1", 1).unwrap();
        let x = elem(2, &[(&[], 1), (&[1, 2], 1)]);
        assert!(eval_even_composition_check(&g, &[f], &[x.clone()]).unwrap().max_abs() <= 1e-10);

        let id = SmoothFunction::projection(0, 1);
        let f = SmoothFunction::parse("y1^3 - y1", 1).unwrap();
        assert!(eval_even_composition_check(&id, &[f], &[x]).unwrap().is_zero());
    }
}
