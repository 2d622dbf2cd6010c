//! Random instances with known spectra, for tests and benchmarks.
//!
//! Bodies are built as `P·T·P⁻¹` with `T` upper triangular over small
//! integers and `P` unimodular, so the spectrum is the diagonal of `T` and
//! all arithmetic stays in small rationals.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::coeff::{Backend, Coefficient};
use crate::grassmann::{AlgebraSignature, GrassmannElement, Monomial, Parity};
use crate::linalg::Mat;
use crate::smoothfn::{MPoly, SmoothFunction, SuperFunction};
use crate::supermatrix::SuperMatrix;

/// Eigenvalues are drawn from this range.
pub const SPECTRUM: std::ops::RangeInclusive<i64> = -3..=3;

fn ex(n: i64) -> Coefficient {
    Coefficient::from_int(n, Backend::Exact)
}

/// A nilpotent element with small integer coefficients on monomials of
/// degree ≥ 1, optionally restricted to one parity.
pub fn soul<R: Rng + ?Sized>(rng: &mut R, sig: AlgebraSignature, parity: Option<Parity>, density: f64) -> GrassmannElement {
    let s = sig.generators();
    let mut terms = Vec::new();
    for bits in 1..(1u64 << s) {
        let m = Monomial(bits);
        let keep_parity = match parity {
            Some(Parity::Even) => m.is_even(),
            Some(Parity::Odd) => !m.is_even(),
            _ => true,
        };
        if keep_parity && rng.random_bool(density) {
            let c = rng.random_range(-2..=2);
            if c != 0 {
                terms.push((m, ex(c)));
            }
        }
    }
    GrassmannElement::from_terms(sig, Backend::Exact, terms).expect("monomials fit the signature")
}

/// An even element `b + soul` with body in [`SPECTRUM`].
pub fn even_element<R: Rng + ?Sized>(rng: &mut R, sig: AlgebraSignature) -> GrassmannElement {
    let body = GrassmannElement::scalar(ex(rng.random_range(SPECTRUM)), sig);
    &body + &soul(rng, sig, Some(Parity::Even), 0.5)
}

/// Integer matrix with determinant ±1 and its inverse.
pub fn unimodular<R: Rng + ?Sized>(rng: &mut R, r: usize) -> (Mat, Mat) {
    let mut p: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..2 * r {
        if r < 2 {
            break;
        }
        let i = rng.random_range(0..r);
        let mut j = rng.random_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.random_range(-1..=1);
        for k in 0..r {
            p[i][k] += c * p[j][k];
        }
    }
    let rows: Vec<&[i64]> = p.iter().map(Vec::as_slice).collect();
    let m = Mat::from_ints(&rows);
    let inv = m.inverse(0.0).expect("unimodular");
    (m, inv)
}

/// Upper triangular integer matrix with the given diagonal.
pub fn triangular<R: Rng + ?Sized>(rng: &mut R, diagonal: &[i64]) -> Mat {
    let r = diagonal.len();
    let rows: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { diagonal[i] } else if j > i { rng.random_range(-1..=1) } else { 0 }).collect())
        .collect();
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    Mat::from_ints(&refs)
}

/// `body + soul` with independent soul entries.
pub fn with_soul<R: Rng + ?Sized>(rng: &mut R, body: &Mat, sig: AlgebraSignature, parity: Option<Parity>) -> SuperMatrix {
    let r = body.rows();
    let entries = (0..r * r)
        .map(|k| &GrassmannElement::scalar(body[(k / r, k % r)].clone(), sig) + &soul(rng, sig, parity, 0.3))
        .collect();
    SuperMatrix::from_entries(r, entries).expect("square")
}

/// A matrix whose body has the given spectrum, conjugated by a unimodular matrix.
pub fn with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[i64], sig: AlgebraSignature, parity: Option<Parity>) -> SuperMatrix {
    let t = triangular(rng, spectrum);
    let (p, pinv) = unimodular(rng, spectrum.len());
    with_soul(rng, &(&(&p * &t) * &pinv), sig, parity)
}

/// A random instance of rank `r` over `Ĉ_[s]` with spectrum drawn from [`SPECTRUM`].
pub fn instance<R: Rng + ?Sized>(rng: &mut R, r: usize, s: u32) -> SuperMatrix {
    let spectrum: Vec<i64> = (0..r).map(|_| rng.random_range(SPECTRUM)).collect();
    with_spectrum(rng, &spectrum, AlgebraSignature::new(s).expect("small"), None)
}

/// Like [`instance`], with a zero eigenvalue in the body.
pub fn singular_instance<R: Rng + ?Sized>(rng: &mut R, r: usize, s: u32) -> SuperMatrix {
    let mut spectrum: Vec<i64> = (0..r).map(|_| rng.random_range(SPECTRUM)).collect();
    spectrum[rng.random_range(0..r)] = 0;
    with_spectrum(rng, &spectrum, AlgebraSignature::new(s).expect("small"), None)
}

/// Like [`instance`], with no zero eigenvalue.
pub fn invertible_instance<R: Rng + ?Sized>(rng: &mut R, r: usize, s: u32) -> SuperMatrix {
    let nonzero: Vec<i64> = SPECTRUM.filter(|&x| x != 0).collect();
    let spectrum: Vec<i64> = (0..r).map(|_| *nonzero.choose(rng).expect("nonempty")).collect();
    with_spectrum(rng, &spectrum, AlgebraSignature::new(s).expect("small"), None)
}

/// `n` commuting matrices: `B · diag_j(p_{ij}(A_j)) · B⁻¹`, where each block
/// `A_j` has a single body eigenvalue and `p_{ij}` are small polynomials.
/// Souls are even when `even` is set.
pub fn commuting_tuple<R: Rng + ?Sized>(rng: &mut R, n: usize, r: usize, s: u32, even: bool) -> Vec<SuperMatrix> {
    let sig = AlgebraSignature::new(s).expect("small");
    let parity = even.then_some(Parity::Even);
    let mut sizes = Vec::new();
    let mut left = r;
    while left > 0 {
        let d = rng.random_range(1..=left);
        sizes.push(d);
        left -= d;
    }
    let blocks: Vec<SuperMatrix> = sizes
        .iter()
        .map(|&d| {
            let lambda = rng.random_range(SPECTRUM);
            let t = triangular(rng, &vec![lambda; d]);
            with_soul(rng, &t, sig, parity).shift(&ex(lambda))
        })
        .collect();
    let (p, _) = unimodular(rng, r);
    let b = with_soul(rng, &p, sig, parity);
    let binv = b.invert().expect("unimodular body");
    (0..n)
        .map(|_| {
            let mut m = SuperMatrix::zero(r, sig, Backend::Exact);
            let mut offset = 0;
            for (blk, &d) in blocks.iter().zip(&sizes) {
                // p(N) = c₀ + c₁N + c₂N² for the nilpotent-body part N of the block.
                let c: Vec<i64> = vec![rng.random_range(SPECTRUM), rng.random_range(-2..=2), rng.random_range(-1..=1)];
                let id = SuperMatrix::identity(d, sig, Backend::Exact);
                let val = &(&id.scale(&ex(c[0])) + &blk.scale(&ex(c[1]))) + &(blk * blk).scale(&ex(c[2]));
                for i in 0..d {
                    for j in 0..d {
                        m.set_entry(offset + i, offset + j, val.entry(i, j).clone()).expect("same algebra");
                    }
                }
                offset += d;
            }
            &(&b * &m) * &binv
        })
        .collect()
}

/// Odd images `Θ_l = θ^{a_l}·q_l(m̂₁)` for `l = 1..=s2`, using distinct
/// generators `a_l`. They commute with every matrix that commutes with
/// `m̂₁` and has even entries, and they anticommute with each other.
pub fn theta_family<R: Rng + ?Sized>(rng: &mut R, m: &SuperMatrix, s2: usize) -> Vec<SuperMatrix> {
    let sig = m.signature();
    assert!(s2 as u32 <= sig.generators(), "need at least s2 generators");
    let mut gens: Vec<u32> = (1..=sig.generators()).collect();
    gens.shuffle(rng);
    gens.iter()
        .take(s2)
        .map(|&a| {
            let theta = GrassmannElement::generator(a, sig, Backend::Exact).expect("in range");
            let q = &SuperMatrix::identity(m.rank(), sig, Backend::Exact).scale(&ex(rng.random_range(1..=2))) + &m.scale(&ex(rng.random_range(-1..=1)));
            q.left_scalar_mul(&theta).expect("same algebra")
        })
        .collect()
}

/// Polynomial in `k` variables with total degree ≤ `degree` and small integer coefficients.
pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, k: usize, degree: u32, terms: usize) -> MPoly {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut e = vec![0u32; k];
        let total = rng.random_range(0..=degree);
        for _ in 0..total {
            e[rng.random_range(0..k)] += 1;
        }
        out.push((e, ex(rng.random_range(-3..=3))));
    }
    MPoly::from_terms(k, Backend::Exact, out).expect("exponents match arity")
}

/// Super-function whose components are random polynomials.
pub fn polynomial_superfunction<R: Rng + ?Sized>(rng: &mut R, n: usize, s2: u32, degree: u32) -> SuperFunction {
    let mut comps = Vec::new();
    for bits in 0..(1u64 << s2) {
        if rng.random_bool(0.6) {
            comps.push((Monomial(bits), SmoothFunction::polynomial(polynomial(rng, n, degree, 3))));
        }
    }
    SuperFunction::from_components(n, s2, comps).expect("monomials fit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn instances_have_rational_spectra() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..20 {
            let m = instance(&mut rng, 3, 2);
            let chi = m.body().charpoly().unwrap();
            let roots = crate::poly::rational_roots(&chi).unwrap();
            assert_eq!(roots.iter().map(|(_, d)| d).sum::<usize>(), 3);
        }
    }

    #[test]
    fn tuples_commute_and_thetas_anticommute() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..10 {
            let ms = commuting_tuple(&mut rng, 2, 3, 2, true);
            assert!(ms[0].commutes_with(&ms[1], 0.0).unwrap());
            let th = theta_family(&mut rng, &ms[0], 2);
            assert!(th[0].anticommutes_with(&th[1], 0.0).unwrap());
            assert!(th[0].anticommutes_with(&th[0], 0.0).unwrap());
            assert!(ms[0].commutes_with(&th[1], 0.0).unwrap());
        }
    }
}
