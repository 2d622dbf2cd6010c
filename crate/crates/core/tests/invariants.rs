use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use superpoint::sample;
use superpoint::spectral::{self, SpectralOptions};
use superpoint::{
    build, eval_even, merge, AlgebraSignature, AssignmentEta, Backend, Coefficient, GrassmannElement, MergeConvention, Parity,
    SmoothFunction, SuperFunction, SuperMatrix,
};

fn sig(s: u32) -> AlgebraSignature {
    AlgebraSignature::new(s).unwrap()
}

fn element(rng: &mut StdRng, s: u32) -> GrassmannElement {
    let body = GrassmannElement::scalar(Coefficient::from_int(rng.random_range(-3..=3), Backend::Exact), sig(s));
    &body + &sample::soul(rng, sig(s), None, 0.4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grassmann_ring_axioms(seed in any::<u64>(), s in 0u32..=5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (a, b, c) = (element(&mut rng, s), element(&mut rng, s), element(&mut rng, s));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn odd_elements_anticommute_and_square_to_zero(seed in any::<u64>(), s in 1u32..=5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = sample::soul(&mut rng, sig(s), Some(Parity::Odd), 0.5);
        let y = sample::soul(&mut rng, sig(s), Some(Parity::Odd), 0.5);
        prop_assert_eq!(&x * &y, -&(&y * &x));
        prop_assert!((&x * &x).is_zero());
    }

    #[test]
    fn even_elements_are_central(seed in any::<u64>(), s in 0u32..=5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = sample::even_element(&mut rng, sig(s));
        let x = element(&mut rng, s);
        prop_assert_eq!(&e * &x, &x * &e);
    }

    #[test]
    fn merge_is_multiplicative(seed in any::<u64>(), s1 in 0u32..=3, s2 in 0u32..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (a, b) = (element(&mut rng, s1), element(&mut rng, s1));
        let (c, d) = (element(&mut rng, s2), element(&mut rng, s2));
        for convention in [MergeConvention::Anticommute, MergeConvention::Commute] {
            let merged = AlgebraSignature::merged(s1, s2, convention).unwrap();
            let left = |x: &GrassmannElement| x.embed_left(merged).unwrap();
            let right = |x: &GrassmannElement| x.embed_right(merged).unwrap();
            prop_assert_eq!(left(&(&a * &b)), &left(&a) * &left(&b));
            prop_assert_eq!(right(&(&c * &d)), &right(&c) * &right(&d));
            prop_assert_eq!(merge(&a, &c, convention).unwrap(), &left(&a) * &right(&c));
        }
    }

    #[test]
    fn inverse_is_two_sided(seed in any::<u64>(), r in 1usize..=4, s in 0u32..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = sample::invertible_instance(&mut rng, r, s);
        let inv = m.invert().unwrap();
        let id = SuperMatrix::identity(r, sig(s), Backend::Exact);
        prop_assert_eq!(&m * &inv, id.clone());
        prop_assert_eq!(&inv * &m, id);
    }

    #[test]
    fn idempotents_reproduce_the_matrix(seed in any::<u64>(), r in 1usize..=3, s in 0u32..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = sample::instance(&mut rng, r, s);
        let opts = SpectralOptions::default();
        let e = spectral::eigen_extract(&m, None, &opts).unwrap();
        let sys = spectral::idempotent_system(&m, &e).unwrap();
        prop_assert!(sys.axiom_violation(0.0).is_none());
        let mut total = 0;
        for (i, ei) in sys.idempotents().iter().enumerate() {
            // m commutes with every ê and (m − λ)ê is nilpotent.
            prop_assert_eq!(&m * ei, ei * &m);
            let n = &m.shift(&sys.labels()[i][0]) * ei;
            prop_assert!(n.pow((r * (s as usize + 1)) as u32).is_zero());
            total += sys.ranks()[i];
        }
        prop_assert_eq!(total, r);
    }

    #[test]
    fn polynomial_evaluation_is_a_ring_map(seed in any::<u64>(), k in 1usize..=3, s in 0u32..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let xs: Vec<_> = (0..k).map(|_| sample::even_element(&mut rng, sig(s))).collect();
        let p = sample::polynomial(&mut rng, k, 3, 3);
        let q = sample::polynomial(&mut rng, k, 3, 3);
        let (fp, fq) = (SmoothFunction::polynomial(p.clone()), SmoothFunction::polynomial(q.clone()));
        let prod = SmoothFunction::polynomial(p.mul(&q).unwrap());
        prop_assert_eq!(eval_even(&prod, &xs).unwrap(), &eval_even(&fp, &xs).unwrap() * &eval_even(&fq, &xs).unwrap());
    }

    #[test]
    fn map_is_multiplicative_on_polynomials(seed in any::<u64>(), n in 1usize..=2, s2 in 0usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let r = rng.random_range(1..=3);
        let ys = sample::commuting_tuple(&mut rng, n, r, 2, true);
        let thetas = sample::theta_family(&mut rng, &ys[0], s2);
        let h = build(&AssignmentEta::new(ys, thetas).unwrap(), &SpectralOptions::default()).unwrap();
        let f = sample::polynomial_superfunction(&mut rng, n, s2 as u32, 2);
        let g = sample::polynomial_superfunction(&mut rng, n, s2 as u32, 2);
        prop_assert_eq!(h.apply(&f.mul(&g).unwrap()).unwrap(), &h.apply(&f).unwrap() * &h.apply(&g).unwrap());
        let one = SuperFunction::even(SmoothFunction::constant(Coefficient::from_int(1, Backend::Exact), n), s2 as u32);
        prop_assert_eq!(h.apply(&one).unwrap(), SuperMatrix::identity(r, sig(2), Backend::Exact));
    }
}

#[test]
fn exp_of_diagonal_matches_entrywise_exp() {
    let m = SuperMatrix::from_ints(&[&[1, 0], &[0, -2]], sig(0));
    let h = build(&AssignmentEta::new(vec![m], vec![]).unwrap(), &SpectralOptions::default()).unwrap();
    let out = h.apply_even(&SmoothFunction::parse("exp(y1)", 1).unwrap()).unwrap();
    let e = |i: usize| out.entry(i, i).body().to_complex().re;
    assert!((e(0) - 1f64.exp()).abs() < 1e-12);
    assert!((e(1) - (-2f64).exp()).abs() < 1e-12);
    assert!(out.entry(0, 1).is_negligible(1e-15));
}
