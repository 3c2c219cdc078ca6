use std::cmp::Ordering;

use conehankel::fourier::{
    conjugate_function, convolve, eval_grid, flip, project, sup_norm_estimate, FourierCoeffs,
};
use conehankel::operators::{hankel_matrix, hphi_matrix, toeplitz_matrix};
use conehankel::ordered_group::{compare, cone_slab, GroupElement, OrderSpec, Sign};
use conehankel::Complex64;
use proptest::prelude::*;

fn specs() -> impl Strategy<Value = OrderSpec> {
    prop_oneof![
        (1usize..=3).prop_map(|d| OrderSpec::lex(d).unwrap()),
        prop::sample::select(vec![2u64, 3, 5, 7, 10]).prop_map(|m| OrderSpec::quadratic(m).unwrap()),
    ]
}

fn element(dim: usize, r: i64) -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(-r..=r, dim).prop_map(GroupElement::new)
}

fn symbol(dim: usize, r: i64, terms: usize) -> impl Strategy<Value = FourierCoeffs> {
    prop::collection::vec((element(dim, r), -1.0f64..1.0, -1.0f64..1.0), 0..=terms).prop_map(
        move |v| {
            let mut f = FourierCoeffs::zero(dim);
            for (n, re, im) in v {
                f.set(n, Complex64::new(re, im));
            }
            f
        },
    )
}

fn spec_and_symbol(r: i64, terms: usize) -> impl Strategy<Value = (OrderSpec, FourierCoeffs)> {
    specs().prop_flat_map(move |s| {
        let d = s.dim();
        (Just(s), symbol(d, r, terms))
    })
}

fn spec_and_triple(r: i64) -> impl Strategy<Value = (OrderSpec, GroupElement, GroupElement, GroupElement)> {
    specs().prop_flat_map(move |s| {
        let d = s.dim();
        (Just(s), element(d, r), element(d, r), element(d, r))
    })
}

proptest! {
    #[test]
    fn order_is_antisymmetric_transitive_and_translation_invariant(
        (spec, a, b, k) in spec_and_triple(50)
    ) {
        let ab = compare(&spec, &a, &b).unwrap();
        prop_assert_eq!(ab, compare(&spec, &b, &a).unwrap().reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        prop_assert_eq!(compare(&spec, &(&a + &k), &(&b + &k)).unwrap(), ab);
        let bk = compare(&spec, &b, &k).unwrap();
        if ab != Ordering::Greater && bk != Ordering::Greater {
            prop_assert_ne!(compare(&spec, &a, &k).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn quadratic_sign_matches_float_away_from_zero(a in -1000i64..1000, b in -1000i64..1000, m in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let spec = OrderSpec::quadratic(m).unwrap();
        let x = a as f64 + b as f64 * (m as f64).sqrt();
        prop_assume!(x.abs() > 1e-6);
        let n = GroupElement::from([a, b]);
        prop_assert_eq!(spec.signum(&n), x.partial_cmp(&0.0).unwrap());
    }

    #[test]
    fn projections_split_and_flip_swaps((spec, f) in spec_and_symbol(4, 12)) {
        let plus = project(&f, &spec, Sign::Positive).unwrap();
        let minus = project(&f, &spec, Sign::Negative).unwrap();
        prop_assert_eq!(plus.add(&minus).unwrap(), f.clone());
        prop_assert!(plus.support().all(|n| !spec.is_negative(n)));
        prop_assert_eq!(flip(&flip(&f)), f.clone());
        // J maps X₋ into X₊ \ {0}.
        prop_assert!(flip(&minus).support().all(|n| spec.is_strictly_positive(n)));
    }

    #[test]
    fn conjugation_squares_to_minus_identity_off_the_mean((spec, u) in spec_and_symbol(4, 12)) {
        let twice = conjugate_function(&conjugate_function(&u, &spec).unwrap(), &spec).unwrap();
        let mean = FourierCoeffs::delta(GroupElement::zero(u.dim()), u.mean());
        let expect = mean.sub(&u).unwrap();
        prop_assert!(twice.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn convolution_commutes_and_shifts(
        (spec, f, g) in specs().prop_flat_map(|s| { let d = s.dim(); (Just(s), symbol(d, 3, 6), symbol(d, 3, 6)) }),
    ) {
        let fg = convolve(&f, &g).unwrap();
        prop_assert!(fg.max_abs_diff(&convolve(&g, &f).unwrap()) < 1e-15);
        let k = GroupElement::unit(spec.dim(), 0);
        let shifted = convolve(&FourierCoeffs::delta(k.clone(), Complex64::new(1.0, 0.0)), &f).unwrap();
        for (n, c) in f.iter() {
            prop_assert_eq!(shifted.get(&(n + &k)), *c);
        }
        prop_assert_eq!(shifted.len(), f.len());
    }

    #[test]
    fn grid_round_trip_and_bracket_order((_, f) in spec_and_symbol(5, 10)) {
        let n = (2 * f.max_degree() as usize + 1).next_power_of_two();
        prop_assume!(f.dim() <= 2);
        let back = eval_grid(&f, n).unwrap().coefficients();
        prop_assert!(back.max_abs_diff(&f) < 1e-12);
        let b = sup_norm_estimate(&f, 4).unwrap();
        prop_assert!(b.grid_max <= b.certified_upper + 1e-12);
        prop_assert!(b.certified_upper <= b.l1_bound + 1e-12);
    }

    #[test]
    fn hankel_entries_depend_on_the_sum_only((spec, f) in spec_and_symbol(4, 10)) {
        prop_assume!(spec.dim() <= 2);
        let a = project(&f, &spec, Sign::Positive).unwrap();
        let slab = cone_slab(&spec, Sign::Positive, 3).unwrap();
        let m = hankel_matrix(&a, &slab).unwrap();
        for (i, xi) in slab.elements().iter().enumerate() {
            for (j, chi) in slab.elements().iter().enumerate() {
                prop_assert_eq!(m.data()[(i, j)], a.get(&(xi + chi)));
            }
        }
        prop_assert_eq!(m.data().transpose(), m.data().clone());
    }

    #[test]
    fn hphi_sees_only_the_antianalytic_part((spec, f, h) in specs().prop_flat_map(|s| {
        let d = s.dim();
        (Just(s), symbol(d, 4, 10), symbol(d, 4, 10))
    })) {
        prop_assume!(spec.dim() <= 2);
        let analytic = project(&h, &spec, Sign::Positive).unwrap();
        let a = hphi_matrix(&f, &spec, 3).unwrap();
        let b = hphi_matrix(&f.add(&analytic).unwrap(), &spec, 3).unwrap();
        prop_assert_eq!(a.data(), b.data());
        // T_φ is the compression of multiplication: its adjoint is T of φ̄.
        let slab = cone_slab(&spec, Sign::Positive, 3).unwrap();
        let t = toeplitz_matrix(&f, &slab).unwrap();
        let tbar = toeplitz_matrix(&f.conj_symbol(), &slab).unwrap();
        let adj = t.adjoint();
        prop_assert_eq!(adj.data(), tbar.data());
    }
}
