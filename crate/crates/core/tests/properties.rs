mod common;

use common::*;
use lacuna_core::constructions::{lambda_to_s, s_to_lambda, sparse_k0, sparse_regularize, thin_above, SparseOptions};
use lacuna_core::counterexample::{circle_lambda_check, circle_s_check};
use lacuna_core::distset::DistanceSet;
use lacuna_core::orbits::{is_regular, translate, CrossSectionWindow};
use lacuna_core::semigroup::member;
use lacuna_core::{Basis, RealQ};
use proptest::prelude::*;

fn unit_sqrt2() -> (Basis, DistanceSet) {
    let b = Basis::standard();
    let s = DistanceSet::finite(vec![RealQ::integer(&b, 1), sqrt2(&b)], None).unwrap();
    (b, s)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn member_tilings_resum(a in 0i64..12, c in 0i64..12, p in 0i64..40) {
        let (b, s) = unit_sqrt2();
        let t = &(&RealQ::integer(&b, a) + &sqrt2(&b).scale_int(c)) + &q(&b, p, 7);
        prop_assume!(t.is_positive().unwrap());
        let got = member(&t, &s).unwrap();
        prop_assert_eq!(got.is_some(), multiset_member(&t, &[RealQ::integer(&b, 1), sqrt2(&b)]));
        if let Some(tl) = got {
            prop_assert_eq!(sum(&b, &tl.increments), t);
        }
    }

    #[test]
    fn circle_checks_agree(num in 1i64..60, den in 1i64..7, lnum in 1i64..5, lden in 1i64..5) {
        let b = Basis::rationals();
        let l = q(&b, num, den);
        let lam = q(&b, lnum, lden);
        let single = DistanceSet::finite(vec![lam.clone()], None).unwrap();
        prop_assert_eq!(circle_lambda_check(&l, &lam).unwrap(), circle_s_check(&l, &single).unwrap().is_some());
    }

    #[test]
    fn lattice_round_trip(n in 8usize..60, start in -30i64..30, den in 1i64..9) {
        let b = Basis::rationals();
        let lam = q(&b, 1, den);
        let s = DistanceSet::finite(vec![lam.scale_int(3), lam.scale_int(5)], None).unwrap();
        let w = CrossSectionWindow::from_gaps("p", q(&b, start, 3), &vec![lam.clone(); n], lam.clone()).unwrap();
        let out = lambda_to_s(&w, &lam, &s).unwrap();
        prop_assert!(is_regular(&out, &s).unwrap().regular);
        prop_assert_eq!(s_to_lambda(&out, &s, &lam).unwrap(), w);
    }

    #[test]
    fn thinning_then_regularizing_commutes_with_shifts(
        gaps in proptest::collection::vec((0i64..30, 0i64..4), 2..7),
        shift in -100i64..100,
    ) {
        let (b, s) = unit_sqrt2();
        let opts = SparseOptions::default();
        let k0 = sparse_k0(&s, &opts).unwrap();
        let gs: Vec<RealQ> = gaps.iter().map(|&(p, r)| &(&k0 + &q(&b, p + 1, 5)) + &sqrt2(&b).scale_int(r)).collect();
        let w = CrossSectionWindow::from_gaps("p", q(&b, 0, 1), &gs, k0.clone()).unwrap();
        let r = q(&b, shift, 11);
        let thin = thin_above(&w, &k0).unwrap();
        let out = sparse_regularize(&thin, &s, &opts).unwrap().final_window;
        let moved = sparse_regularize(&thin_above(&translate(&w, &r).unwrap(), &k0).unwrap(), &s, &opts).unwrap().final_window;
        prop_assert_eq!(moved, translate(&out, &r).unwrap());
        prop_assert!(is_regular(&out, &s).unwrap().regular);
    }
}
