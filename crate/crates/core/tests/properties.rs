use std::collections::BTreeMap;

use khcube::cube::CubeOptions;
use khcube::diagram::{braid_closure, PlanarDiagram};
use khcube::filtration::FilteredComplex;
use khcube::invariants::{alexander, mod4_betti};
use khcube::khovanov::{Coeffs, KhovanovComplex};
use khcube::oracle::jones_unnormalized;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn braid() -> impl Strategy<Value = PlanarDiagram> {
    (2usize..=4)
        .prop_flat_map(|s| {
            let gen = (1..s as i32, any::<bool>()).prop_map(|(g, neg)| if neg { -g } else { g });
            (Just(s), prop::collection::vec(gen, 1..=7))
        })
        .prop_map(|(s, w)| braid_closure(s, &w).unwrap())
}

fn knot() -> impl Strategy<Value = PlanarDiagram> {
    braid().prop_filter("one component", |d| d.component_count() == 1)
}

fn ranks(d: &PlanarDiagram, reduced: bool) -> BTreeMap<(i64, i64), usize> {
    let c = if reduced {
        KhovanovComplex::reduced_assemble(d, CubeOptions::default())
    } else {
        KhovanovComplex::assemble(d, CubeOptions::default())
    };
    c.unwrap().homology(Coeffs::Q).unwrap().ranks()
}

fn total(r: &BTreeMap<(i64, i64), usize>) -> usize {
    r.values().sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homology_ignores_crossing_order(d in braid(), seed in any::<u64>()) {
        let n = d.crossing_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&i| (seed.rotate_left(i as u32 * 7) ^ i as u64, i));
        let e = d.permute_crossings(&perm).unwrap();
        let a = KhovanovComplex::assemble(&d, CubeOptions::default()).unwrap().homology(Coeffs::Z).unwrap();
        let b = KhovanovComplex::assemble(&e, CubeOptions::default()).unwrap().homology(Coeffs::Z).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn euler_characteristic_matches_the_state_sum(d in braid()) {
        let arcs: Vec<[i64; 4]> = d.crossings().iter().map(|c| c.arcs).collect();
        let h = KhovanovComplex::assemble(&d, CubeOptions::default()).unwrap().homology(Coeffs::Q).unwrap();
        let jones: BTreeMap<i64, i64> =
            jones_unnormalized(&arcs, d.signs(), d.extra_circles()).into_iter().map(|(e, c)| (-e, c)).collect();
        prop_assert_eq!(h.euler_by_q(), jones);
    }

    #[test]
    fn mirror_negates_both_gradings(d in braid()) {
        let a = ranks(&d, false);
        let b: BTreeMap<(i64, i64), usize> =
            ranks(&d.mirror().unwrap(), false).into_iter().map(|((h, q), r)| ((-h, -q), r)).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn knot_invariants_are_consistent(d in knot()) {
        let delta = alexander(&d).unwrap();
        prop_assert!(delta.is_symmetric());
        let at_one = delta.eval_one();
        prop_assert!(at_one == BigInt::from(1) || at_one == BigInt::from(-1));

        let red = ranks(&d, true);
        let unred = ranks(&d, false);
        prop_assert!(total(&red) <= total(&unred));
        prop_assert_eq!(mod4_betti(&red).total(), total(&red));

        // |Δ(-1)| is the determinant, a lower bound for the reduced rank
        let det = delta.eval(&BigRational::from_integer(BigInt::from(-1)));
        prop_assert!(det.numer().magnitude() <= &BigInt::from(total(&red)).into_parts().1);
        // reduced q-gradings of a knot are odd
        prop_assert!(red.keys().all(|&(_, q)| q.rem_euclid(2) == 1));
    }

    #[test]
    fn homological_filtration_pages(d in braid()) {
        let (_, c) = KhovanovComplex::assemble(&d, CubeOptions::default()).unwrap().to_bigraded().unwrap();
        let hs: Vec<i64> = c.gens().iter().map(|g| g.0).collect();
        let spread = match (hs.iter().min(), hs.iter().max()) {
            (Some(a), Some(b)) => (b - a) as usize,
            _ => 0,
        };
        let ss = FilteredComplex::new(c, (1, 0)).unwrap().spectral_sequence().unwrap();
        prop_assert_eq!(ss.e_infinity().total_rank(), ss.homology_rank);
        for w in ss.pages.windows(2) {
            prop_assert!(w[1].total_rank() <= w[0].total_rank());
            prop_assert_eq!(w[0].total_rank() - w[1].total_rank(), 2 * w[0].total_d_rank());
        }
        for page in ss.pages.iter().skip(spread + 1) {
            prop_assert_eq!(page.total_d_rank(), 0);
        }
    }
}
