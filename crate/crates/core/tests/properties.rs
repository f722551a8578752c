use std::sync::OnceLock;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::sample::subsequence;
use rotsys_core::catalog::catalog_up_to;
use rotsys_core::crossing::{crossing_count, crossing_k4, planar_k4};
use rotsys_core::pair_density::pair_density_matrix;
use rotsys_core::rational::{format_rational, parse_rational};
use rotsys_core::{canonical_form, density, Catalog, Class, FlagBasis, Rational, RotationSystem, TypeSpec, Vertex};

fn e6() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| catalog_up_to(Class::Realizable, 6).unwrap())
}

/// Arbitrary (not necessarily realizable) rotation systems.
fn any_system() -> impl Strategy<Value = RotationSystem> {
    (3usize..=7).prop_flat_map(|n| {
        let rows: Vec<_> = (0..n)
            .map(|v| Just((0..n as Vertex).filter(|&u| u != v as Vertex).collect::<Vec<_>>()).prop_shuffle())
            .collect();
        rows.prop_map(|rows| RotationSystem::new(&rows).unwrap())
    })
}

fn with_perm() -> impl Strategy<Value = (RotationSystem, Vec<Vertex>)> {
    any_system().prop_flat_map(|r| {
        let perm = Just((0..r.n() as Vertex).collect::<Vec<_>>()).prop_shuffle();
        (Just(r), perm)
    })
}

fn member() -> impl Strategy<Value = RotationSystem> {
    (0..e6().len()).prop_map(|i| *e6().get(i).unwrap())
}

proptest! {
    #[test]
    fn canonical_form_ignores_relabeling((r, perm) in with_perm()) {
        let s = r.relabel(&perm).unwrap();
        prop_assert_eq!(canonical_form(&s), canonical_form(&r));
    }

    #[test]
    fn inverse_is_an_involution(r in any_system()) {
        prop_assert_eq!(r.inverse().inverse(), r);
    }

    #[test]
    fn rotations_may_start_anywhere(r in any_system(), shift in 0usize..6) {
        let rows: Vec<Vec<Vertex>> = r
            .rotations()
            .map(|row| {
                let mut row = row.to_vec();
                let k = shift % row.len();
                row.rotate_left(k);
                row
            })
            .collect();
        prop_assert_eq!(RotationSystem::new(&rows).unwrap(), r);
    }

    #[test]
    fn line_format_round_trips(r in any_system()) {
        prop_assert_eq!(RotationSystem::parse_line(&r.to_line()).unwrap(), r);
    }

    #[test]
    fn crossings_are_invariant((r, perm) in with_perm()) {
        prop_assume!(r.n() >= 4);
        let c = crossing_count(&r).unwrap();
        prop_assert_eq!(crossing_count(&r.inverse()).unwrap(), c);
        prop_assert_eq!(crossing_count(&r.relabel(&perm).unwrap()).unwrap(), c);
    }

    #[test]
    fn members_split_into_planar_and_crossing_k4s(r in member()) {
        let total = density(&planar_k4(), &r) + density(&crossing_k4(), &r);
        prop_assert_eq!(total, Rational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn subsystems_of_members_are_members(r in member(), picked in subsequence((0..6 as Vertex).collect::<Vec<_>>(), 5)) {
        let seed = catalog_up_to(Class::Realizable, 5).unwrap();
        prop_assert!(seed.contains(&r.induced_subsystem(&picked).unwrap()));
    }

    #[test]
    fn pair_densities_are_symmetric_and_sub_stochastic(r in member()) {
        let spec = TypeSpec::new(RotationSystem::increasing(1).unwrap(), 3).unwrap();
        let basis = FlagBasis::enumerate(&spec, &catalog_up_to(Class::Realizable, 3).unwrap()).unwrap();
        let q = pair_density_matrix(&basis, &r).unwrap();
        let dense = q.to_dense();
        for (a, row) in dense.iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                prop_assert_eq!(v, &dense[b][a]);
                prop_assert!(*v >= Rational::from_integer(BigInt::from(0)));
            }
        }
        prop_assert!(q.total() <= Rational::from_integer(BigInt::from(1)));
    }

    #[test]
    fn rationals_round_trip(num in any::<i64>(), den in 1i64..=i64::MAX) {
        let r = Rational::new(BigInt::from(num), BigInt::from(den));
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}
