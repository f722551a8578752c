use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotsys_core::catalog::{base_catalog, catalog_up_to, seed_catalog};
use rotsys_core::crossing::{crossing_count, hill_number, planar_k4};
use rotsys_core::{canonical_form, density, Catalog, Class, Rational, RotationSystem, Vertex};

fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rotation system of the straight-line drawing on `points`: around each
/// point the others in counterclockwise angular order.
fn rectilinear(points: &[(f64, f64)]) -> RotationSystem {
    let rows: Vec<Vec<Vertex>> = points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let mut others: Vec<(f64, Vertex)> = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, &(u, v))| ((v - y).atan2(u - x), j as Vertex))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0));
            others.into_iter().map(|(_, j)| j).collect()
        })
        .collect();
    RotationSystem::new(&rows).unwrap()
}

#[test]
fn random_point_sets_give_exactly_the_convex_seed() {
    let seed = seed_catalog(Class::Convex).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut keys = BTreeSet::new();
    for _ in 0..100_000 {
        let pts: Vec<(f64, f64)> = (0..5).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        keys.insert(canonical_form(&rectilinear(&pts)));
    }
    assert_eq!(keys.len(), 3);
    for k in &keys {
        assert!(seed.index_of_key(k).is_some());
    }
}

#[test]
fn random_point_sets_of_eight_lie_in_the_convex_catalog_family() {
    // Every 5-subsystem of a straight-line drawing is rectilinear, so it must
    // be one of the three convex seeds.
    let seed = seed_catalog(Class::Convex).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let pts: Vec<(f64, f64)> = (0..8).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        let r = rectilinear(&pts);
        let picked: Vec<Vertex> = sample(&mut rng, 8, 5).into_iter().map(|v| v as Vertex).collect();
        assert!(seed.contains(&r.induced_subsystem(&picked).unwrap()));
    }
}

#[test]
fn seed_crossing_multisets() {
    let counts = |class| {
        let mut c: Vec<u64> = seed_catalog(class)
            .unwrap()
            .systems()
            .map(|r| crossing_count(r).unwrap())
            .collect();
        c.sort_unstable();
        c
    };
    assert_eq!(counts(Class::Realizable), vec![1, 3, 3, 5, 5, 5]);
    assert_eq!(counts(Class::Convex), vec![1, 3, 5]);
}

#[test]
fn the_realizable_seed_has_one_chiral_pair() {
    let seed = seed_catalog(Class::Realizable).unwrap();
    let chiral = seed
        .systems()
        .filter(|r| canonical_form(&r.inverse()) != canonical_form(r))
        .count();
    assert_eq!(chiral, 2);
    assert_eq!(seed.equivalence_class_count(), 5);
}

fn e7() -> Catalog {
    catalog_up_to(Class::Realizable, 7).unwrap()
}

#[test]
fn counts_up_to_seven_vertices() {
    let e6 = catalog_up_to(Class::Realizable, 6).unwrap();
    let e7 = e6.extend().unwrap();
    assert_eq!(e6.len(), 165);
    assert_eq!(e6.to_nonequivalent().len(), 102);
    assert_eq!(e7.len(), 22_730);
    assert_eq!(e7.to_nonequivalent().len(), 11_556);
    assert_eq!(e7.to_nonequivalent().from_nonequivalent(), e7);
    assert!(e7.is_hereditary_over(&e6));
}

#[test]
fn crossing_minima_are_hill_numbers() {
    for n in 5..=7 {
        let cat = catalog_up_to(Class::Realizable, n).unwrap();
        let min = cat.systems().map(|r| crossing_count(r).unwrap()).min().unwrap();
        assert_eq!(min, hill_number(n as u64).unwrap(), "n = {n}");
    }
    let cat = e7();
    let n4 = planar_k4();
    let max = cat.systems().map(|r| density(&n4, r)).max().unwrap();
    assert_eq!(max, rational(26, 35));
}

#[test]
fn chain_rule_through_five_vertices() {
    let cat = e7();
    let e4 = base_catalog(Class::Realizable, 4).unwrap();
    let e5 = seed_catalog(Class::Realizable).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in sample(&mut rng, cat.len(), 200) {
        let r = cat.get(i).unwrap();
        let mut total = Rational::zero();
        for r4 in e4.systems() {
            let direct = density(r4, r);
            let through: Rational = e5.systems().map(|r5| density(r4, r5) * density(r5, r)).sum();
            assert_eq!(direct, through, "target {i}");
            total += direct;
        }
        assert_eq!(total, rational(1, 1));
        let five: Rational = e5.systems().map(|r5| density(r5, r)).sum();
        assert_eq!(five, rational(1, 1));
    }
}

#[test]
fn every_member_of_e7_has_only_realizable_five_subsystems() {
    let cat = e7();
    let e5 = seed_catalog(Class::Realizable).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in sample(&mut rng, cat.len(), 300) {
        let r = cat.get(i).unwrap();
        let picked: Vec<Vertex> = sample(&mut rng, 7, 5).into_iter().map(|v| v as Vertex).collect();
        assert!(e5.contains(&r.induced_subsystem(&picked).unwrap()));
    }
}

#[test]
fn convex_catalogs_sit_inside_realizable_ones() {
    let e6 = catalog_up_to(Class::Realizable, 6).unwrap();
    let c6 = catalog_up_to(Class::Convex, 6).unwrap();
    assert_eq!(c6.len(), 19);
    assert!(c6.systems().all(|r| e6.contains(r)));
    let c7 = c6.extend().unwrap();
    assert_eq!(c7.len(), 233);
    assert!(c7.is_hereditary_over(&c6));
}
