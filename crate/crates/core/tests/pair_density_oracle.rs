//! Pair densities against a direct enumeration of ordered vertex tuples.
//!
//! A tuple `(θ, x_1..x_m, y_1..y_m)` of distinct vertices is uniform, so the
//! probability that roots `θ`, sides `X`, `Y` give flags `a` and `b` is the
//! number of such tuples over `n!/(n-k-2m)!`. Flags are identified by trying
//! every relabeling of the non-root vertices, without canonical codes.

use itertools::Itertools;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotsys_core::catalog::catalog_up_to;
use rotsys_core::combinatorics::falling;
use rotsys_core::pair_density::{pair_density_matrices, pair_density_matrix};
use rotsys_core::{Catalog, Class, FlagBasis, Rational, RotationSystem, TypeConfig, TypeSpec, Vertex};

fn sys(s: &str) -> RotationSystem {
    RotationSystem::from_one_based_digits(s).unwrap()
}

fn d3() -> RotationSystem {
    sys("1:2543, 2:1435, 3:1542, 4:1532, 5:1243")
}

fn rational(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Index of the flag equal to `s` up to relabeling of non-roots.
fn identify(basis: &FlagBasis, s: &RotationSystem, k: usize) -> Option<usize> {
    let l = s.n();
    for tail in (k as Vertex..l as Vertex).permutations(l - k) {
        let perm: Vec<Vertex> = (0..k as Vertex).chain(tail).collect();
        let t = s.relabel(&perm).unwrap();
        if let Some(i) = basis.flags().iter().position(|f| *f.system() == t) {
            return Some(i);
        }
    }
    None
}

fn oracle(basis: &FlagBasis, r: &RotationSystem) -> Vec<Vec<Rational>> {
    let k = basis.spec().roots();
    let m = basis.spec().flag_size - k;
    let n = r.n();
    let dim = basis.len();
    let mut counts = vec![vec![0u64; dim]; dim];
    for tuple in (0..n as Vertex).permutations(k + 2 * m) {
        let theta = &tuple[..k];
        if r.induced_ordered(theta) != basis.spec().sigma {
            continue;
        }
        let side = |s: &[Vertex]| {
            let order: Vec<Vertex> = theta.iter().chain(s).copied().collect();
            identify(basis, &r.induced_ordered(&order), k).expect("flag missing from basis")
        };
        let a = side(&tuple[k..k + m]);
        let b = side(&tuple[k + m..]);
        counts[a][b] += 1;
    }
    let den = falling(n as u64, (k + 2 * m) as u64);
    counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| rational(c, den)).collect())
        .collect()
}

fn basis(class: Class, sigma: RotationSystem, l: usize) -> FlagBasis {
    let cat = catalog_up_to(class, l).unwrap();
    FlagBasis::enumerate(&TypeSpec::new(sigma, l).unwrap(), &cat).unwrap()
}

#[test]
fn three_roots_on_d3_match_ordered_tuples() {
    let sigma2 = RotationSystem::increasing(3).unwrap();
    let b = basis(Class::Realizable, sigma2, 4);
    let q = pair_density_matrix(&b, &d3()).unwrap();
    assert_eq!(q.to_dense(), oracle(&b, &d3()));
    // Each of the 5*4*3 injections induces the 3-vertex system.
    assert_eq!(q.total(), rational(1, 1));
}

#[test]
fn one_root_on_d3_matches_ordered_tuples() {
    let sigma1 = RotationSystem::increasing(1).unwrap();
    for l in [2, 3] {
        let b = basis(Class::Realizable, sigma1, l);
        let q = pair_density_matrix(&b, &d3()).unwrap();
        assert_eq!(q.to_dense(), oracle(&b, &d3()), "flag size {l}");
    }
}

#[test]
fn single_vertex_type_with_three_vertex_flags_is_one() {
    let b = basis(Class::Realizable, RotationSystem::increasing(1).unwrap(), 3);
    assert_eq!(b.len(), 1);
    for r in catalog_up_to(Class::Realizable, 5).unwrap().systems() {
        let q = pair_density_matrix(&b, r).unwrap();
        assert_eq!(q.to_dense(), vec![vec![rational(1, 1)]]);
    }
}

#[test]
fn type_absent_from_target_gives_zero_matrix() {
    // Points in convex position: all five K4s cross, none is planar.
    let convex5 = RotationSystem::increasing(5).unwrap();
    assert_eq!(rotsys_core::crossing::crossing_count(&convex5).unwrap(), 5);
    let planar = basis(Class::Realizable, rotsys_core::crossing::planar_k4(), 4);
    let q = pair_density_matrix(&planar, &convex5).unwrap();
    assert!(q.entries().is_empty());
    assert_eq!(q.total(), rational(0, 1));
    let crossing = basis(Class::Realizable, rotsys_core::crossing::crossing_k4(), 4);
    let q = pair_density_matrix(&crossing, &convex5).unwrap();
    assert_eq!(q.to_dense(), oracle(&crossing, &convex5));
}

fn e7() -> Catalog {
    catalog_up_to(Class::Realizable, 7).unwrap()
}

#[test]
fn reduced_types_match_ordered_tuples_on_sampled_targets() {
    let cat = e7();
    let config = TypeConfig::reduced();
    let bases: Vec<FlagBasis> = config
        .types
        .iter()
        .map(|t| basis(Class::Realizable, t.sigma, t.flag_size))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut picks: Vec<usize> = (0..cat.len()).collect();
    picks.shuffle(&mut rng);
    for &i in &picks[..4] {
        let r = cat.get(i).unwrap();
        let qs = pair_density_matrices(&bases, r).unwrap();
        for (b, q) in bases.iter().zip(&qs) {
            assert_eq!(q.to_dense(), oracle(b, r), "target {i}, type {}", b.spec());
        }
    }
}

#[test]
fn entry_sums_are_root_embedding_probabilities_on_e7() {
    // With 2l - k = 7 = n every split is exhaustive, so the entries sum to
    // the probability that a random injection induces the labeled type.
    let cat = e7();
    let config = TypeConfig::full(Class::Realizable).unwrap();
    let e6 = catalog_up_to(Class::Realizable, 6).unwrap();
    let five: Vec<FlagBasis> = config
        .types
        .iter()
        .filter(|t| t.roots() == 5)
        .map(|t| FlagBasis::enumerate(t, &e6).unwrap())
        .collect();
    let step = cat.len() / 150;
    for r in cat.systems().step_by(step) {
        let qs = pair_density_matrices(&five, r).unwrap();
        for (b, q) in five.iter().zip(&qs) {
            assert_eq!(b.spec().product_size(), 7);
            let hits = (0..7 as Vertex)
                .permutations(5)
                .filter(|t| r.induced_ordered(t) == b.spec().sigma)
                .count() as u64;
            assert_eq!(q.total(), rational(hits, falling(7, 5)));
        }
    }
}

#[test]
fn flags_too_large_for_the_target_are_rejected() {
    let b = basis(Class::Realizable, RotationSystem::increasing(1).unwrap(), 4);
    assert!(pair_density_matrix(&b, &d3()).is_err());
}
