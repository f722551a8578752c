//! Exact densities of small systems inside larger ones.

use itertools::Itertools;
use num_bigint::BigInt;

use crate::canon::canonical_form;
use crate::combinatorics::binomial;
use crate::rational::Rational;
use crate::rotation::{RotationSystem, Vertex};

/// Number of `small.n()`-subsets of `big` inducing a system isomorphic to `small`.
pub fn occurrences(small: &RotationSystem, big: &RotationSystem) -> u64 {
    let k = small.n();
    let n = big.n();
    if k > n {
        return 0;
    }
    let target = canonical_form(small);
    (0..n as Vertex)
        .combinations(k)
        .filter(|s| canonical_form(&big.induced_ordered(s)) == target)
        .count() as u64
}

/// Fraction of the `small.n()`-subsets of `big` that induce a copy of `small`;
/// zero when `small` is larger than `big`.
pub fn density(small: &RotationSystem, big: &RotationSystem) -> Rational {
    let k = small.n() as u64;
    let n = big.n() as u64;
    if k > n {
        return Rational::from_integer(BigInt::from(0));
    }
    Rational::new(
        BigInt::from(occurrences(small, big)),
        BigInt::from(binomial(n, k)),
    )
}
