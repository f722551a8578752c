//! Crossing counts of rotation systems and the closed-form bounds around
//! Hill's and Zarankiewicz's formulas.
//!
//! In a good drawing of `K4` there are 0 or 1 crossings and the rotation
//! system tells which: only the planar system `N4` has none. Every crossing of
//! a drawing of `K_n` lies in exactly one induced `K4`, hence
//! `cr = C(n,4) * (1 - d(N4))`.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::canon::{canonical_form, CanonicalKey};
use crate::combinatorics::{binomial, binomial_big};
use crate::density::density;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rotation::{RotationSystem, Vertex};

/// The rotation system of the planar drawing of `K4`.
pub fn planar_k4() -> RotationSystem {
    RotationSystem::from_one_based_digits("1:234 2:143 3:124 4:132").expect("valid literal")
}

/// The rotation system of the drawing of `K4` with one crossing.
pub fn crossing_k4() -> RotationSystem {
    RotationSystem::from_one_based_digits("1:243 2:143 3:124 4:123").expect("valid literal")
}

pub fn planar_k4_key() -> CanonicalKey {
    canonical_form(&planar_k4())
}

/// Number of 4-subsets whose induced subsystem is not the planar `K4`.
/// Realizability is not checked.
pub fn crossing_count(r: &RotationSystem) -> Result<u64> {
    if r.n() < 4 {
        return Err(Error::domain("crossing count needs at least 4 vertices"));
    }
    let planar = planar_k4_key();
    Ok((0..r.n() as Vertex)
        .combinations(4)
        .filter(|s| canonical_form(&r.induced_ordered(s)) != planar)
        .count() as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSummary {
    pub n: usize,
    pub crossing_count: u64,
    pub noncrossing_k4_density: Rational,
    pub hill_value: u64,
    /// `None` below five vertices, where `H(n) = 0`.
    pub ratio_to_hill: Option<Rational>,
}

impl CrossingSummary {
    pub fn of(r: &RotationSystem) -> Result<Self> {
        let n = r.n();
        let crossing_count = crossing_count(r)?;
        let noncrossing_k4_density = density(&planar_k4(), r);
        let hill_value = hill_number(n as u64)?;
        let ratio_to_hill =
            (hill_value > 0).then(|| Rational::new(BigInt::from(crossing_count), BigInt::from(hill_value)));
        Ok(CrossingSummary {
            n,
            crossing_count,
            noncrossing_k4_density,
            hill_value,
            ratio_to_hill,
        })
    }
}

/// `H(n) = floor(n/2) floor((n-1)/2) floor((n-2)/2) floor((n-3)/2) / 4`.
pub fn hill_number(n: u64) -> Result<u64> {
    if n < 3 {
        return Err(Error::domain("Hill's number is defined for n >= 3"));
    }
    Ok((n / 2) * ((n - 1) / 2) * ((n - 2) / 2) * ((n - 3) / 2) / 4)
}

/// `Z(p,q) = floor(p/2) floor((p-1)/2) floor(q/2) floor((q-1)/2)`.
pub fn zarankiewicz(p: u64, q: u64) -> Result<u64> {
    if p == 0 || q == 0 {
        return Err(Error::domain("Zarankiewicz's number needs p, q >= 1"));
    }
    Ok((p / 2) * ((p - 1) / 2) * (q / 2) * ((q - 1) / 2))
}

/// `cr_m / C(m,4)`: by monotonicity of `cr(K_n)/C(n,4)`, every larger `n`
/// has `cr(K_n) >= coefficient * C(n,4)`.
pub fn counting_lift_ratio(m: u64, cr_m: u64) -> Result<Rational> {
    if m < 5 {
        return Err(Error::domain("counting lift needs m >= 5"));
    }
    Ok(Rational::new(BigInt::from(cr_m), BigInt::from(binomial(m, 4))))
}

/// The coefficient `c` with `cr(K_n) >= c * n(n-1)(n-2)(n-3)`, i.e.
/// `cr_m / (24 C(m,4))`, before taking ceilings.
pub fn counting_lift_coefficient(m: u64, cr_m: u64) -> Result<Rational> {
    Ok(counting_lift_ratio(m, cr_m)? / Rational::from_integer(BigInt::from(24)))
}

/// `ceil(cr_m * C(n,4) / C(m,4))`, a lower bound on `cr(K_n)` from a known
/// `cr(K_m)`.
pub fn counting_lift(m: u64, cr_m: u64, n: u64) -> Result<BigInt> {
    if n < m {
        return Err(Error::domain("counting lift needs n >= m"));
    }
    let num = BigInt::from(cr_m) * binomial_big(n, 4);
    let den = binomial_big(m, 4);
    if den.is_zero() {
        return Err(Error::domain("counting lift needs m >= 4"));
    }
    Ok(num.div_ceil(&den))
}

/// `(1 - d) / (3/8)`: the asymptotic ratio `cr(K_n)/H(n)` implied by an
/// upper bound `d` on the non-crossing `K4` density.
pub fn density_to_hill_ratio(d: &Rational) -> Result<Rational> {
    if *d < Rational::zero() || *d > Rational::one() {
        return Err(Error::domain("density must lie in [0, 1]"));
    }
    Ok((Rational::one() - d) * Rational::new(BigInt::from(8), BigInt::from(3)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_rational, ratio};

    #[test]
    fn crossing_counts_of_small_systems() {
        assert_eq!(crossing_count(&planar_k4()).unwrap(), 0);
        assert_eq!(crossing_count(&crossing_k4()).unwrap(), 1);
        let d3 = RotationSystem::from_one_based_digits("1:2543 2:1435 3:1542 4:1532 5:1243").unwrap();
        assert_eq!(crossing_count(&d3).unwrap(), 3);
        assert_eq!(crossing_count(&d3.inverse()).unwrap(), 3);
        assert!(crossing_count(&RotationSystem::increasing(3).unwrap()).is_err());
    }

    #[test]
    fn summary_is_consistent() {
        let d3 = RotationSystem::from_one_based_digits("1:2543 2:1435 3:1542 4:1532 5:1243").unwrap();
        let s = CrossingSummary::of(&d3).unwrap();
        assert_eq!(s.crossing_count, 3);
        assert_eq!(s.noncrossing_k4_density, ratio(2, 5));
        assert_eq!(s.hill_value, 1);
        assert_eq!(s.ratio_to_hill, Some(ratio(3, 1)));
        let k4 = CrossingSummary::of(&crossing_k4()).unwrap();
        assert_eq!((k4.crossing_count, k4.hill_value, k4.ratio_to_hill), (1, 0, None));
    }

    #[test]
    fn hill_values() {
        assert_eq!(hill_number(3).unwrap(), 0);
        assert_eq!(hill_number(5).unwrap(), 1);
        assert_eq!(hill_number(6).unwrap(), 3);
        assert_eq!(hill_number(7).unwrap(), 9);
        assert_eq!(hill_number(8).unwrap(), 18);
        assert_eq!(hill_number(13).unwrap(), 225);
        assert!(hill_number(2).is_err());
    }

    #[test]
    fn zarankiewicz_values() {
        assert_eq!(zarankiewicz(5, 5).unwrap(), 16);
        assert_eq!(zarankiewicz(5, 4).unwrap(), 8);
        assert_eq!(zarankiewicz(3, 3).unwrap(), 1);
        assert!(zarankiewicz(0, 3).is_err());
    }

    #[test]
    fn counting_lifts() {
        assert_eq!(counting_lift(11, 100, 13).unwrap(), BigInt::from(217));
        assert_eq!(counting_lift(9, 36, 9).unwrap(), BigInt::from(36));
        assert_eq!(counting_lift_coefficient(13, 223).unwrap(), ratio(223, 17160));
        for n in 13..40u64 {
            let exact = Rational::from_integer(BigInt::from(n * (n - 1) * (n - 2) * (n - 3)))
                * ratio(223, 17160);
            assert_eq!(counting_lift(13, 223, n).unwrap(), exact.ceil().to_integer());
        }
        assert!(counting_lift(13, 223, 12).is_err());
    }

    #[test]
    fn hill_ratios() {
        assert_eq!(density_to_hill_ratio(&ratio(5, 8)).unwrap(), ratio(1, 1));
        assert_eq!(density_to_hill_ratio(&ratio(26, 35)).unwrap(), ratio(24, 35));
        let a = parse_rational("22064013752809590266065131421016/35000000000000000000000000000000").unwrap();
        assert!(density_to_hill_ratio(&a).unwrap() > ratio(98_559_895, 100_000_000));
        assert!(density_to_hill_ratio(&ratio(-1, 2)).is_err());
        assert!(density_to_hill_ratio(&ratio(3, 2)).is_err());
    }
}
