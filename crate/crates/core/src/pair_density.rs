//! Exact flag-pair densities `p(F_a, F_b; R)`.
//!
//! For a target `R` on `n` vertices, a flag basis of type `σ` (`k` roots) and
//! flags of size `ℓ = k + m`, the entry `(a, b)` is the probability that a
//! uniformly random injection `θ : [k] → V(R)` together with disjoint random
//! `m`-sets `X, Y` of the remaining vertices gives `(R, θ)|X ≅ F_a` and
//! `(R, θ)|Y ≅ F_b`. Injections not inducing `σ` contribute nothing.
//!
//! Matrices are symmetric; only `a <= b` is stored, as integer counts over a
//! shared denominator `n!/(n-k)! * C(n-k, m) * C(n-k-m, m)`.

use alloc::vec::Vec;

use hashbrown::HashMap;
use itertools::Itertools;
use num_bigint::BigInt;

use crate::canon::labeled_code;
use crate::combinatorics::{binomial, falling};
use crate::error::{Error, Result};
use crate::flag::FlagBasis;
use crate::rational::Rational;
use crate::rotation::{RotationSystem, Vertex, MAX_VERTICES};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDensityMatrix {
    dim: usize,
    denominator: u64,
    /// `(a, b, count)` with `a <= b`, sorted, zero counts omitted.
    entries: Vec<(u32, u32, u64)>,
}

impl PairDensityMatrix {
    pub fn from_entries(dim: usize, denominator: u64, mut entries: Vec<(u32, u32, u64)>) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Dimension("zero denominator".into()));
        }
        entries.retain(|e| e.2 != 0);
        entries.sort_unstable();
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::Dimension("repeated matrix entry".into()));
            }
        }
        if entries.iter().any(|&(a, b, _)| a > b || b as usize >= dim) {
            return Err(Error::Dimension("entry outside the upper triangle".into()));
        }
        Ok(PairDensityMatrix {
            dim,
            denominator,
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn entries(&self) -> &[(u32, u32, u64)] {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> Rational {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let count = self
            .entries
            .binary_search_by(|e| (e.0 as usize, e.1 as usize).cmp(&(a, b)))
            .map(|i| self.entries[i].2)
            .unwrap_or(0);
        Rational::new(BigInt::from(count), BigInt::from(self.denominator))
    }

    /// Sum over all `dim²` entries of the symmetric matrix.
    pub fn total(&self) -> Rational {
        let num: u64 = self
            .entries
            .iter()
            .map(|&(a, b, c)| if a == b { c } else { 2 * c })
            .sum();
        Rational::new(BigInt::from(num), BigInt::from(self.denominator))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = alloc::vec![alloc::vec![Rational::from_integer(BigInt::from(0)); self.dim]; self.dim];
        for &(a, b, _) in &self.entries {
            let v = self.get(a as usize, b as usize);
            out[b as usize][a as usize] = v.clone();
            out[a as usize][b as usize] = v;
        }
        out
    }
}

/// Pair-density matrix of one basis over one target.
pub fn pair_density_matrix(basis: &FlagBasis, r: &RotationSystem) -> Result<PairDensityMatrix> {
    let mut out = pair_density_matrices(core::slice::from_ref(basis), r)?;
    Ok(out.pop().expect("one basis"))
}

/// Pair-density matrices of several bases over one target, sharing the
/// enumeration of root injections between bases with the same root count.
pub fn pair_density_matrices(bases: &[FlagBasis], r: &RotationSystem) -> Result<Vec<PairDensityMatrix>> {
    let n = r.n();
    for b in bases {
        let spec = b.spec();
        if spec.product_size() > n {
            return Err(Error::domain(alloc::format!(
                "flags of size {} with {} roots do not fit twice in {n} vertices",
                spec.flag_size,
                spec.roots()
            )));
        }
    }
    let mut counts: Vec<Vec<(u32, u32, u64)>> = alloc::vec![Vec::new(); bases.len()];
    let mut by_roots: HashMap<usize, HashMap<u128, Vec<usize>>> = HashMap::new();
    for (i, b) in bases.iter().enumerate() {
        by_roots
            .entry(b.spec().roots())
            .or_default()
            .entry(labeled_code(&b.spec().sigma))
            .or_default()
            .push(i);
    }
    let mut by_roots: Vec<_> = by_roots.into_iter().collect();
    by_roots.sort_unstable_by_key(|(k, _)| *k);

    let mut order = [0 as Vertex; MAX_VERTICES];
    for (k, types) in by_roots {
        for theta in (0..n as Vertex).permutations(k) {
            let Some(hits) = types.get(&labeled_code(&r.induced_ordered(&theta))) else {
                continue;
            };
            let rest: Vec<Vertex> = (0..n as Vertex).filter(|v| !theta.contains(v)).collect();
            order[..k].copy_from_slice(&theta);
            for &bi in hits {
                let basis = &bases[bi];
                let m = basis.spec().flag_size - k;
                let mut sides: Vec<(u32, u16)> = Vec::new();
                for x in rest.iter().copied().combinations(m) {
                    order[k..k + m].copy_from_slice(&x);
                    let f = basis
                        .index_of_labeled(&r.induced_ordered(&order[..k + m]))
                        .ok_or_else(|| Error::domain("target has a subsystem outside the flag basis class"))?;
                    let mask = x.iter().fold(0u16, |acc, &v| acc | (1 << v));
                    sides.push((f as u32, mask));
                }
                if m == 0 {
                    counts[bi].push((sides[0].0, sides[0].0, 1));
                    continue;
                }
                // Each unordered {X, Y} stands for (X, Y) and (Y, X): 2 on the
                // diagonal, 1 in the stored upper triangle otherwise.
                for (i, &(fx, mx)) in sides.iter().enumerate() {
                    for &(fy, my) in &sides[i + 1..] {
                        if mx & my == 0 {
                            let w = if fx == fy { 2 } else { 1 };
                            counts[bi].push((fx.min(fy), fx.max(fy), w));
                        }
                    }
                }
            }
        }
    }

    bases
        .iter()
        .zip(counts)
        .map(|(basis, mut pairs)| {
            let k = basis.spec().roots() as u64;
            let m = basis.spec().flag_size as u64 - k;
            let n = n as u64;
            let denominator = falling(n, k) * binomial(n - k, m) * binomial(n - k - m, m);
            pairs.sort_unstable();
            let entries = pairs
                .into_iter()
                .chunk_by(|&(a, b, _)| (a, b))
                .into_iter()
                .map(|((a, b), group)| (a, b, group.map(|e| e.2).sum()))
                .collect();
            PairDensityMatrix::from_entries(basis.len(), denominator, entries)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{base_catalog, Class};
    use crate::flag::TypeSpec;

    fn basis(k: usize, l: usize) -> FlagBasis {
        let spec = TypeSpec::new(RotationSystem::increasing(k).unwrap(), l).unwrap();
        FlagBasis::enumerate(&spec, &base_catalog(Class::Realizable, l).unwrap()).unwrap()
    }

    #[test]
    fn trivial_flags_give_all_ones() {
        // One root, flags of size 1: the only pair is (root-only, root-only).
        let b = basis(1, 1);
        let r = RotationSystem::increasing(3).unwrap();
        let q = pair_density_matrix(&b, &r).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.get(0, 0), Rational::from_integer(1.into()));
    }

    #[test]
    fn flags_that_do_not_occur_give_zero() {
        let b = basis(1, 4);
        let planar = crate::crossing::planar_k4();
        let idx_planar = b
            .flags()
            .iter()
            .position(|f| crate::canon::is_isomorphic(f.system(), &planar))
            .unwrap();
        // Seven points in convex position: every K4 crosses.
        let q = pair_density_matrix(&b, &RotationSystem::increasing(7).unwrap()).unwrap();
        assert!(!q.entries().is_empty());
        assert!(q.entries().iter().all(|&(a, c, _)| a as usize != idx_planar && c as usize != idx_planar));
    }

    #[test]
    fn too_small_target_is_rejected() {
        let b = basis(3, 5);
        assert!(pair_density_matrix(&b, &RotationSystem::increasing(6).unwrap()).is_err());
    }

    #[test]
    fn from_entries_validates() {
        assert!(PairDensityMatrix::from_entries(2, 0, alloc::vec![]).is_err());
        assert!(PairDensityMatrix::from_entries(2, 1, alloc::vec![(1, 0, 1)]).is_err());
        assert!(PairDensityMatrix::from_entries(2, 1, alloc::vec![(0, 2, 1)]).is_err());
        assert!(PairDensityMatrix::from_entries(2, 1, alloc::vec![(0, 1, 1), (0, 1, 2)]).is_err());
        let q = PairDensityMatrix::from_entries(2, 4, alloc::vec![(0, 1, 1), (0, 0, 0)]).unwrap();
        assert_eq!(q.entries().len(), 1);
        assert_eq!(q.total(), Rational::new(1.into(), 2.into()));
    }
}
