//! The semidefinite program over a target catalog.
//!
//! For every target `R` the program has one constraint
//! `b_R + Σ_i <M_i, Q_iR> <= A`, where `b_R = p(N4, R)` and `Q_iR` is the
//! pair-density matrix of type `i`. Any PSD `M_i` then give `A` as an upper
//! bound on the limit density of non-crossing `K4`s.

use alloc::vec::Vec;

use crate::catalog::{Catalog, Class};
use crate::crossing::planar_k4;
use crate::density::density;
use crate::error::{Error, Result};
use crate::flag::{FlagBasis, TypeConfig};
use crate::pair_density::{pair_density_matrices, PairDensityMatrix};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct SdpProblem {
    class: Class,
    n: usize,
    config: TypeConfig,
    bases: Vec<FlagBasis>,
    objective: Vec<Rational>,
    blocks: Vec<Vec<PairDensityMatrix>>,
}

/// `p(N4, R)` for every entry of the catalog.
pub fn objective_vector(cat: &Catalog) -> Vec<Rational> {
    let n4 = planar_k4();
    cat.systems().map(|r| density(&n4, r)).collect()
}

/// Checks that `bases[i]` is the basis of `config.types[i]` over `class`.
pub fn check_bases(config: &TypeConfig, class: Class, bases: &[FlagBasis]) -> Result<()> {
    if bases.len() != config.types.len() {
        return Err(Error::Dimension(alloc::format!(
            "{} flag bases for {} types",
            bases.len(),
            config.types.len()
        )));
    }
    for (i, (b, t)) in bases.iter().zip(&config.types).enumerate() {
        if b.spec() != t || b.class() != class {
            return Err(Error::Dimension(alloc::format!("flag basis {i} does not match its type")));
        }
    }
    Ok(())
}

impl SdpProblem {
    /// Computes every pair-density matrix sequentially.
    pub fn assemble(cat: &Catalog, config: &TypeConfig, bases: Vec<FlagBasis>) -> Result<Self> {
        let blocks = cat
            .systems()
            .map(|r| pair_density_matrices(&bases, r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(cat, config.clone(), bases, objective_vector(cat), blocks)
    }

    /// Builds a problem from precomputed parts, checking their shapes.
    pub fn from_parts(
        cat: &Catalog,
        config: TypeConfig,
        bases: Vec<FlagBasis>,
        objective: Vec<Rational>,
        blocks: Vec<Vec<PairDensityMatrix>>,
    ) -> Result<Self> {
        check_bases(&config, cat.class(), &bases)?;
        if config.required_size() > cat.n() {
            return Err(Error::domain(alloc::format!(
                "the configuration needs targets on at least {} vertices",
                config.required_size()
            )));
        }
        if objective.len() != cat.len() || blocks.len() != cat.len() {
            return Err(Error::Dimension("one objective value and one block list per target".into()));
        }
        for row in &blocks {
            if row.len() != bases.len() || row.iter().zip(&bases).any(|(q, b)| q.dim() != b.len()) {
                return Err(Error::Dimension("pair-density block has the wrong shape".into()));
            }
        }
        Ok(SdpProblem {
            class: cat.class(),
            n: cat.n(),
            config,
            bases,
            objective,
            blocks,
        })
    }

    pub fn class(&self) -> Class {
        self.class
    }

    /// Size of the target systems.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn config(&self) -> &TypeConfig {
        &self.config
    }

    pub fn bases(&self) -> &[FlagBasis] {
        &self.bases
    }

    /// Number of targets (constraints).
    pub fn len(&self) -> usize {
        self.objective.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objective.is_empty()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    /// Pair-density matrices of target `r`, one per type.
    pub fn blocks(&self, r: usize) -> &[PairDensityMatrix] {
        &self.blocks[r]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(FlagBasis::len).collect()
    }

    pub fn flag_count(&self) -> usize {
        self.dims().iter().sum()
    }

    /// Free entries of the symmetric `M_i`: `Σ d(d+1)/2`.
    pub fn variable_count(&self) -> usize {
        self.dims().iter().map(|d| d * (d + 1) / 2).sum()
    }

    /// Strictly off-diagonal free entries: `Σ d(d-1)/2`.
    pub fn off_diagonal_count(&self) -> usize {
        self.dims().iter().map(|d| d * (d - 1) / 2).sum()
    }

    /// The bound certified by `M_i = 0`: `max_R p(N4, R)`.
    pub fn trivial_bound(&self) -> Rational {
        self.objective.iter().max().cloned().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::base_catalog;
    use crate::flag::{enumerate_bases, TypeSpec};
    use crate::rational::ratio;
    use crate::rotation::RotationSystem;

    #[test]
    fn small_problem_shapes() {
        let class = Class::Realizable;
        let cat = base_catalog(class, 5).unwrap();
        let config = TypeConfig {
            types: alloc::vec![TypeSpec::new(RotationSystem::increasing(1).unwrap(), 3).unwrap()],
        };
        let bases = enumerate_bases(&config, class, |l| base_catalog(class, l)).unwrap();
        let p = SdpProblem::assemble(&cat, &config, bases).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.dims(), alloc::vec![1]);
        assert_eq!(p.variable_count(), 1);
        assert_eq!(p.off_diagonal_count(), 0);
        // The convex-position K5 has no planar K4; D1 has four of five.
        assert_eq!(p.trivial_bound(), ratio(4, 5));
        for r in 0..p.len() {
            assert_eq!(p.blocks(r)[0].total(), ratio(1, 1));
        }
    }

    #[test]
    fn mismatched_parts_are_rejected() {
        let class = Class::Convex;
        let cat = base_catalog(class, 5).unwrap();
        let config = TypeConfig::reduced();
        let bases = enumerate_bases(&config, class, |l| base_catalog(class, l)).unwrap();
        // Reduced types need targets on 7 vertices.
        assert!(SdpProblem::assemble(&cat, &config, bases.clone()).is_err());
        assert!(check_bases(&config, Class::Realizable, &bases).is_err());
        assert!(check_bases(&config, class, &bases[..1]).is_err());
    }
}
