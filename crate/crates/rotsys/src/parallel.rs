//! Rayon drivers for the expensive loops. Results are merged in catalog
//! order, so the output never depends on the thread count.

use std::collections::HashMap;

use rayon::prelude::*;
use rotsys_core::catalog::{extend_entry, seed_catalog, Labeled5Lookup};
use rotsys_core::certificate::{check_compatible, conclude, Certificate, Multipliers, VerifiedBound};
use rotsys_core::pair_density::{pair_density_matrices, PairDensityMatrix};
use rotsys_core::{Catalog, Class, FlagBasis, Rational, Result, RotationSystem, SdpProblem, TypeConfig};

/// The complete catalog on one more vertex.
pub fn extend(cat: &Catalog) -> Result<Catalog> {
    cat.check_extendable()?;
    let lookup = Labeled5Lookup::for_class(cat.class())?;
    let parts: Vec<_> = cat
        .systems()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|r| extend_entry(r, &lookup))
        .collect();
    let mut merged = HashMap::new();
    for (key, rep) in parts.into_iter().flatten() {
        merged.entry(key).or_insert(rep);
    }
    Ok(Catalog::from_canonical_entries(cat.class(), cat.n() + 1, merged.into_iter().collect()))
}

/// The complete catalog of `class` on `n` vertices, built from the seed.
pub fn catalog(class: Class, n: usize) -> Result<Catalog> {
    if n <= 5 {
        return rotsys_core::catalog::base_catalog(class, n);
    }
    let mut cat = seed_catalog(class)?;
    while cat.n() < n {
        cat = extend(&cat)?;
    }
    Ok(cat)
}

/// Pair-density blocks of every target, in catalog order.
pub fn pair_densities(cat: &Catalog, bases: &[FlagBasis]) -> Result<Vec<Vec<PairDensityMatrix>>> {
    let systems: Vec<&RotationSystem> = cat.systems().collect();
    systems.par_iter().map(|r| pair_density_matrices(bases, r)).collect()
}

pub fn objective(cat: &Catalog) -> Vec<Rational> {
    let n4 = rotsys_core::crossing::planar_k4();
    let systems: Vec<&RotationSystem> = cat.systems().collect();
    systems.par_iter().map(|r| rotsys_core::density(&n4, r)).collect()
}

/// Assembles the problem with the pair densities computed in parallel.
pub fn assemble(cat: &Catalog, config: &TypeConfig, bases: Vec<FlagBasis>) -> Result<SdpProblem> {
    let blocks = pair_densities(cat, &bases)?;
    SdpProblem::from_parts(cat, config.clone(), bases, objective(cat), blocks)
}

/// Exact verification with the per-target values computed in parallel.
pub fn verify(cert: &Certificate, problem: &SdpProblem) -> Result<VerifiedBound> {
    check_compatible(cert, problem)?;
    let mult = Multipliers::new(&cert.factors);
    let values: Vec<Rational> = (0..problem.len())
        .into_par_iter()
        .map(|r| mult.value(problem, r))
        .collect();
    conclude(&values, &cert.bound)
}

/// Per-target values `p(N4, R) + c_R`, in catalog order.
pub fn target_values(cert: &Certificate, problem: &SdpProblem) -> Result<Vec<Rational>> {
    check_compatible(cert, problem)?;
    let mult = Multipliers::new(&cert.factors);
    Ok((0..problem.len())
        .into_par_iter()
        .map(|r| mult.value(problem, r))
        .collect())
}
