//! Summary statistics of a catalog.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rotsys_core::crossing::crossing_count;
use rotsys_core::rational::{format_rational, to_decimal_truncated};
use rotsys_core::{Catalog, Class, Rational, Result, RotationSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogStats {
    pub class: Class,
    pub n: usize,
    pub count: usize,
    pub equivalence_classes: usize,
    /// Crossing count to number of systems.
    pub crossings: BTreeMap<u64, usize>,
    pub min_density: Rational,
    pub max_density: Rational,
}

impl CatalogStats {
    pub fn of(cat: &Catalog) -> Result<Self> {
        if cat.n() < 4 || cat.is_empty() {
            return Err(rotsys_core::Error::Domain("statistics need a nonempty catalog on at least 4 vertices".into()));
        }
        let systems: Vec<&RotationSystem> = cat.systems().collect();
        let counts = systems.par_iter().map(|r| crossing_count(r)).collect::<Result<Vec<_>>>()?;
        let mut crossings = BTreeMap::new();
        for c in &counts {
            *crossings.entry(*c).or_insert(0) += 1;
        }
        // d(N4, R) = 1 - cr(R)/C(n,4), so the extremes follow from the counts.
        let total = rotsys_core::combinatorics::binomial(cat.n() as u64, 4);
        let density = |c: u64| Rational::new((total - c).into(), total.into());
        let (lo, hi) = (*crossings.keys().next().unwrap(), *crossings.keys().last().unwrap());
        Ok(CatalogStats {
            class: cat.class(),
            n: cat.n(),
            count: cat.len(),
            equivalence_classes: cat.equivalence_class_count(),
            crossings,
            min_density: density(hi),
            max_density: density(lo),
        })
    }

    pub fn min_crossings(&self) -> u64 {
        *self.crossings.keys().next().expect("nonempty")
    }
}

impl fmt::Display for CatalogStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "class: {}", self.class)?;
        writeln!(f, "vertices: {}", self.n)?;
        writeln!(f, "count: {}", self.count)?;
        writeln!(f, "equivalence classes: {}", self.equivalence_classes)?;
        writeln!(f, "crossings:")?;
        for (c, k) in &self.crossings {
            writeln!(f, "  {c:>3}: {k}")?;
        }
        writeln!(
            f,
            "min density(N4): {} ({})",
            format_rational(&self.min_density),
            to_decimal_truncated(&self.min_density, 9)
        )?;
        write!(
            f,
            "max density(N4): {} ({})",
            format_rational(&self.max_density),
            to_decimal_truncated(&self.max_density, 9)
        )
    }
}
