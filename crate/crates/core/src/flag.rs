//! Types, flags and flag bases.
//!
//! A type `σ` is a fully labeled rotation system on `0..k`. A `σ`-flag of
//! size `ℓ` is a system on `ℓ` vertices together with a label-preserving
//! embedding of `σ`. Flags are stored with the roots moved to `0..k`, and two
//! flags are the same when they differ by a relabeling that fixes every root.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use itertools::Itertools;

use crate::canon::{labeled_code, rooted_canonical, rooted_relabelings};
use crate::catalog::{base_catalog, seed_catalog, Catalog, Class};
use crate::error::{Error, Result};
use crate::rotation::{RotationSystem, Vertex};

/// One type together with the size of its flags.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeSpec {
    pub sigma: RotationSystem,
    pub flag_size: usize,
}

impl TypeSpec {
    pub fn new(sigma: RotationSystem, flag_size: usize) -> Result<Self> {
        if flag_size < sigma.n() {
            return Err(Error::domain("flags cannot be smaller than their type"));
        }
        Ok(TypeSpec { sigma, flag_size })
    }

    pub fn roots(&self) -> usize {
        self.sigma.n()
    }

    /// Size of the smallest system on which two flags of this spec fit
    /// side by side: `2ℓ - k`.
    pub fn product_size(&self) -> usize {
        2 * self.flag_size - self.roots()
    }
}

impl fmt::Display for TypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.sigma, self.flag_size)
    }
}

/// The list of types of one semidefinite program.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeConfig {
    pub types: Vec<TypeSpec>,
}

impl TypeConfig {
    /// One labeled vertex with flags on 4 vertices and three labeled vertices
    /// with flags on 5 vertices.
    pub fn reduced() -> Self {
        TypeConfig {
            types: alloc::vec![
                TypeSpec {
                    sigma: RotationSystem::increasing(1).expect("one vertex"),
                    flag_size: 4,
                },
                TypeSpec {
                    sigma: RotationSystem::increasing(3).expect("three vertices"),
                    flag_size: 5,
                },
            ],
        }
    }

    /// The reduced configuration plus every labeled 5-vertex system of the
    /// class seed, each with flags on 6 vertices (8 types for realizable,
    /// 5 for convex).
    pub fn full(class: Class) -> Result<Self> {
        let mut cfg = Self::reduced();
        for r in seed_catalog(class)?.systems() {
            cfg.types.push(TypeSpec {
                sigma: *r,
                flag_size: 6,
            });
        }
        Ok(cfg)
    }

    /// Resolves `reduced`, `full`, or an explicit descriptor.
    pub fn named(name: &str, class: Class) -> Result<Self> {
        match name {
            "reduced" => Ok(Self::reduced()),
            "full" => Self::full(class),
            other => Self::parse_descriptor(other),
        }
    }

    /// Space-separated `<type line>@<flag size>` items.
    pub fn descriptor(&self) -> String {
        self.types.iter().map(|t| alloc::format!("{t}")).join(" ")
    }

    pub fn parse_descriptor(s: &str) -> Result<Self> {
        let types = s
            .split_whitespace()
            .map(|item| {
                let (line, size) = item
                    .rsplit_once('@')
                    .ok_or_else(|| Error::parse(alloc::format!("type `{item}` lacks `@<size>`")))?;
                let size: usize = size
                    .parse()
                    .map_err(|_| Error::parse(alloc::format!("bad flag size in `{item}`")))?;
                TypeSpec::new(RotationSystem::parse_line(line)?, size)
            })
            .collect::<Result<Vec<_>>>()?;
        if types.is_empty() {
            return Err(Error::parse("empty type configuration"));
        }
        Ok(TypeConfig { types })
    }

    /// Largest `2ℓ - k` over the types: the target catalog must be at least this big.
    pub fn required_size(&self) -> usize {
        self.types.iter().map(TypeSpec::product_size).max().unwrap_or(0)
    }
}

/// A flag with its roots on vertices `0..roots`, in rooted canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Flag {
    system: RotationSystem,
    roots: usize,
}

impl Flag {
    /// Builds a flag from a system and the root image `theta[i]` of type
    /// vertex `i`.
    pub fn from_embedding(base: &RotationSystem, theta: &[Vertex]) -> Result<Self> {
        let n = base.n();
        let mut used = [false; crate::rotation::MAX_VERTICES];
        for &t in theta {
            if t as usize >= n || used[t as usize] {
                return Err(Error::domain("root map is not injective into the base"));
            }
            used[t as usize] = true;
        }
        let mut order: Vec<Vertex> = theta.to_vec();
        order.extend((0..n as Vertex).filter(|v| !used[*v as usize]));
        let relabeled = base.induced_ordered(&order);
        let (_, system) = rooted_canonical(&relabeled, theta.len());
        Ok(Flag {
            system,
            roots: theta.len(),
        })
    }

    pub fn system(&self) -> &RotationSystem {
        &self.system
    }

    pub fn roots(&self) -> usize {
        self.roots
    }

    /// The induced labeled type.
    pub fn root_type(&self) -> RotationSystem {
        let roots: Vec<Vertex> = (0..self.roots as Vertex).collect();
        self.system.induced_ordered(&roots)
    }

    /// `base|r0,r1,...` with the roots at `0..k`.
    pub fn to_line(&self) -> String {
        let roots = (0..self.roots).map(|r| alloc::format!("{r}")).join(",");
        alloc::format!("{}|{}", self.system, roots)
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let (base, roots) = line
            .trim_end()
            .split_once('|')
            .ok_or_else(|| Error::parse("flag line lacks `|`"))?;
        let base = RotationSystem::parse_line(base)?;
        let theta = if roots.is_empty() {
            Vec::new()
        } else {
            roots
                .split(',')
                .map(|t| t.parse::<Vertex>().map_err(|_| Error::parse(alloc::format!("bad root `{t}`"))))
                .collect::<Result<Vec<_>>>()?
        };
        Self::from_embedding(&base, &theta)
    }
}

/// All `σ`-flags of one size over a class, in a fixed order, with a lookup
/// from labeled systems (roots first) to flag indices.
#[derive(Clone, Debug)]
pub struct FlagBasis {
    class: Class,
    spec: TypeSpec,
    flags: Vec<Flag>,
    index: HashMap<u128, u32>,
}

impl FlagBasis {
    /// Every root-canonical flag whose base lies in `cat` (the complete class
    /// catalog on `spec.flag_size` vertices), ordered by rooted code.
    pub fn enumerate(spec: &TypeSpec, cat: &Catalog) -> Result<Self> {
        let k = spec.roots();
        let l = spec.flag_size;
        if cat.n() != l {
            return Err(Error::domain(alloc::format!(
                "flags of size {l} need the size-{l} catalog, got size {}",
                cat.n()
            )));
        }
        if k <= 5 && !base_catalog(cat.class(), k)?.contains(&spec.sigma) {
            return Err(Error::domain(alloc::format!(
                "type {} is not a {} system",
                spec.sigma,
                cat.class()
            )));
        }
        let mut found: HashMap<u128, RotationSystem> = HashMap::new();
        for base in cat.systems() {
            for theta in (0..l as Vertex).permutations(k) {
                if base.induced_ordered(&theta) != spec.sigma {
                    continue;
                }
                let mut order = theta.clone();
                order.extend((0..l as Vertex).filter(|v| !theta.contains(v)));
                let (code, rep) = rooted_canonical(&base.induced_ordered(&order), k);
                found.entry(code).or_insert(rep);
            }
        }
        let mut flags: Vec<(u128, RotationSystem)> = found.into_iter().collect();
        flags.sort_unstable_by_key(|(c, _)| *c);
        let flags: Vec<Flag> = flags
            .into_iter()
            .map(|(_, system)| Flag { system, roots: k })
            .collect();
        Ok(Self::with_flags(cat.class(), spec.clone(), flags))
    }

    /// Rebuilds a basis from an explicit flag list (e.g. read from a file).
    pub fn from_flags(class: Class, spec: TypeSpec, flags: Vec<Flag>) -> Result<Self> {
        for f in &flags {
            if f.roots != spec.roots() || f.system.n() != spec.flag_size || f.root_type() != spec.sigma {
                return Err(Error::domain(alloc::format!(
                    "flag {} does not match type {spec}",
                    f.to_line()
                )));
            }
        }
        let basis = Self::with_flags(class, spec, flags);
        if basis.index.values().copied().collect::<hashbrown::HashSet<_>>().len() != basis.flags.len() {
            return Err(Error::domain("flag list contains duplicates"));
        }
        Ok(basis)
    }

    fn with_flags(class: Class, spec: TypeSpec, flags: Vec<Flag>) -> Self {
        let k = spec.roots();
        let mut index = HashMap::new();
        for (i, f) in flags.iter().enumerate() {
            for r in rooted_relabelings(&f.system, k) {
                index.insert(labeled_code(&r), i as u32);
            }
        }
        FlagBasis {
            class,
            spec,
            flags,
            index,
        }
    }

    pub fn class(&self) -> Class {
        self.class
    }

    pub fn spec(&self) -> &TypeSpec {
        &self.spec
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    /// Index of the flag equal to `system` with roots at `0..k`.
    #[inline]
    pub fn index_of_labeled(&self, system: &RotationSystem) -> Option<usize> {
        self.index.get(&labeled_code(system)).map(|&i| i as usize)
    }
}

/// Flag bases for every type of `config`, taking the needed small catalogs
/// from `catalog_of_size`.
pub fn enumerate_bases(
    config: &TypeConfig,
    class: Class,
    mut catalog_of_size: impl FnMut(usize) -> Result<Catalog>,
) -> Result<Vec<FlagBasis>> {
    let mut cache: HashMap<usize, Catalog> = HashMap::new();
    config
        .types
        .iter()
        .map(|spec| {
            let l = spec.flag_size;
            if !cache.contains_key(&l) {
                let cat = catalog_of_size(l)?;
                if cat.class() != class || cat.n() != l {
                    return Err(Error::domain("catalog provider returned the wrong catalog"));
                }
                cache.insert(l, cat);
            }
            FlagBasis::enumerate(spec, &cache[&l])
        })
        .collect()
}
