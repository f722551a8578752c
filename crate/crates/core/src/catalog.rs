//! Complete catalogs of realizable and convex rotation systems.
//!
//! A rotation system on at least five vertices is realizable exactly when all
//! of its 5-vertex subsystems are; convex systems are those whose 5-vertex
//! subsystems are all rectilinear. Catalogs therefore grow one vertex at a
//! time from the 5-vertex seeds: every extension of every representative is
//! tried, filtered through the seed's labeled 5-vertex lookup, canonicalized
//! and deduplicated.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;
use itertools::Itertools;

use crate::canon::{
    canonical_form, canonical_representative, pack5, unpack5, CanonicalKey, PACK5_SIZE,
};
use crate::crossing::{crossing_count, crossing_k4, planar_k4};
use crate::error::{Error, Result};
use crate::rotation::{RotationSystem, Vertex, MAX_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Realizable,
    Convex,
}

impl Class {
    pub fn as_str(&self) -> &'static str {
        match self {
            Class::Realizable => "realizable",
            Class::Convex => "convex",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Class {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "realizable" => Ok(Class::Realizable),
            "convex" => Ok(Class::Convex),
            other => Err(Error::parse(alloc::format!("unknown class `{other}`"))),
        }
    }
}

// Rotation systems of the six drawings of K5 up to orientation-preserving
// homeomorphism, 0-based line format. The first three are the rectilinear
// drawings; the fourth is given in the labeling of the 3-crossing example
// drawing. The last two are mirror images of each other.
const RECTILINEAR_ONE_CROSSING: &str = "0:1,2,3,4;1:0,3,4,2;2:0,1,4,3;3:0,2,4,1;4:0,3,2,1";
const RECTILINEAR_CONVEX_POSITION: &str = "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,1,2,4;4:0,1,2,3";
const RECTILINEAR_THREE_CROSSINGS: &str = "0:1,4,3,2;1:0,3,2,4;2:0,4,3,1;3:0,4,2,1;4:0,1,3,2";
const NONCONVEX_THREE_CROSSINGS: &str = "0:1,2,3,4;1:0,2,4,3;2:0,1,3,4;3:0,1,4,2;4:0,3,1,2";
const NONCONVEX_FIVE_CROSSINGS: &str = "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,1,4,2;4:0,1,3,2";
const NONCONVEX_FIVE_CROSSINGS_MIRROR: &str = "0:1,2,3,4;1:0,2,3,4;2:0,1,3,4;3:0,4,1,2;4:0,3,1,2";

const CONVEX_SEED: [&str; 3] = [
    RECTILINEAR_ONE_CROSSING,
    RECTILINEAR_CONVEX_POSITION,
    RECTILINEAR_THREE_CROSSINGS,
];

const REALIZABLE_SEED: [&str; 6] = [
    RECTILINEAR_ONE_CROSSING,
    RECTILINEAR_CONVEX_POSITION,
    RECTILINEAR_THREE_CROSSINGS,
    NONCONVEX_THREE_CROSSINGS,
    NONCONVEX_FIVE_CROSSINGS,
    NONCONVEX_FIVE_CROSSINGS_MIRROR,
];

/// A complete, duplicate-free set of canonical representatives of one size
/// and class, sorted by canonical key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    class: Class,
    n: usize,
    entries: Vec<(CanonicalKey, RotationSystem)>,
}

impl Catalog {
    /// Canonicalizes, deduplicates and sorts `systems`. All must have `n` vertices.
    pub fn from_systems(
        class: Class,
        n: usize,
        systems: impl IntoIterator<Item = RotationSystem>,
    ) -> Result<Self> {
        let mut map: HashMap<CanonicalKey, RotationSystem> = HashMap::new();
        for r in systems {
            if r.n() != n {
                return Err(Error::domain(alloc::format!(
                    "catalog of size {n} given a {}-vertex system",
                    r.n()
                )));
            }
            let (key, rep) = canonical_representative(&r);
            map.entry(key).or_insert(rep);
        }
        Ok(Self::from_map(class, n, map))
    }

    pub(crate) fn from_map(
        class: Class,
        n: usize,
        map: HashMap<CanonicalKey, RotationSystem>,
    ) -> Self {
        let mut entries: Vec<_> = map.into_iter().collect();
        entries.sort_unstable_by_key(|(k, _)| *k);
        Catalog { class, n, entries }
    }

    /// Builds a catalog from already merged canonical entries (any order).
    pub fn from_canonical_entries(
        class: Class,
        n: usize,
        mut entries: Vec<(CanonicalKey, RotationSystem)>,
    ) -> Self {
        entries.sort_unstable_by_key(|(k, _)| *k);
        entries.dedup_by_key(|(k, _)| *k);
        Catalog { class, n, entries }
    }

    pub fn class(&self) -> Class {
        self.class
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(CanonicalKey, RotationSystem)] {
        &self.entries
    }

    pub fn systems(&self) -> impl ExactSizeIterator<Item = &RotationSystem> + '_ {
        self.entries.iter().map(|(_, r)| r)
    }

    pub fn get(&self, index: usize) -> Option<&RotationSystem> {
        self.entries.get(index).map(|(_, r)| r)
    }

    pub fn index_of_key(&self, key: &CanonicalKey) -> Option<usize> {
        self.entries.binary_search_by_key(key, |(k, _)| *k).ok()
    }

    /// Position of the isomorphism class of `r`, if present.
    pub fn index_of(&self, r: &RotationSystem) -> Option<usize> {
        if r.n() != self.n {
            return None;
        }
        self.index_of_key(&canonical_form(r))
    }

    pub fn contains(&self, r: &RotationSystem) -> bool {
        self.index_of(r).is_some()
    }

    /// Whether every `(n-1)`-subsystem of every entry lies in `smaller`.
    pub fn is_hereditary_over(&self, smaller: &Catalog) -> bool {
        smaller.n + 1 == self.n
            && self.systems().all(|r| {
                (0..self.n as Vertex)
                    .combinations(self.n - 1)
                    .all(|s| smaller.contains(&r.induced_ordered(&s)))
            })
    }

    /// The complete catalog on `n + 1` vertices (sequential driver).
    pub fn extend(&self) -> Result<Catalog> {
        let lookup = Labeled5Lookup::for_class(self.class)?;
        self.check_extendable()?;
        let mut merged: HashMap<CanonicalKey, RotationSystem> = HashMap::new();
        for r in self.systems() {
            for (k, rep) in extend_entry(r, &lookup) {
                merged.entry(k).or_insert(rep);
            }
        }
        Ok(Self::from_map(self.class, self.n + 1, merged))
    }

    pub fn check_extendable(&self) -> Result<()> {
        if self.n < 5 {
            return Err(Error::domain("extension starts from the 5-vertex seed"));
        }
        if self.n + 1 > MAX_VERTICES {
            return Err(Error::domain(alloc::format!(
                "systems above {MAX_VERTICES} vertices are not supported"
            )));
        }
        Ok(())
    }

    /// One representative per `{R, R^-1}` class: the entry with the smaller key.
    pub fn to_nonequivalent(&self) -> Catalog {
        let entries = self
            .entries
            .iter()
            .filter(|(k, r)| {
                let inv = canonical_form(&r.inverse());
                inv >= *k || self.index_of_key(&inv).is_none()
            })
            .cloned()
            .collect();
        Catalog {
            class: self.class,
            n: self.n,
            entries,
        }
    }

    /// Closes under inverses and deduplicates.
    pub fn from_nonequivalent(&self) -> Catalog {
        let mut map: HashMap<CanonicalKey, RotationSystem> = HashMap::new();
        for (k, r) in &self.entries {
            map.entry(*k).or_insert(*r);
            let (ik, irep) = canonical_representative(&r.inverse());
            map.entry(ik).or_insert(irep);
        }
        Self::from_map(self.class, self.n, map)
    }

    /// Number of `{R, R^-1}` classes.
    pub fn equivalence_class_count(&self) -> usize {
        self.to_nonequivalent().len()
    }
}

/// Catalogs on at most five vertices: a single system for `n <= 3`, the two
/// drawings of `K4`, and the 5-vertex seeds.
pub fn base_catalog(class: Class, n: usize) -> Result<Catalog> {
    match n {
        0 => Err(Error::domain("catalogs start at one vertex")),
        1..=3 => Catalog::from_systems(class, n, [RotationSystem::increasing(n)?]),
        4 => Catalog::from_systems(class, 4, [planar_k4(), crossing_k4()]),
        5 => seed_catalog(class),
        _ => Err(Error::domain("base catalogs stop at 5 vertices; extend the seed")),
    }
}

/// Extends the seed sequentially up to `n` vertices.
pub fn catalog_up_to(class: Class, n: usize) -> Result<Catalog> {
    if n <= 5 {
        return base_catalog(class, n);
    }
    let mut cat = seed_catalog(class)?;
    while cat.n() < n {
        cat = cat.extend()?;
    }
    Ok(cat)
}

/// The 5-vertex catalog of `class`, validated before it is returned.
pub fn seed_catalog(class: Class) -> Result<Catalog> {
    let lines: &[&str] = match class {
        Class::Realizable => &REALIZABLE_SEED,
        Class::Convex => &CONVEX_SEED,
    };
    let systems = lines
        .iter()
        .map(|l| RotationSystem::parse_line(l))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::CorruptSeed(alloc::format!("{e}")))?;
    let cat = Catalog::from_systems(class, 5, systems.iter().copied())?;
    validate_seed(class, &systems, &cat).map_err(Error::CorruptSeed)?;
    Ok(cat)
}

fn validate_seed(class: Class, systems: &[RotationSystem], cat: &Catalog) -> Result<(), String> {
    let expected = match class {
        Class::Realizable => 6,
        Class::Convex => 3,
    };
    if cat.len() != expected || systems.len() != expected {
        return Err(alloc::format!(
            "expected {expected} pairwise non-isomorphic systems, found {}",
            cat.len()
        ));
    }
    let planar = canonical_form(&planar_k4());
    let crossing = canonical_form(&crossing_k4());
    for r in cat.systems() {
        for s in (0..5).combinations(4) {
            let k = canonical_form(&r.induced_ordered(&s));
            if k != planar && k != crossing {
                return Err(alloc::format!("{r} has a 4-subsystem that is no drawing of K4"));
            }
        }
    }
    let mut crossings: Vec<u64> = cat
        .systems()
        .map(|r| crossing_count(r).map_err(|e| alloc::format!("{e}")))
        .collect::<Result<_, _>>()?;
    crossings.sort_unstable();
    let expected_crossings: &[u64] = match class {
        Class::Realizable => &[1, 3, 3, 5, 5, 5],
        Class::Convex => &[1, 3, 5],
    };
    if crossings != expected_crossings {
        return Err(alloc::format!("crossing counts {crossings:?}, expected {expected_crossings:?}"));
    }
    // Closed under mirror images, with exactly one chiral pair in E5 and
    // none among the rectilinear drawings.
    let mut chiral = 0;
    for (k, r) in cat.entries() {
        let inv = canonical_form(&r.inverse());
        if cat.index_of_key(&inv).is_none() {
            return Err(alloc::format!("mirror image of {r} is missing"));
        }
        if inv != *k {
            chiral += 1;
        }
    }
    let expected_chiral = match class {
        Class::Realizable => 2,
        Class::Convex => 0,
    };
    if chiral != expected_chiral {
        return Err(alloc::format!(
            "{chiral} systems differ from their mirror image, expected {expected_chiral}"
        ));
    }
    let d3 = RotationSystem::parse_line(RECTILINEAR_THREE_CROSSINGS).map_err(|e| alloc::format!("{e}"))?;
    if !cat.contains(&d3) {
        return Err("the 3-crossing rectilinear drawing is missing".into());
    }
    if class == Class::Convex {
        let realizable = Catalog::from_systems(
            Class::Realizable,
            5,
            REALIZABLE_SEED
                .iter()
                .map(|l| RotationSystem::parse_line(l).expect("checked literal")),
        )
        .map_err(|e| alloc::format!("{e}"))?;
        if !cat.systems().all(|r| realizable.contains(r)) {
            return Err("convex seed is not contained in the realizable seed".into());
        }
    }
    Ok(())
}

/// Membership bitmap over the `6^5` labeled 5-vertex systems: bit `c` is set
/// when `unpack5(c)` is isomorphic to a member of the class's 5-vertex seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeled5Lookup {
    class: Class,
    bits: Vec<u64>,
}

impl Labeled5Lookup {
    pub fn from_catalog(seed: &Catalog) -> Result<Self> {
        if seed.n() != 5 {
            return Err(Error::domain("the lookup is built from a 5-vertex catalog"));
        }
        let mut bits = alloc::vec![0u64; PACK5_SIZE.div_ceil(64)];
        for code in 0..PACK5_SIZE as u16 {
            if seed.contains(&unpack5(code)) {
                bits[code as usize / 64] |= 1 << (code % 64);
            }
        }
        Ok(Labeled5Lookup {
            class: seed.class(),
            bits,
        })
    }

    pub fn for_class(class: Class) -> Result<Self> {
        Self::from_catalog(&seed_catalog(class)?)
    }

    pub fn class(&self) -> Class {
        self.class
    }

    #[inline]
    pub fn contains_code(&self, code: u16) -> bool {
        self.bits[code as usize / 64] >> (code % 64) & 1 == 1
    }

    #[inline]
    pub fn contains(&self, r: &RotationSystem) -> bool {
        r.n() == 5 && self.contains_code(pack5(r))
    }

    /// Number of labeled systems accepted.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// True iff every 5-subset containing `new_vertex` induces a member of the
/// lookup's class. Subsets avoiding `new_vertex` are assumed to pass already.
pub fn passes_subsystem_filter(
    r: &RotationSystem,
    lookup: &Labeled5Lookup,
    new_vertex: Vertex,
) -> bool {
    let n = r.n();
    if n < 5 {
        return true;
    }
    let others: Vec<Vertex> = (0..n as Vertex).filter(|&v| v != new_vertex).collect();
    others.iter().copied().combinations(4).all(|mut s| {
        s.push(new_vertex);
        s.sort_unstable();
        lookup.contains(&r.induced_ordered(&s))
    })
}

/// Every system on `base.n() + 1` vertices whose restriction to `0..n` is
/// `base` and which passes the 5-subsystem filter, canonicalized and
/// deduplicated, sorted by key.
///
/// The new vertex's rotation is fixed first; the new vertex is then inserted
/// into the old rotations one at a time, and each 5-subset made of the new
/// vertex and four old vertices is checked as soon as all of its insertion
/// slots are decided.
pub fn extend_entry(
    base: &RotationSystem,
    lookup: &Labeled5Lookup,
) -> Vec<(CanonicalKey, RotationSystem)> {
    let n = base.n();
    assert!(n >= 4 && n < MAX_VERTICES, "extension needs 4 <= n < {MAX_VERTICES}");
    let mut found: HashMap<CanonicalKey, RotationSystem> = HashMap::new();
    let mut search = Extension {
        n,
        base: *base.raw_rows(),
        rows: [[0; MAX_VERTICES - 1]; MAX_VERTICES],
        lookup,
        found: &mut found,
    };
    for tail in (1..n as Vertex).permutations(n - 1) {
        search.rows[n][0] = 0;
        search.rows[n][1..n].copy_from_slice(&tail);
        search.insert(0);
    }
    let mut out: Vec<_> = found.into_iter().collect();
    out.sort_unstable_by_key(|(k, _)| *k);
    out
}

struct Extension<'a> {
    n: usize,
    base: [[Vertex; MAX_VERTICES - 1]; MAX_VERTICES],
    rows: [[Vertex; MAX_VERTICES - 1]; MAX_VERTICES],
    lookup: &'a Labeled5Lookup,
    found: &'a mut HashMap<CanonicalKey, RotationSystem>,
}

impl Extension<'_> {
    fn insert(&mut self, v: usize) {
        let n = self.n;
        if v == n {
            let r = RotationSystem::from_raw(n + 1, self.rows);
            let (k, rep) = canonical_representative(&r);
            self.found.entry(k).or_insert(rep);
            return;
        }
        let m = n - 1;
        for slot in 0..m {
            {
                let src = self.base[v];
                let dst = &mut self.rows[v];
                dst[..=slot].copy_from_slice(&src[..=slot]);
                dst[slot + 1] = n as Vertex;
                dst[slot + 2..=m].copy_from_slice(&src[slot + 1..m]);
            }
            if self.subsets_through(v) {
                self.insert(v + 1);
            }
        }
    }

    /// Checks the 5-subsets `{new} + T` with `T` a 4-subset of `0..=v`
    /// containing `v`.
    fn subsets_through(&self, v: usize) -> bool {
        if v < 3 {
            return true;
        }
        let new = self.n as Vertex;
        for a in 0..v {
            for b in a + 1..v {
                for c in b + 1..v {
                    let subset = [a as Vertex, b as Vertex, c as Vertex, v as Vertex, new];
                    if !self.lookup.contains_code(self.code5(&subset)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `pack5` of the subsystem on the sorted `subset`, read off the partial rows.
    #[inline]
    fn code5(&self, subset: &[Vertex; 5]) -> u16 {
        let len = self.n; // every decided row, and the new row, has n entries
        let mut local = [u8::MAX; MAX_VERTICES];
        for (i, &x) in subset.iter().enumerate() {
            local[x as usize] = i as u8;
        }
        let mut code = 0u16;
        for i in (0..5).rev() {
            let row = &self.rows[subset[i] as usize][..len];
            let mut buf = [0u8; 4];
            let mut k = 0;
            for &x in row {
                let l = local[x as usize];
                if l != u8::MAX {
                    buf[k] = l;
                    k += 1;
                }
            }
            debug_assert_eq!(k, 4);
            // Rotate to start at the smallest label, then rank the last three.
            let start = (0..4).min_by_key(|&j| buf[j]).unwrap_or(0);
            let t = [buf[(start + 1) % 4], buf[(start + 2) % 4], buf[(start + 3) % 4]];
            let rank = (t[0] > t[1]) as u16 * 2 + (t[0] > t[2]) as u16 * 2 + (t[1] > t[2]) as u16;
            code = code * 6 + rank;
        }
        code
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::row_rank;

    #[test]
    fn rank_of_three_matches_row_rank() {
        for t in (0u8..3).permutations(3) {
            let rank = (t[0] > t[1]) as u32 * 2 + (t[0] > t[2]) as u32 * 2 + (t[1] > t[2]) as u32;
            assert_eq!(rank, row_rank(&[0, t[0] + 1, t[1] + 1, t[2] + 1]));
        }
    }

    #[test]
    fn seeds_validate() {
        let e5 = seed_catalog(Class::Realizable).unwrap();
        let c5 = seed_catalog(Class::Convex).unwrap();
        assert_eq!(e5.len(), 6);
        assert_eq!(c5.len(), 3);
        let d3 = RotationSystem::from_one_based_digits("1:2543 2:1435 3:1542 4:1532 5:1243").unwrap();
        assert!(c5.contains(&d3));
        assert!(e5.contains(&d3));
    }

    #[test]
    fn seed_validation_rejects_bad_data() {
        let cat = Catalog::from_systems(
            Class::Convex,
            5,
            [RECTILINEAR_ONE_CROSSING, RECTILINEAR_CONVEX_POSITION, NONCONVEX_THREE_CROSSINGS]
                .iter()
                .map(|l| RotationSystem::parse_line(l).unwrap()),
        )
        .unwrap();
        let systems: Vec<_> = cat.systems().copied().collect();
        assert!(validate_seed(Class::Convex, &systems, &cat).is_err());
    }

    #[test]
    fn lookup_counts_labelings() {
        // Each class contributes 120 / |Aut| labelings.
        let lookup = Labeled5Lookup::for_class(Class::Realizable).unwrap();
        let e5 = seed_catalog(Class::Realizable).unwrap();
        let expected: usize = e5
            .systems()
            .map(|r| 120 / crate::canon::automorphisms(r).len())
            .sum();
        assert_eq!(lookup.count(), expected);
        assert!(lookup.contains(e5.get(0).unwrap()));
    }

    #[test]
    fn extension_code_matches_pack5() {
        let e5 = seed_catalog(Class::Realizable).unwrap();
        let lookup = Labeled5Lookup::for_class(Class::Realizable).unwrap();
        let base = e5.get(2).unwrap();
        for (_, r) in extend_entry(base, &lookup) {
            assert!(passes_subsystem_filter(&r, &lookup, 5));
            for v in 0..6 {
                assert!(passes_subsystem_filter(&r, &lookup, v));
            }
        }
    }

    #[test]
    fn e6_has_165_members() {
        let e6 = seed_catalog(Class::Realizable).unwrap().extend().unwrap();
        assert_eq!(e6.len(), 165);
        assert_eq!(e6.equivalence_class_count(), 102);
        assert_eq!(e6.to_nonequivalent().from_nonequivalent(), e6);
        assert!(e6.is_hereditary_over(&seed_catalog(Class::Realizable).unwrap()));
    }

    #[test]
    fn nonequivalent_is_idempotent() {
        let e5 = seed_catalog(Class::Realizable).unwrap();
        let m5 = e5.to_nonequivalent();
        assert_eq!(m5.len(), 5);
        assert_eq!(m5.to_nonequivalent(), m5);
        let c5 = seed_catalog(Class::Convex).unwrap();
        assert_eq!(c5.from_nonequivalent(), c5);
    }

    #[test]
    fn base_catalogs() {
        assert_eq!(base_catalog(Class::Realizable, 1).unwrap().len(), 1);
        assert_eq!(base_catalog(Class::Realizable, 3).unwrap().len(), 1);
        assert_eq!(base_catalog(Class::Convex, 4).unwrap().len(), 2);
        assert!(base_catalog(Class::Convex, 6).is_err());
        assert!(base_catalog(Class::Convex, 0).is_err());
    }

    #[test]
    fn class_round_trips_through_text() {
        for c in [Class::Realizable, Class::Convex] {
            assert_eq!(c.as_str().parse::<Class>().unwrap(), c);
        }
        assert!("nope".parse::<Class>().is_err());
    }
}
