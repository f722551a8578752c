//! Canonical forms.
//!
//! The serialization of a system is its rows `0..n` (each phase-normalized)
//! concatenated; the canonical key is the lexicographic minimum over all
//! relabelings. In that minimum, row 0 is always `1, 2, .., n-1`: whichever
//! vertex `a` is sent to 0 and whichever neighbor `b` to 1, labeling the rest
//! of `a`'s rotation in cyclic order from `b` attains the smallest possible
//! first row. So the minimum over all `n!` relabelings is attained by one of
//! the `n(n-1)` choices of `(a, b)`. Those are scanned with branch-and-bound
//! on rows `1..n`.
//!
//! Keys pack the non-constant part of the serialization (3 bits per entry,
//! row 0 and the leading `0` of every other row dropped) into a `u128`,
//! most significant first, so integer order is lexicographic order.

use alloc::vec::Vec;
use core::fmt;

use itertools::Itertools;

use crate::rotation::{RotationSystem, Vertex, MAX_VERTICES};

/// Canonical key of an isomorphism class. Ordered by size, then
/// lexicographically by canonical serialization.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    n: u8,
    code: u128,
}

impl CanonicalKey {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn code(&self) -> u128 {
        self.code
    }

    /// The full canonical serialization (rows concatenated).
    pub fn to_sequence(&self) -> Vec<Vertex> {
        let n = self.n();
        if n <= 1 {
            return Vec::new();
        }
        let m = n - 1;
        let mut out = Vec::with_capacity(n * m);
        out.extend(1..n as Vertex);
        let per_row = m - 1;
        let total = (n - 1) * per_row;
        for w in 1..n {
            out.push(0);
            for j in 0..per_row {
                let idx = (w - 1) * per_row + j;
                let shift = 3 * (total - 1 - idx);
                out.push(((self.code >> shift) & 7) as Vertex);
            }
        }
        out
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey(n={}, {:?})", self.n, self.to_sequence())
    }
}

pub fn canonical_form(r: &RotationSystem) -> CanonicalKey {
    best_labeling(r).0
}

pub fn is_isomorphic(a: &RotationSystem, b: &RotationSystem) -> bool {
    a.n() == b.n() && canonical_form(a) == canonical_form(b)
}

/// The canonical key together with the relabeled system whose serialization
/// is that key. The representative is identical for isomorphic inputs.
pub fn canonical_representative(r: &RotationSystem) -> (CanonicalKey, RotationSystem) {
    let (key, perm) = best_labeling(r);
    let rep = r
        .relabel(&perm[..r.n()])
        .expect("canonical labeling is a permutation");
    (key, rep)
}

/// Returns the key and a labeling `perm[old] = new` attaining it.
fn best_labeling(r: &RotationSystem) -> (CanonicalKey, [Vertex; MAX_VERTICES]) {
    let n = r.n();
    let mut identity = [0 as Vertex; MAX_VERTICES];
    for (i, x) in identity.iter_mut().enumerate() {
        *x = i as Vertex;
    }
    if n <= 2 {
        return (CanonicalKey { n: n as u8, code: 0 }, identity);
    }
    let m = n - 1;
    let per_row = m - 1;
    let row_bits = 3 * per_row as u32;
    let total_rows = (n - 1) as u32;
    let rows = r.raw_rows();
    let pos = r.positions();

    let mut best: Option<u128> = None;
    let mut best_label = identity;
    let mut label = [0 as Vertex; MAX_VERTICES];
    let mut order = [0 as Vertex; MAX_VERTICES];

    for a in 0..n {
        let row_a = &rows[a][..m];
        for s in 0..m {
            order[0] = a as Vertex;
            label[a] = 0;
            for i in 0..m {
                let x = row_a[(s + i) % m];
                order[i + 1] = x;
                label[x as usize] = (i + 1) as Vertex;
            }
            let mut code: u128 = 0;
            let mut strictly_less = best.is_none();
            let mut abandoned = false;
            for w in 1..n {
                let u = order[w] as usize;
                let row_u = &rows[u][..m];
                let p = pos[u][a] as usize;
                let mut rc: u32 = 0;
                for j in 1..m {
                    rc = (rc << 3) | label[row_u[(p + j) % m] as usize] as u32;
                }
                if !strictly_less {
                    let shift = row_bits * (total_rows - w as u32);
                    let b = ((best.unwrap() >> shift) & ((1u128 << row_bits) - 1)) as u32;
                    if rc > b {
                        abandoned = true;
                        break;
                    }
                    if rc < b {
                        strictly_less = true;
                    }
                }
                code = (code << row_bits) | rc as u128;
            }
            if !abandoned && strictly_less {
                best = Some(code);
                best_label = label;
            }
        }
    }
    (
        CanonicalKey {
            n: n as u8,
            code: best.unwrap_or(0),
        },
        best_label,
    )
}

/// Lexicographic rank of `row[1..]` among the permutations of its own
/// entries. Rows are phase-normalized, so this identifies a cyclic order.
#[inline]
pub(crate) fn row_rank(row: &[Vertex]) -> u32 {
    let tail = &row[1.min(row.len())..];
    let mut rank = 0u32;
    for (i, &x) in tail.iter().enumerate() {
        let smaller_after = tail[i + 1..].iter().filter(|&&y| y < x).count() as u32;
        rank = rank * (tail.len() - i) as u32 + smaller_after;
    }
    rank
}

/// Injective code of a labeled system (no relabeling). Integer order matches
/// the lexicographic order of serializations among systems of equal size.
pub fn labeled_code(r: &RotationSystem) -> u128 {
    let n = r.n();
    if n <= 2 {
        return 0;
    }
    let m = n - 1;
    let rows = r.raw_rows();
    if n <= 7 {
        let mut code: u128 = 0;
        for row in rows.iter().take(n) {
            for &x in &row[1..m] {
                code = (code << 3) | x as u128;
            }
        }
        code
    } else {
        let radix: u128 = (1..m as u128).product();
        let mut code: u128 = 0;
        for row in rows.iter().take(n) {
            code = code * radix + row_rank(&row[..m]) as u128;
        }
        code
    }
}

/// Packed code of a labeled 5-vertex system: each rotation is one of 6 cyclic
/// orders, so the code is below `6^5 = 7776`.
#[inline]
pub fn pack5(r: &RotationSystem) -> u16 {
    debug_assert_eq!(r.n(), 5);
    let rows = r.raw_rows();
    let mut code = 0u16;
    for v in (0..5).rev() {
        code = code * 6 + row_rank(&rows[v][..4]) as u16;
    }
    code
}

/// Number of distinct packed 5-vertex codes.
pub const PACK5_SIZE: usize = 7776;

/// Inverse of [`pack5`].
pub fn unpack5(mut code: u16) -> RotationSystem {
    let mut rows: Vec<Vec<Vertex>> = Vec::with_capacity(5);
    for v in 0..5u8 {
        let rank = (code % 6) as usize;
        code /= 6;
        let others: Vec<Vertex> = (0..5).filter(|&u| u != v).collect();
        let first = others[0];
        let tail = others[1..]
            .iter()
            .copied()
            .permutations(3)
            .nth(rank)
            .expect("rank below 3!");
        let mut row = Vec::with_capacity(4);
        row.push(first);
        row.extend(tail);
        rows.push(row);
    }
    RotationSystem::new(&rows).expect("unpacked rows are permutations")
}

/// Canonical form of a flag: vertices `0..roots` are labeled roots and stay
/// fixed; the remaining vertices may be permuted. Returns the minimal
/// [`labeled_code`] and the system attaining it.
pub fn rooted_canonical(r: &RotationSystem, roots: usize) -> (u128, RotationSystem) {
    let n = r.n();
    debug_assert!(roots <= n);
    let free = n - roots;
    if free <= 1 {
        return (labeled_code(r), *r);
    }
    let mut best: Option<(u128, RotationSystem)> = None;
    let mut perm = [0 as Vertex; MAX_VERTICES];
    for (i, p) in perm.iter_mut().enumerate().take(roots) {
        *p = i as Vertex;
    }
    for targets in (roots as Vertex..n as Vertex).permutations(free) {
        perm[roots..n].copy_from_slice(&targets);
        let s = r.relabel(&perm[..n]).expect("permutation");
        let c = labeled_code(&s);
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, s));
        }
    }
    best.expect("at least one permutation")
}

/// Every system obtained from `r` by permuting the non-root vertices.
pub fn rooted_relabelings(r: &RotationSystem, roots: usize) -> Vec<RotationSystem> {
    let n = r.n();
    let mut perm = [0 as Vertex; MAX_VERTICES];
    for (i, p) in perm.iter_mut().enumerate().take(roots) {
        *p = i as Vertex;
    }
    let mut out: Vec<RotationSystem> = (roots as Vertex..n as Vertex)
        .permutations(n - roots)
        .map(|t| {
            perm[roots..n].copy_from_slice(&t);
            r.relabel(&perm[..n]).expect("permutation")
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Label permutations mapping `r` onto itself.
pub fn automorphisms(r: &RotationSystem) -> Vec<Vec<Vertex>> {
    let n = r.n();
    (0..n as Vertex)
        .permutations(n)
        .filter(|p| r.relabel(p).map(|s| s == *r).unwrap_or(false))
        .collect()
}
