//! Rotation systems: for every vertex, the cyclic order of the other vertices.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Vertex label, dense in `0..n`.
pub type Vertex = u8;

/// Largest supported vertex count. Every catalog handled here has at most 8
/// elements, which keeps a system in a fixed-size `Copy` value.
pub const MAX_VERTICES: usize = 8;

const ROW: usize = MAX_VERTICES - 1;

/// A rotation system on the vertices `0..n`.
///
/// Each rotation is stored phase-normalized: it starts with its smallest
/// label. Only the cyclic order carries information; the phase is a storage
/// convention that makes derived equality coincide with equality of systems.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationSystem {
    n: u8,
    rows: [[Vertex; ROW]; MAX_VERTICES],
}

impl RotationSystem {
    /// Builds a system from one rotation per vertex, validating that row `v`
    /// is a permutation of the other vertices. Rows may start anywhere.
    pub fn new<R: AsRef<[Vertex]>>(rotations: &[R]) -> Result<Self> {
        let n = rotations.len();
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::domain(alloc::format!(
                "vertex count {n} outside 1..={MAX_VERTICES}"
            )));
        }
        let mut sys = RotationSystem {
            n: n as u8,
            rows: [[0; ROW]; MAX_VERTICES],
        };
        for (v, row) in rotations.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n - 1 {
                return Err(Error::domain(alloc::format!(
                    "rotation at {v} has {} entries, expected {}",
                    row.len(),
                    n - 1
                )));
            }
            let mut seen = [false; MAX_VERTICES];
            for &u in row {
                let ui = u as usize;
                if ui >= n || ui == v || seen[ui] {
                    return Err(Error::domain(alloc::format!(
                        "rotation at {v} is not a permutation of the other vertices"
                    )));
                }
                seen[ui] = true;
            }
            sys.rows[v][..n - 1].copy_from_slice(row);
            normalize_phase(&mut sys.rows[v][..n - 1]);
        }
        Ok(sys)
    }

    /// Builds a system from rows that are already valid and phase-normalized.
    pub(crate) fn from_raw(n: usize, rows: [[Vertex; ROW]; MAX_VERTICES]) -> Self {
        let sys = RotationSystem { n: n as u8, rows };
        debug_assert!(sys.check_invariants(), "invalid raw rotation system");
        sys
    }

    /// Paper-style notation with one-based single digit labels, for example
    /// `"1:234 2:143 3:124 4:132"`. Vertex `i` becomes `i - 1`.
    pub fn from_one_based_digits(s: &str) -> Result<Self> {
        let mut rows: Vec<(usize, Vec<Vertex>)> = Vec::new();
        for part in s.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
            if part.is_empty() {
                continue;
            }
            let (head, tail) = part
                .split_once(':')
                .ok_or_else(|| Error::parse(alloc::format!("missing `:` in `{part}`")))?;
            let v = parse_digit(head)?;
            let row = tail
                .chars()
                .map(|c| parse_digit(c.encode_utf8(&mut [0; 4])))
                .collect::<Result<Vec<_>>>()?;
            rows.push((v as usize, row));
        }
        rows.sort_by_key(|(v, _)| *v);
        if rows.iter().enumerate().any(|(i, (v, _))| *v != i) {
            return Err(Error::parse("vertices must be 1..n, each exactly once"));
        }
        let rows: Vec<Vec<Vertex>> = rows.into_iter().map(|(_, r)| r).collect();
        Self::new(&rows)
    }

    /// The unique system on `n` vertices with `n <= 3`, or the identity-like
    /// "all rotations increasing" system otherwise.
    pub fn increasing(n: usize) -> Result<Self> {
        let rows: Vec<Vec<Vertex>> = (0..n)
            .map(|v| (0..n as Vertex).filter(|&u| u as usize != v).collect())
            .collect();
        Self::new(&rows)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Phase-normalized rotation at `v`.
    #[inline]
    pub fn rotation(&self, v: Vertex) -> &[Vertex] {
        &self.rows[v as usize][..self.n() - 1]
    }

    pub fn rotations(&self) -> impl Iterator<Item = &[Vertex]> + '_ {
        (0..self.n).map(move |v| self.rotation(v))
    }

    #[inline]
    pub(crate) fn raw_rows(&self) -> &[[Vertex; ROW]; MAX_VERTICES] {
        &self.rows
    }

    /// `pos[u][x]` is the index of `x` in the rotation at `u`.
    pub fn positions(&self) -> [[u8; MAX_VERTICES]; MAX_VERTICES] {
        let mut pos = [[0u8; MAX_VERTICES]; MAX_VERTICES];
        let m = self.n() - 1;
        for u in 0..self.n() {
            for (i, &x) in self.rows[u][..m].iter().enumerate() {
                pos[u][x as usize] = i as u8;
            }
        }
        pos
    }

    /// Rotation subsystem on `subset`, relabeled to `0..|subset|` in increasing
    /// order of the original labels.
    pub fn induced_subsystem(&self, subset: &[Vertex]) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::domain("induced subsystem of an empty vertex set"));
        }
        let mut sorted = [0 as Vertex; MAX_VERTICES];
        let k = subset.len();
        if k > self.n() {
            return Err(Error::domain("subset larger than the vertex set"));
        }
        sorted[..k].copy_from_slice(subset);
        sorted[..k].sort_unstable();
        for i in 0..k {
            if sorted[i] as usize >= self.n() || (i > 0 && sorted[i] == sorted[i - 1]) {
                return Err(Error::domain(alloc::format!(
                    "subset is not a set of vertices of a {}-vertex system",
                    self.n()
                )));
            }
        }
        Ok(self.induced_ordered(&sorted[..k]))
    }

    /// Subsystem on `order`, where `order[i]` becomes vertex `i`. The caller
    /// guarantees distinct in-range vertices. This is how roots of a flag are
    /// placed first.
    pub fn induced_ordered(&self, order: &[Vertex]) -> Self {
        let k = order.len();
        let mut label = [u8::MAX; MAX_VERTICES];
        for (i, &v) in order.iter().enumerate() {
            label[v as usize] = i as u8;
        }
        let m = self.n() - 1;
        let mut rows = [[0 as Vertex; ROW]; MAX_VERTICES];
        for (i, &v) in order.iter().enumerate() {
            let src = &self.rows[v as usize][..m];
            let dst = &mut rows[i];
            // Walk the rotation starting at the smallest new label so the
            // result comes out phase-normalized.
            let mut start = 0;
            let mut best = u8::MAX;
            for (j, &x) in src.iter().enumerate() {
                let l = label[x as usize];
                if l < best {
                    best = l;
                    start = j;
                }
            }
            let mut len = 0;
            for j in 0..m {
                let l = label[src[(start + j) % m] as usize];
                if l != u8::MAX {
                    dst[len] = l;
                    len += 1;
                }
            }
            debug_assert_eq!(len, k - 1);
        }
        Self::from_raw(k, rows)
    }

    /// Every rotation reversed.
    pub fn inverse(&self) -> Self {
        let m = self.n() - 1;
        let mut rows = self.rows;
        for row in rows.iter_mut().take(self.n()) {
            // Keeping the first entry and reversing the rest reverses the
            // cyclic order while staying phase-normalized.
            row[1..m.max(1)].reverse();
        }
        Self::from_raw(self.n(), rows)
    }

    /// Applies the relabeling `perm[old] = new`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::domain("relabeling has the wrong length"));
        }
        let mut seen = [false; MAX_VERTICES];
        for &p in perm {
            if p as usize >= n || seen[p as usize] {
                return Err(Error::domain("relabeling is not a permutation"));
            }
            seen[p as usize] = true;
        }
        let mut rows = [[0 as Vertex; ROW]; MAX_VERTICES];
        for old in 0..n {
            let new = perm[old] as usize;
            for (j, &x) in self.rows[old][..n - 1].iter().enumerate() {
                rows[new][j] = perm[x as usize];
            }
            normalize_phase(&mut rows[new][..n - 1]);
        }
        Ok(Self::from_raw(n, rows))
    }

    /// Parses the line format `0:1,2,3;1:0,3,2;...` (0-based, no whitespace).
    /// Rotations may be given in any phase; they are normalized on load.
    pub fn parse_line(line: &str) -> Result<Self> {
        let line = line.strip_suffix('\n').unwrap_or(line);
        let mut rows: Vec<Vec<Vertex>> = Vec::new();
        for (i, part) in line.split(';').enumerate() {
            let (head, tail) = part
                .split_once(':')
                .ok_or_else(|| Error::parse(alloc::format!("missing `:` in `{part}`")))?;
            let v: usize = head
                .parse()
                .map_err(|_| Error::parse(alloc::format!("bad vertex `{head}`")))?;
            if v != i {
                return Err(Error::parse(alloc::format!(
                    "rotation {i} is labeled {v}; rotations must appear in vertex order"
                )));
            }
            let row = if tail.is_empty() {
                Vec::new()
            } else {
                tail.split(',')
                    .map(|t| {
                        t.parse::<Vertex>()
                            .map_err(|_| Error::parse(alloc::format!("bad neighbor `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            rows.push(row);
        }
        Self::new(&rows)
    }

    /// The line format without the trailing newline.
    pub fn to_line(&self) -> String {
        let mut s = String::with_capacity(self.n() * self.n() * 2);
        for v in 0..self.n() {
            if v > 0 {
                s.push(';');
            }
            push_num(&mut s, v);
            s.push(':');
            for (j, &u) in self.rotation(v as Vertex).iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                push_num(&mut s, u as usize);
            }
        }
        s
    }

    fn check_invariants(&self) -> bool {
        let n = self.n();
        if n == 0 || n > MAX_VERTICES {
            return false;
        }
        (0..n).all(|v| {
            let row = &self.rows[v][..n - 1];
            let mut seen = [false; MAX_VERTICES];
            let perm_ok = row.iter().all(|&u| {
                let u = u as usize;
                let ok = u < n && u != v && !seen[u];
                if ok {
                    seen[u] = true;
                }
                ok
            });
            perm_ok && row.first().is_none_or(|&f| row.iter().all(|&u| u >= f))
        })
    }
}

impl fmt::Display for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

impl fmt::Debug for RotationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RotationSystem({})", self.to_line())
    }
}

impl core::str::FromStr for RotationSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_line(s)
    }
}

/// Rotates `row` so that it starts with its minimum.
pub(crate) fn normalize_phase(row: &mut [Vertex]) {
    if let Some((idx, _)) = row.iter().enumerate().min_by_key(|(_, &x)| x) {
        row.rotate_left(idx);
    }
}

fn parse_digit(s: &str) -> Result<Vertex> {
    let d: u8 = s
        .parse()
        .map_err(|_| Error::parse(alloc::format!("bad label `{s}`")))?;
    if d == 0 {
        return Err(Error::parse("labels are one-based"));
    }
    Ok(d - 1)
}

fn push_num(s: &mut String, v: usize) {
    use core::fmt::Write;
    let _ = write!(s, "{v}");
}
