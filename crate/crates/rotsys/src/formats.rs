//! Text formats for catalogs, flag bases, pair-density matrices and
//! certificates. Every reader reports the 1-based line of the first problem.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use rotsys_core::certificate::{Certificate, Factorization};
use rotsys_core::rational::{format_rational, parse_rational, Rational};
use rotsys_core::{Catalog, Class, Flag, FlagBasis, PairDensityMatrix, RotationSystem, TypeConfig, TypeSpec};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] rotsys_core::Error),
}

type Result<T, E = FormatError> = std::result::Result<T, E>;

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// Numbered, trimmed lines; blank lines and `#` comments skipped.
struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Lines { inner: r.lines(), line: 0 }
    }

    fn next_line(&mut self) -> Result<Option<String>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| syntax(self.line + 1, format!("unexpected end of file, expected {what}")))
    }

    fn err(&self, msg: impl Into<String>) -> FormatError {
        syntax(self.line, msg)
    }
}

/// Parses `magic key=value ...`, checking the magic words.
fn parse_header(line: &str, magic: &[&str], at: usize) -> Result<HashMap<String, String>> {
    let mut words = line.split_whitespace();
    for m in magic {
        if words.next() != Some(m) {
            return Err(syntax(at, format!("expected header `{}`", magic.join(" "))));
        }
    }
    words
        .map(|w| {
            w.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| syntax(at, format!("bad header field `{w}`")))
        })
        .collect()
}

fn field<T: std::str::FromStr>(h: &HashMap<String, String>, key: &str, at: usize) -> Result<T> {
    h.get(key)
        .ok_or_else(|| syntax(at, format!("header lacks `{key}`")))?
        .parse()
        .map_err(|_| syntax(at, format!("bad value for `{key}`")))
}

fn class_field(h: &HashMap<String, String>, at: usize) -> Result<Class> {
    let s: String = field(h, "class", at)?;
    s.parse().map_err(|_| syntax(at, format!("unknown class `{s}`")))
}

pub fn write_catalog(w: &mut (impl Write + ?Sized), cat: &Catalog) -> std::io::Result<()> {
    writeln!(w, "rotsys-catalog v1 class={} n={} count={}", cat.class(), cat.n(), cat.len())?;
    for r in cat.systems() {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

/// Reads a catalog, re-canonicalizing every entry. Duplicates (up to
/// isomorphism) and count mismatches are errors.
pub fn read_catalog(r: impl BufRead) -> Result<Catalog> {
    let mut lines = Lines::new(r);
    let head = lines.expect_line("catalog header")?;
    let h = parse_header(&head, &["rotsys-catalog", "v1"], lines.line)?;
    let at = lines.line;
    let class = class_field(&h, at)?;
    let n: usize = field(&h, "n", at)?;
    let count: usize = field(&h, "count", at)?;
    let mut systems = Vec::with_capacity(count);
    while let Some(l) = lines.next_line()? {
        let r = RotationSystem::parse_line(&l).map_err(|e| lines.err(e.to_string()))?;
        if r.n() != n {
            return Err(lines.err(format!("system on {} vertices in a size-{n} catalog", r.n())));
        }
        systems.push(r);
    }
    let cat = Catalog::from_systems(class, n, systems.iter().copied())?;
    if systems.len() != count || cat.len() != count {
        return Err(syntax(
            lines.line,
            format!(
                "header says {count} systems, found {} lines and {} isomorphism classes",
                systems.len(),
                cat.len()
            ),
        ));
    }
    Ok(cat)
}

pub fn write_flags(w: &mut (impl Write + ?Sized), basis: &FlagBasis, type_index: usize) -> std::io::Result<()> {
    writeln!(
        w,
        "flags v1 class={} type={} l={} count={}",
        basis.class(),
        type_index,
        basis.spec().flag_size,
        basis.len()
    )?;
    writeln!(w, "sigma {}", basis.spec().sigma)?;
    for f in basis.flags() {
        writeln!(w, "{}", f.to_line())?;
    }
    Ok(())
}

/// Reads a flag basis, returning it with its type index.
pub fn read_flags(r: impl BufRead) -> Result<(usize, FlagBasis)> {
    let mut lines = Lines::new(r);
    let head = lines.expect_line("flags header")?;
    let h = parse_header(&head, &["flags", "v1"], lines.line)?;
    let at = lines.line;
    let class = class_field(&h, at)?;
    let index: usize = field(&h, "type", at)?;
    let l: usize = field(&h, "l", at)?;
    let count: usize = field(&h, "count", at)?;
    let sigma_line = lines.expect_line("`sigma` line")?;
    let sigma = sigma_line
        .strip_prefix("sigma ")
        .ok_or_else(|| lines.err("expected `sigma <system>`"))
        .and_then(|s| RotationSystem::parse_line(s).map_err(|e| lines.err(e.to_string())))?;
    let spec = TypeSpec::new(sigma, l)?;
    let mut flags = Vec::with_capacity(count);
    while let Some(line) = lines.next_line()? {
        flags.push(Flag::parse_line(&line).map_err(|e| lines.err(e.to_string()))?);
    }
    if flags.len() != count {
        return Err(lines.err(format!("header says {count} flags, found {}", flags.len())));
    }
    Ok((index, FlagBasis::from_flags(class, spec, flags)?))
}

/// Identifies one pair-density matrix in a Q file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QHeader {
    pub class: Class,
    pub n: usize,
    pub type_index: usize,
    pub target: usize,
}

/// One `q v1 ...` section: the header, then `row col p/q` triples of the
/// upper triangle.
pub fn write_q(w: &mut (impl Write + ?Sized), h: &QHeader, q: &PairDensityMatrix) -> std::io::Result<()> {
    writeln!(
        w,
        "q v1 class={} N={} type={} R={} dim={} den={} entries={}",
        h.class,
        h.n,
        h.type_index,
        h.target,
        q.dim(),
        q.denominator(),
        q.entries().len()
    )?;
    for &(a, b, _) in q.entries() {
        writeln!(w, "{a} {b} {}", format_rational(&q.get(a as usize, b as usize)))?;
    }
    Ok(())
}

/// Reads every section of a Q file.
pub fn read_q(r: impl BufRead) -> Result<Vec<(QHeader, PairDensityMatrix)>> {
    let mut lines = Lines::new(r);
    let mut out = Vec::new();
    while let Some(head) = lines.next_line()? {
        let h = parse_header(&head, &["q", "v1"], lines.line)?;
        let at = lines.line;
        let header = QHeader {
            class: class_field(&h, at)?,
            n: field(&h, "N", at)?,
            type_index: field(&h, "type", at)?,
            target: field(&h, "R", at)?,
        };
        let dim: usize = field(&h, "dim", at)?;
        let den: u64 = field(&h, "den", at)?;
        let count: usize = field(&h, "entries", at)?;
        let den_big = BigInt::from(den);
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let l = lines.expect_line("matrix entry")?;
            let mut parts = l.split_whitespace();
            let (Some(a), Some(b), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(lines.err("expected `row col p/q`"));
            };
            let a: u32 = a.parse().map_err(|_| lines.err("bad row"))?;
            let b: u32 = b.parse().map_err(|_| lines.err("bad column"))?;
            let v = parse_rational(v).map_err(|e| lines.err(e.to_string()))?;
            let scaled = v * Rational::from_integer(den_big.clone());
            if !scaled.is_integer() {
                return Err(lines.err("entry is not a multiple of 1/den"));
            }
            let c = u64::try_from(scaled.to_integer()).map_err(|_| lines.err("entry out of range"))?;
            entries.push((a, b, c));
        }
        let q = PairDensityMatrix::from_entries(dim, den, entries).map_err(|e| lines.err(e.to_string()))?;
        out.push((header, q));
    }
    Ok(out)
}

pub fn write_certificate(w: &mut (impl Write + ?Sized), cert: &Certificate) -> std::io::Result<()> {
    writeln!(
        w,
        "flagcert v1 class={} N={} bound={}",
        cert.class,
        cert.n,
        format_rational(&cert.bound)
    )?;
    writeln!(w, "config {}", cert.config.descriptor())?;
    let row = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
    for (i, f) in cert.factors.iter().enumerate() {
        writeln!(w, "type {i} dim {}", f.dim())?;
        for u in f.u() {
            writeln!(w, "{}", row(u))?;
        }
        writeln!(w, "diag {}", row(f.d()))?;
    }
    Ok(())
}

pub fn read_certificate(r: impl BufRead) -> Result<Certificate> {
    let mut lines = Lines::new(r);
    let head = lines.expect_line("certificate header")?;
    let h = parse_header(&head, &["flagcert", "v1"], lines.line)?;
    let at = lines.line;
    let class = class_field(&h, at)?;
    let n: usize = field(&h, "N", at)?;
    let bound_text: String = field(&h, "bound", at)?;
    let bound = parse_rational(&bound_text).map_err(|e| syntax(at, e.to_string()))?;
    let config_line = lines.expect_line("`config` line")?;
    let config = config_line
        .strip_prefix("config ")
        .ok_or_else(|| lines.err("expected `config <types>`"))
        .and_then(|s| TypeConfig::parse_descriptor(s).map_err(|e| lines.err(e.to_string())))?;
    let parse_row = |lines: &Lines<_>, text: &str, dim: usize| -> Result<Vec<Rational>> {
        let row = text
            .split_whitespace()
            .map(parse_rational)
            .collect::<rotsys_core::Result<Vec<_>>>()
            .map_err(|e| lines.err(e.to_string()))?;
        if row.len() != dim {
            return Err(lines.err(format!("expected {dim} entries, found {}", row.len())));
        }
        Ok(row)
    };
    let mut factors = Vec::with_capacity(config.types.len());
    for i in 0..config.types.len() {
        let t = lines.expect_line("`type` line")?;
        let dim = match t.split_whitespace().collect::<Vec<_>>()[..] {
            ["type", idx, "dim", d] if idx.parse() == Ok(i) => d.parse::<usize>().map_err(|_| lines.err("bad dimension"))?,
            _ => return Err(lines.err(format!("expected `type {i} dim <d>`"))),
        };
        let mut u = Vec::with_capacity(dim);
        for _ in 0..dim {
            let l = lines.expect_line("row of U")?;
            u.push(parse_row(&lines, &l, dim)?);
        }
        let d_line = lines.expect_line("`diag` row")?;
        let d_text = d_line
            .strip_prefix("diag")
            .ok_or_else(|| lines.err("expected `diag ...`"))?;
        let d = parse_row(&lines, d_text, dim)?;
        factors.push(Factorization::new(u, d).map_err(|e| lines.err(e.to_string()))?);
    }
    if lines.next_line()?.is_some() {
        return Err(lines.err("trailing data after the last type"));
    }
    Ok(Certificate {
        class,
        n,
        config,
        factors,
        bound,
    })
}
