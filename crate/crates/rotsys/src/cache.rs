//! On-disk cache of catalogs and pair-density matrices.
//!
//! Layout under the cache directory (`ROTSYS_CACHE_DIR`, default
//! `.rotsys-cache`):
//!
//! ```text
//! catalog-<class>-<n>.txt
//! q-<class>-N<n>-<digest>/chunk-<k>.txt
//! ```
//!
//! Q chunks cover `CHUNK` consecutive targets and are written atomically, so
//! an interrupted run resumes at the first missing chunk.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use rotsys_core::flag::enumerate_bases;
use rotsys_core::pair_density::{pair_density_matrices, PairDensityMatrix};
use rotsys_core::{Catalog, Class, FlagBasis, RotationSystem, SdpProblem, TypeConfig};
use sha2::{Digest, Sha256};

use crate::formats::{read_catalog, read_q, write_catalog, write_q, QHeader};

pub const CHUNK: usize = 1024;

pub fn cache_dir() -> PathBuf {
    std::env::var_os("ROTSYS_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".rotsys-cache"))
}

/// Writes through a temporary file and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let tmp = path.with_extension("partial");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?);
        fill(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let mut f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = std::io::Read::read(&mut f, &mut buf)?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex::encode(h.finalize()))
}

pub fn read_catalog_file(path: &Path) -> anyhow::Result<Catalog> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_catalog(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

pub fn write_catalog_file(path: &Path, cat: &Catalog) -> anyhow::Result<()> {
    write_atomic(path, |w| write_catalog(w, cat))
}

/// The complete catalog, read from `dir` if cached there and otherwise
/// built (from the largest cached smaller catalog) and stored.
pub fn catalog(dir: Option<&Path>, class: Class, n: usize) -> anyhow::Result<Catalog> {
    if n <= 5 {
        return Ok(rotsys_core::catalog::base_catalog(class, n)?);
    }
    let Some(dir) = dir else {
        return Ok(crate::parallel::catalog(class, n)?);
    };
    let path = dir.join(format!("catalog-{class}-{n}.txt"));
    if path.exists() {
        let cat = read_catalog_file(&path)?;
        if cat.class() != class || cat.n() != n {
            bail!("{} holds a {} catalog on {} vertices", path.display(), cat.class(), cat.n());
        }
        return Ok(cat);
    }
    let smaller = catalog(Some(dir), class, n - 1)?;
    let cat = crate::parallel::extend(&smaller)?;
    write_catalog_file(&path, &cat)?;
    Ok(cat)
}

/// Flag bases for `config`, taking the small catalogs from the cache.
pub fn flag_bases(dir: Option<&Path>, class: Class, config: &TypeConfig) -> anyhow::Result<Vec<FlagBasis>> {
    let mut cats = std::collections::HashMap::new();
    for t in &config.types {
        if !cats.contains_key(&t.flag_size) {
            cats.insert(t.flag_size, catalog(dir, class, t.flag_size)?);
        }
    }
    Ok(enumerate_bases(config, class, |l| Ok(cats[&l].clone()))?)
}

/// Digest of everything the pair-density matrices depend on.
pub fn problem_digest(cat: &Catalog, config: &TypeConfig) -> String {
    let mut h = Sha256::new();
    h.update(format!("{} {} {}\n", cat.class(), cat.n(), config.descriptor()));
    for r in cat.systems() {
        h.update(r.to_line());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

fn chunk_blocks(cat: &Catalog, bases: &[FlagBasis], start: usize, end: usize) -> rotsys_core::Result<Vec<Vec<PairDensityMatrix>>> {
    let systems: Vec<&RotationSystem> = cat.systems().skip(start).take(end - start).collect();
    systems.par_iter().map(|r| pair_density_matrices(bases, r)).collect()
}

/// Assembles the problem, loading finished Q chunks from `qdir` and
/// computing (and storing) the rest.
pub fn problem(cat: &Catalog, config: &TypeConfig, bases: Vec<FlagBasis>, qdir: Option<&Path>) -> anyhow::Result<SdpProblem> {
    let Some(root) = qdir else {
        return Ok(crate::parallel::assemble(cat, config, bases)?);
    };
    let digest = problem_digest(cat, config);
    let dir = root.join(format!("q-{}-N{}-{}", cat.class(), cat.n(), &digest[..16]));
    let mut blocks: Vec<Vec<PairDensityMatrix>> = Vec::with_capacity(cat.len());
    for (k, start) in (0..cat.len()).step_by(CHUNK).enumerate() {
        let end = (start + CHUNK).min(cat.len());
        let path = dir.join(format!("chunk-{k:05}.txt"));
        let chunk = if path.exists() {
            load_chunk(&path, cat, &bases, start, end)?
        } else {
            let chunk = chunk_blocks(cat, &bases, start, end)?;
            write_atomic(&path, |w| {
                for (off, row) in chunk.iter().enumerate() {
                    for (i, q) in row.iter().enumerate() {
                        let h = QHeader {
                            class: cat.class(),
                            n: cat.n(),
                            type_index: i,
                            target: start + off,
                        };
                        write_q(w, &h, q)?;
                    }
                }
                Ok(())
            })?;
            chunk
        };
        blocks.extend(chunk);
    }
    let objective = crate::parallel::objective(cat);
    Ok(SdpProblem::from_parts(cat, config.clone(), bases, objective, blocks)?)
}

fn load_chunk(path: &Path, cat: &Catalog, bases: &[FlagBasis], start: usize, end: usize) -> anyhow::Result<Vec<Vec<PairDensityMatrix>>> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let sections = read_q(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))?;
    if sections.len() != (end - start) * bases.len() {
        bail!("{}: expected {} matrices, found {}", path.display(), (end - start) * bases.len(), sections.len());
    }
    let mut it = sections.into_iter();
    let mut out = Vec::with_capacity(end - start);
    for target in start..end {
        let mut row = Vec::with_capacity(bases.len());
        for (i, b) in bases.iter().enumerate() {
            let (h, q) = it.next().expect("count checked");
            let want = QHeader {
                class: cat.class(),
                n: cat.n(),
                type_index: i,
                target,
            };
            if h != want || q.dim() != b.len() {
                bail!("{}: matrix for type {} target {} is out of place", path.display(), h.type_index, h.target);
            }
            row.push(q);
        }
        out.push(row);
    }
    Ok(out)
}
