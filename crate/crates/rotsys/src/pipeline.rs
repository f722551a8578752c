//! The end-to-end run: catalog, flags, SDP export, external solve, rounding,
//! exact verification and the final bound, with every stage output kept in a
//! run directory named by the configuration digest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use rotsys_core::rational::{format_rational, to_decimal_truncated};
use rotsys_core::{Class, Rational, TypeConfig, VerifiedBound};
use sha2::{Digest, Sha256};

use crate::cache::{self, sha256_file, write_atomic};
use crate::formats::{read_certificate, write_certificate, write_flags};
use crate::sdpa::{certificate_from_factors, export_sdpa, import_solution, round_solution};

pub const DEFAULT_DENOM_BOUND: u64 = 1 << 32;

/// A pipeline configuration, read from flat `key = value` text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub class: Class,
    pub n: usize,
    pub types: TypeConfig,
    /// Shell command with `{in}` and `{out}` placeholders.
    pub solver: Option<String>,
    pub denom_bound: u64,
    /// Parent of the run directory; the cache directory when unset.
    pub run_root: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value", i + 1))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                bail!("config line {}: duplicate key `{}`", i + 1, k.trim());
            }
        }
        let mut take = |k: &str| kv.remove(k);
        let class: Class = take("class")
            .ok_or_else(|| anyhow!("config lacks `class`"))?
            .parse()?;
        let n: usize = take("n")
            .ok_or_else(|| anyhow!("config lacks `n`"))?
            .parse()
            .context("bad `n`")?;
        let types = TypeConfig::named(&take("types").unwrap_or_else(|| "reduced".into()), class)?;
        let solver = take("solver").filter(|s| !s.is_empty());
        let denom_bound = match take("denom_bound") {
            Some(s) => s.parse().context("bad `denom_bound`")?,
            None => DEFAULT_DENOM_BOUND,
        };
        let run_root = take("run_root").map(PathBuf::from);
        if let Some(k) = kv.keys().next() {
            bail!("unknown config key `{k}`");
        }
        if types.required_size() > n {
            bail!("the type configuration needs n >= {}", types.required_size());
        }
        Ok(PipelineConfig {
            class,
            n,
            types,
            solver,
            denom_bound,
            run_root,
        })
    }

    /// Digest of the settings that determine the certificate.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!(
            "class={}\nn={}\ntypes={}\ndenom_bound={}\n",
            self.class,
            self.n,
            self.types.descriptor(),
            self.denom_bound
        ));
        hex::encode(h.finalize())
    }

    pub fn run_dir(&self) -> PathBuf {
        let root = self.run_root.clone().unwrap_or_else(|| cache::cache_dir().join("runs"));
        root.join(format!("{}-N{}-{}", self.class, self.n, &self.digest()[..16]))
    }
}

/// What a finished run records about itself.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub run_dir: PathBuf,
    pub bound: VerifiedBound,
    pub crossing_ratio: Rational,
    pub files: Vec<(String, String)>,
    pub timings: Vec<(String, f64)>,
}

fn stage<T>(name: &str, timings: &mut Vec<(String, f64)>, f: impl FnOnce() -> anyhow::Result<T>) -> anyhow::Result<T> {
    let t = Instant::now();
    let out = f().with_context(|| format!("stage `{name}` failed"))?;
    timings.push((name.to_string(), t.elapsed().as_secs_f64()));
    Ok(out)
}

/// Runs (or resumes) the pipeline. Stages whose outputs already exist in the
/// run directory are not redone, except verification, which always runs.
pub fn run_pipeline(cfg: &PipelineConfig) -> anyhow::Result<RunManifest> {
    let dir = cfg.run_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let cache_dir = cache::cache_dir();
    let mut timings = Vec::new();

    let cat = stage("catalog", &mut timings, || {
        let path = dir.join("catalog.txt");
        if path.exists() {
            return cache::read_catalog_file(&path);
        }
        let cat = cache::catalog(Some(&cache_dir), cfg.class, cfg.n)?;
        cache::write_catalog_file(&path, &cat)?;
        Ok(cat)
    })?;

    let bases = stage("flags", &mut timings, || {
        let bases = cache::flag_bases(Some(&cache_dir), cfg.class, &cfg.types)?;
        for (i, b) in bases.iter().enumerate() {
            let path = dir.join(format!("flags-{i}.txt"));
            if !path.exists() {
                write_atomic(&path, |w| write_flags(w, b, i))?;
            }
        }
        Ok(bases)
    })?;

    let problem = stage("pair-densities", &mut timings, || {
        cache::problem(&cat, &cfg.types, bases, Some(&cache_dir))
    })?;

    let export = dir.join("problem.dat-s");
    stage("export", &mut timings, || {
        if !export.exists() {
            write_atomic(&export, |w| export_sdpa(w, &problem))?;
        }
        Ok(())
    })?;

    let solution = dir.join("solution.out");
    stage("solve", &mut timings, || {
        if solution.exists() {
            return Ok(());
        }
        let template = cfg
            .solver
            .as_deref()
            .ok_or_else(|| anyhow!("no solver configured and no {} present", solution.display()))?;
        run_solver(template, &export, &solution)
    })?;

    let cert_path = dir.join("certificate.txt");
    stage("round", &mut timings, || {
        if cert_path.exists() {
            return Ok(());
        }
        let f = fs::File::open(&solution)?;
        let sol = import_solution(BufReader::new(f), &problem.dims(), problem.len())
            .with_context(|| format!("reading {}", solution.display()))?;
        let rounded = round_solution(&sol, cfg.denom_bound)?;
        let cert = certificate_from_factors(&problem, rounded.into_iter().map(|r| r.factorization).collect())?;
        write_atomic(&cert_path, |w| write_certificate(w, &cert))
    })?;

    let bound = stage("verify", &mut timings, || {
        let f = fs::File::open(&cert_path)?;
        let cert = read_certificate(BufReader::new(f))?;
        Ok(crate::parallel::verify(&cert, &problem)?)
    })?;
    let crossing_ratio = bound.crossing_ratio()?;

    let mut files = Vec::new();
    for name in ["catalog.txt", "problem.dat-s", "solution.out", "certificate.txt"] {
        files.push((name.to_string(), sha256_file(&dir.join(name))?));
    }
    for i in 0..cfg.types.types.len() {
        let name = format!("flags-{i}.txt");
        files.push((name.clone(), sha256_file(&dir.join(&name))?));
    }
    let manifest = RunManifest {
        run_dir: dir.clone(),
        bound,
        crossing_ratio,
        files,
        timings,
    };
    let text = manifest_text(cfg, &manifest);
    write_atomic(&dir.join("manifest.txt"), |w| w.write_all(text.as_bytes()))?;
    Ok(manifest)
}

fn run_solver(template: &str, input: &Path, output: &Path) -> anyhow::Result<()> {
    let cmd = template
        .replace("{in}", &input.display().to_string())
        .replace("{out}", &output.display().to_string());
    let status = Command::new("sh")
        .arg("-c")
        .arg(&cmd)
        .status()
        .with_context(|| format!("running `{cmd}`"))?;
    if !status.success() {
        bail!("solver command `{cmd}` exited with {status}");
    }
    if !output.exists() {
        bail!("solver command `{cmd}` did not write {}", output.display());
    }
    Ok(())
}

/// Deterministic fields first; timings last.
pub fn manifest_text(cfg: &PipelineConfig, m: &RunManifest) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rotsys-manifest v1");
    let _ = writeln!(s, "tool_version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "class={}", cfg.class);
    let _ = writeln!(s, "n={}", cfg.n);
    let _ = writeln!(s, "types={}", cfg.types.descriptor());
    let _ = writeln!(s, "denom_bound={}", cfg.denom_bound);
    for (name, digest) in &m.files {
        let _ = writeln!(s, "sha256 {name}={digest}");
    }
    let _ = writeln!(s, "bound={}", format_rational(&m.bound.bound));
    let _ = writeln!(s, "bound_decimal={}", to_decimal_truncated(&m.bound.bound, 9));
    let _ = writeln!(s, "witness={}", m.bound.witness);
    let _ = writeln!(s, "crossing_ratio_decimal={}", to_decimal_truncated(&m.crossing_ratio, 9));
    for (name, secs) in &m.timings {
        let _ = writeln!(s, "seconds {name}={secs:.3}");
    }
    s
}

/// Checks every digest recorded in a manifest against the files on disk.
pub fn check_manifest(run_dir: &Path) -> anyhow::Result<()> {
    let text = fs::read_to_string(run_dir.join("manifest.txt"))?;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("sha256 ") {
            let (name, digest) = rest.split_once('=').ok_or_else(|| anyhow!("bad manifest line `{line}`"))?;
            let actual = sha256_file(&run_dir.join(name))?;
            if actual != digest {
                bail!("{name} changed since the manifest was written");
            }
        }
    }
    Ok(())
}
