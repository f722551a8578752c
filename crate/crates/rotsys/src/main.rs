use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use rotsys::cache::{self, write_atomic};
use rotsys::formats::{read_certificate, write_catalog, write_certificate, write_flags};
use rotsys::pipeline::{run_pipeline, PipelineConfig, DEFAULT_DENOM_BOUND};
use rotsys::sdpa::{certificate_from_factors, export_sdpa, import_solution, read_identity, read_sdpa, round_solution};
use rotsys::stats::CatalogStats;
use rotsys_core::crossing::{density_to_hill_ratio, CrossingSummary};
use rotsys_core::rational::{format_rational, parse_rational, to_decimal_truncated};
use rotsys_core::{Class, Error, RotationSystem, TypeConfig};

#[derive(Parser)]
#[command(name = "rotsys", version, about = "Rotation systems of K_n and flag-algebra bounds on non-crossing K4 density")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Do not read or write the cache directory.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the complete catalog of a class on n vertices.
    Enumerate {
        #[arg(long)]
        class: Class,
        #[arg(long)]
        n: usize,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counts, crossing histogram and density extremes of a catalog.
    Stats {
        #[arg(long)]
        catalog: PathBuf,
    },
    /// Crossing summary of one system given in line format.
    Crossings { system: String },
    /// Enumerate the flag bases of a type configuration.
    Flags {
        #[arg(long)]
        class: Class,
        /// `reduced`, `full`, or a descriptor `<type>@<size> ...`.
        #[arg(long, default_value = "reduced")]
        types: String,
        /// Directory for `flags-<i>.txt` files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    #[command(subcommand)]
    Sdp(SdpCmd),
    /// Exactly verify a certificate against a catalog.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        /// Reuse (and fill) pair-density chunks under this directory.
        #[arg(long)]
        q_cache: Option<PathBuf>,
    },
    /// Asymptotic crossing ratio cr(K_n)/H(n) implied by a density bound.
    Bound { density: String },
    /// Run every stage from a key=value config file.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum SdpCmd {
    /// Write the SDP in SDPA sparse format.
    Export {
        #[arg(long)]
        class: Class,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "reduced")]
        types: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a solver solution and report its shape.
    Import {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Round a solver solution to an exact certificate.
    Round {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DENOM_BOUND)]
        denom_bound: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    (!cli.no_cache).then(cache::cache_dir)
}

fn open(path: &Path) -> anyhow::Result<BufReader<fs::File>> {
    Ok(BufReader::new(fs::File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn problem(cli: &Cli, class: Class, n: usize, types: &TypeConfig) -> anyhow::Result<rotsys_core::SdpProblem> {
    let dir = cache_dir(cli);
    let cat = cache::catalog(dir.as_deref(), class, n)?;
    let bases = cache::flag_bases(dir.as_deref(), class, types)?;
    cache::problem(&cat, types, bases, dir.as_deref())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Cmd::Enumerate { class, n, out: path } => {
            let cat = cache::catalog(cache_dir(cli).as_deref(), *class, *n)?;
            match path {
                Some(p) => cache::write_catalog_file(p, &cat)?,
                None => write_catalog(&mut out, &cat)?,
            }
            eprintln!("{} {} systems on {} vertices", cat.len(), cat.class(), cat.n());
        }
        Cmd::Stats { catalog } => {
            let cat = cache::read_catalog_file(catalog)?;
            writeln!(out, "{}", CatalogStats::of(&cat)?)?;
        }
        Cmd::Crossings { system } => {
            let r = RotationSystem::parse_line(system)?;
            let s = CrossingSummary::of(&r)?;
            writeln!(out, "crossings: {}", s.crossing_count)?;
            writeln!(out, "density(N4): {}", format_rational(&s.noncrossing_k4_density))?;
            writeln!(out, "H({}): {}", s.n, s.hill_value)?;
            if let Some(ratio) = &s.ratio_to_hill {
                writeln!(out, "crossings/H: {}", format_rational(ratio))?;
            }
        }
        Cmd::Flags { class, types, out_dir } => {
            let config = TypeConfig::named(types, *class)?;
            let bases = cache::flag_bases(cache_dir(cli).as_deref(), *class, &config)?;
            let mut total = 0;
            let mut vars = 0;
            for (i, b) in bases.iter().enumerate() {
                writeln!(out, "type {i} {}: {} flags", b.spec(), b.len())?;
                total += b.len();
                vars += b.len() * (b.len() + 1) / 2;
                if let Some(dir) = out_dir {
                    write_atomic(&dir.join(format!("flags-{i}.txt")), |w| write_flags(w, b, i))?;
                }
            }
            writeln!(out, "total: {total} flags, {vars} matrix entries")?;
        }
        Cmd::Sdp(SdpCmd::Export { class, n, types, out: path }) => {
            let config = TypeConfig::named(types, *class)?;
            let prob = problem(cli, *class, *n, &config)?;
            write_atomic(path, |w| export_sdpa(w, &prob))?;
            writeln!(out, "{} constraints, blocks {:?}", prob.len(), prob.dims())?;
        }
        Cmd::Sdp(SdpCmd::Import { problem, solution }) => {
            let sdpa = read_sdpa(open(problem)?)?;
            let sol = import_solution(open(solution)?, &sdpa.type_dims(), sdpa.constraints)?;
            writeln!(out, "blocks: {:?}", sdpa.type_dims())?;
            writeln!(out, "objective: {}", sol.objective)?;
            writeln!(out, "max asymmetry: {:e}", sol.max_asymmetry)?;
        }
        Cmd::Sdp(SdpCmd::Round {
            problem: path,
            solution,
            denom_bound,
            out: cert_path,
        }) => {
            let (class, n, config) = read_identity(open(path)?)?;
            let prob = problem(cli, class, n, &config)?;
            let sol = import_solution(open(solution)?, &prob.dims(), prob.len())?;
            let rounded = round_solution(&sol, *denom_bound)?;
            let worst = rounded.iter().map(|r| r.proximity).fold(0.0, f64::max);
            let cert = certificate_from_factors(&prob, rounded.into_iter().map(|r| r.factorization).collect())?;
            write_atomic(cert_path, |w| write_certificate(w, &cert))?;
            writeln!(out, "rounding error (max entry): {worst:e}")?;
            writeln!(out, "bound: {}", format_rational(&cert.bound))?;
            writeln!(out, "bound (decimal): {}", to_decimal_truncated(&cert.bound, 9))?;
        }
        Cmd::Verify {
            certificate,
            catalog,
            q_cache,
        } => {
            let cert = read_certificate(open(certificate)?)?;
            let cat = cache::read_catalog_file(catalog)?;
            if cat.class() != cert.class || cat.n() != cert.n {
                bail!(
                    "certificate is for {} systems on {} vertices, catalog is {} on {}",
                    cert.class,
                    cert.n,
                    cat.class(),
                    cat.n()
                );
            }
            let bases = cache::flag_bases(cache_dir(cli).as_deref(), cert.class, &cert.config)?;
            let prob = cache::problem(&cat, &cert.config, bases, q_cache.as_deref())?;
            let v = rotsys::parallel::verify(&cert, &prob)?;
            writeln!(out, "certified bound: {}", format_rational(&v.bound))?;
            writeln!(out, "certified bound (decimal): {}", to_decimal_truncated(&v.bound, 9))?;
            writeln!(out, "attained at catalog entry {}", v.witness)?;
            writeln!(out, "claimed bound: {}", format_rational(&v.claimed))?;
            let ratio = v.crossing_ratio()?;
            writeln!(out, "cr(K_n)/H(n) asymptotically >= {}", to_decimal_truncated(&ratio, 9))?;
        }
        Cmd::Bound { density } => {
            let d = parse_rational(density)?;
            let r = density_to_hill_ratio(&d)?;
            writeln!(out, "ratio: {}", format_rational(&r))?;
            writeln!(out, "ratio (decimal): {}", to_decimal_truncated(&r, 9))?;
        }
        Cmd::Pipeline { config } => {
            let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = PipelineConfig::parse(&text)?;
            let m = run_pipeline(&cfg)?;
            writeln!(out, "run directory: {}", m.run_dir.display())?;
            writeln!(out, "certified bound: {}", format_rational(&m.bound.bound))?;
            writeln!(out, "certified bound (decimal): {}", to_decimal_truncated(&m.bound.bound, 9))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(Error::VerificationFailed { .. }) = e.downcast_ref::<Error>() {
                eprintln!("verification failed: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::FAILURE
        }
    }
}
