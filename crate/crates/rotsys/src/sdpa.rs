//! SDPA sparse export, solver-solution import and rounding to exact `UᵀDU`
//! factors.
//!
//! The exported program is in the SDPA primal-matrix form
//! `max <F0, Y> s.t. <F_R, Y> = c_R, Y ⪰ 0` with
//! `Y = diag(M_1, ..., M_t, diag(s, λ⁺, λ⁻))`:
//! every target `R` contributes `Σ_i <Q_iR, M_i> + s_R - λ⁺ + λ⁻ = -p(N4, R)`
//! and the objective is `-(λ⁺ - λ⁻)`. A solution file lists `Y` in the
//! CSDP layout: the dual vector on the first line, then
//! `matno block i j value` lines with `matno = 2` for `Y`.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use rayon::prelude::*;
use rotsys_core::certificate::{Certificate, Factorization};
use rotsys_core::rational::to_f64;
use rotsys_core::{Class, Rational, SdpProblem, TypeConfig};

use crate::formats::FormatError;

type Result<T, E = FormatError> = std::result::Result<T, E>;

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `prob` in SDPA sparse format. Targets keep catalog order, types
/// ascend, and matrix entries run row-major over the upper triangle.
pub fn export_sdpa(w: &mut (impl Write + ?Sized), prob: &SdpProblem) -> std::io::Result<()> {
    let t = prob.bases().len();
    let m = prob.len();
    let diag = t + 1;
    let (lp, lm) = (m + 1, m + 2);
    writeln!(
        w,
        "\"rotsys class={} N={} config={}",
        prob.class(),
        prob.n(),
        prob.config().descriptor()
    )?;
    writeln!(w, "{m}")?;
    writeln!(w, "{}", t + 1)?;
    let blocks: Vec<String> = prob
        .dims()
        .iter()
        .map(|d| d.to_string())
        .chain(std::iter::once(format!("-{}", m + 2)))
        .collect();
    writeln!(w, "{}", blocks.join(" "))?;
    let c: Vec<String> = prob.objective().iter().map(|b| num(-to_f64(b))).collect();
    writeln!(w, "{}", c.join(" "))?;
    writeln!(w, "0 {diag} {lp} {lp} {}", num(-1.0))?;
    writeln!(w, "0 {diag} {lm} {lm} {}", num(1.0))?;
    for r in 0..m {
        let k = r + 1;
        for (i, q) in prob.blocks(r).iter().enumerate() {
            for &(a, b, _) in q.entries() {
                let v = to_f64(&q.get(a as usize, b as usize));
                writeln!(w, "{k} {} {} {} {}", i + 1, a + 1, b + 1, num(v))?;
            }
        }
        writeln!(w, "{k} {diag} {k} {k} {}", num(1.0))?;
        writeln!(w, "{k} {diag} {lp} {lp} {}", num(-1.0))?;
        writeln!(w, "{k} {diag} {lm} {lm} {}", num(1.0))?;
    }
    Ok(())
}

/// Reads back the class, target size and type configuration from the
/// comment line written by [`export_sdpa`].
pub fn read_identity(r: impl BufRead) -> Result<(Class, usize, TypeConfig)> {
    let first = r.lines().next().transpose()?.unwrap_or_default();
    let rest = first
        .strip_prefix("\"rotsys ")
        .ok_or_else(|| syntax(1, "not a problem exported by rotsys"))?;
    let (head, config) = rest
        .split_once(" config=")
        .ok_or_else(|| syntax(1, "problem comment lacks `config=`"))?;
    let mut class = None;
    let mut n = None;
    for w in head.split_whitespace() {
        match w.split_once('=') {
            Some(("class", c)) => class = c.parse::<Class>().ok(),
            Some(("N", v)) => n = v.parse::<usize>().ok(),
            _ => {}
        }
    }
    let (Some(class), Some(n)) = (class, n) else {
        return Err(syntax(1, "problem comment lacks class or N"));
    };
    Ok((class, n, TypeConfig::parse_descriptor(config)?))
}

/// A parsed SDPA sparse file.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaFile {
    pub constraints: usize,
    /// Positive for symmetric blocks, negative for diagonal blocks.
    pub blocks: Vec<i64>,
    pub c: Vec<f64>,
    /// `(matno, block, i, j, value)`, all 1-based as in the file.
    pub entries: Vec<(usize, usize, usize, usize, f64)>,
}

impl SdpaFile {
    /// Sizes of the leading symmetric blocks (the flag types).
    pub fn type_dims(&self) -> Vec<usize> {
        self.blocks.iter().take_while(|&&b| b > 0).map(|&b| b as usize).collect()
    }
}

pub fn read_sdpa(r: impl BufRead) -> Result<SdpaFile> {
    // Numbers may be separated by spaces, commas, braces or parentheses.
    let mut tokens_by_line: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, l) in r.lines().enumerate() {
        let l = l?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('"') || t.starts_with('*') {
            continue;
        }
        let toks: Vec<String> = t
            .split(|c: char| c.is_whitespace() || "{}(),".contains(c))
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        tokens_by_line.push((i + 1, toks));
    }
    let mut it = tokens_by_line.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| syntax(0, format!("unexpected end of file, expected {what}")));
    let (ln, t) = next("constraint count")?;
    let constraints: usize = t.first().and_then(|s| s.parse().ok()).ok_or_else(|| syntax(ln, "bad constraint count"))?;
    let (ln, t) = next("block count")?;
    let nblocks: usize = t.first().and_then(|s| s.parse().ok()).ok_or_else(|| syntax(ln, "bad block count"))?;
    let (ln, t) = next("block structure")?;
    let blocks: Vec<i64> = t
        .iter()
        .take(nblocks)
        .map(|s| s.parse().map_err(|_| syntax(ln, format!("bad block size `{s}`"))))
        .collect::<Result<_>>()?;
    if blocks.len() != nblocks || blocks.contains(&0) {
        return Err(syntax(ln, "block structure does not match the block count"));
    }
    let (ln, t) = next("objective vector")?;
    let c: Vec<f64> = t
        .iter()
        .map(|s| s.parse().map_err(|_| syntax(ln, format!("bad number `{s}`"))))
        .collect::<Result<_>>()?;
    if c.len() != constraints {
        return Err(syntax(ln, format!("expected {constraints} objective values, found {}", c.len())));
    }
    let mut entries = Vec::new();
    for (ln, t) in it {
        let [matno, blk, i, j, v] = &t[..] else {
            return Err(syntax(ln, "expected `matno block i j value`"));
        };
        let p = |s: &String| s.parse::<usize>().map_err(|_| syntax(ln, format!("bad index `{s}`")));
        let (matno, blk, i, j) = (p(matno)?, p(blk)?, p(i)?, p(j)?);
        let v: f64 = v.parse().map_err(|_| syntax(ln, format!("bad number `{v}`")))?;
        let size = blocks.get(blk.wrapping_sub(1)).ok_or_else(|| syntax(ln, "block index out of range"))?;
        if matno > constraints || i == 0 || j == 0 || i.max(j) as u64 > size.unsigned_abs() || (*size < 0 && i != j) {
            return Err(syntax(ln, "entry index out of range"));
        }
        entries.push((matno, blk, i, j, v));
    }
    Ok(SdpaFile {
        constraints,
        blocks,
        c,
        entries,
    })
}

/// Floating point multiplier matrices read back from a solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverSolution {
    pub matrices: Vec<DMatrix<f64>>,
    /// `λ⁺ - λ⁻` as reported.
    pub objective: f64,
    /// Largest `|Y_ij - Y_ji|` among pairs given both ways.
    pub max_asymmetry: f64,
}

/// Reads a CSDP-layout solution for a problem whose type blocks have sizes
/// `dims` and which has `targets` constraints.
pub fn import_solution(r: impl BufRead, dims: &[usize], targets: usize) -> Result<SolverSolution> {
    let mut lines = r.lines().enumerate();
    let mut matrices: Vec<DMatrix<f64>> = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    let mut seen: Vec<DMatrix<u8>> = dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
    let (mut lp, mut lm) = (0.0, 0.0);
    let mut max_asymmetry: f64 = 0.0;
    let y_line = loop {
        match lines.next() {
            Some((i, l)) => {
                let l = l?;
                if !l.trim().is_empty() {
                    break (i + 1, l);
                }
            }
            None => return Err(syntax(1, "empty solution file")),
        }
    };
    let y_count = y_line.1.split_whitespace().count();
    if y_count != targets {
        return Err(syntax(y_line.0, format!("expected {targets} dual values, found {y_count}")));
    }
    for (i, l) in lines {
        let ln = i + 1;
        let l = l?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.is_empty() {
            continue;
        }
        let [matno, blk, a, b, v] = t[..] else {
            return Err(syntax(ln, "expected `matno block i j value`"));
        };
        let p = |s: &str| s.parse::<usize>().map_err(|_| syntax(ln, format!("bad index `{s}`")));
        let (matno, blk, a, b) = (p(matno)?, p(blk)?, p(a)?, p(b)?);
        let v: f64 = v.parse().map_err(|_| syntax(ln, format!("bad number `{v}`")))?;
        if !v.is_finite() {
            return Err(syntax(ln, "non-finite value"));
        }
        match matno {
            1 => continue,
            2 => {}
            _ => return Err(syntax(ln, format!("unknown matrix number {matno}"))),
        }
        if blk == dims.len() + 1 {
            if a != b || a == 0 || a > targets + 2 {
                return Err(syntax(ln, "bad diagonal-block entry"));
            }
            if a == targets + 1 {
                lp = v;
            } else if a == targets + 2 {
                lm = v;
            }
            continue;
        }
        let d = *dims.get(blk.wrapping_sub(1)).ok_or_else(|| syntax(ln, format!("block {blk} out of range")))?;
        if a == 0 || b == 0 || a > d || b > d {
            return Err(syntax(ln, format!("entry ({a}, {b}) outside a {d}x{d} block")));
        }
        let (m, s) = (&mut matrices[blk - 1], &mut seen[blk - 1]);
        let (a, b) = (a - 1, b - 1);
        if a != b && s[(b, a)] == 1 {
            max_asymmetry = max_asymmetry.max((m[(b, a)] - v).abs());
        }
        m[(a, b)] = v;
        s[(a, b)] = 1;
        if s[(b, a)] == 0 {
            m[(b, a)] = v;
        }
    }
    Ok(SolverSolution {
        matrices,
        objective: lp - lm,
        max_asymmetry,
    })
}

/// Writes a solution in the layout [`import_solution`] reads (matrix 2 only,
/// upper triangle, zero dual vector).
pub fn write_solution(w: &mut (impl Write + ?Sized), sol: &SolverSolution, targets: usize) -> std::io::Result<()> {
    writeln!(w, "{}", vec!["0"; targets].join(" "))?;
    for (i, m) in sol.matrices.iter().enumerate() {
        for a in 0..m.nrows() {
            for b in a..m.ncols() {
                if m[(a, b)] != 0.0 {
                    writeln!(w, "2 {} {} {} {}", i + 1, a + 1, b + 1, num(m[(a, b)]))?;
                }
            }
        }
    }
    let diag = sol.matrices.len() + 1;
    let (lp, lm) = if sol.objective >= 0.0 { (sol.objective, 0.0) } else { (0.0, -sol.objective) };
    writeln!(w, "2 {diag} {0} {0} {1}", targets + 1, num(lp))?;
    writeln!(w, "2 {diag} {0} {0} {1}", targets + 2, num(lm))
}

#[derive(Debug, thiserror::Error)]
pub enum RoundError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not square")]
    NotSquare,
    #[error("denominator bound must be a power of two, got {0}")]
    BadDenominator(u64),
}

/// A rounded factorization and its distance `max |UᵀDU - M̃|` to the input.
#[derive(Clone, Debug)]
pub struct Rounded {
    pub factorization: Factorization,
    pub proximity: f64,
}

/// Spectral rounding: `M̃ ≈ V Λ Vᵀ`, `U = Vᵀ` and `D = max(Λ, 0)`, each
/// entry rounded to the nearest multiple of `1/denom_bound`.
pub fn round_psd(m: &DMatrix<f64>, denom_bound: u64) -> Result<Rounded, RoundError> {
    if !denom_bound.is_power_of_two() {
        return Err(RoundError::BadDenominator(denom_bound));
    }
    if m.nrows() != m.ncols() {
        return Err(RoundError::NotSquare);
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(RoundError::NonFinite);
    }
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = denom_bound as f64;
    let den = BigInt::from(denom_bound);
    let round = |x: f64| -> (f64, Rational) {
        let k = (x * scale).round();
        (k / scale, Rational::new(BigInt::from(k as i128), den.clone()))
    };
    let mut uf = DMatrix::zeros(n, n);
    let mut u = Vec::with_capacity(n);
    let mut df = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = Vec::with_capacity(n);
        for a in 0..n {
            let (f, r) = round(eig.eigenvectors[(a, k)]);
            uf[(k, a)] = f;
            row.push(r);
        }
        u.push(row);
        let (f, r) = round(eig.eigenvalues[k].max(0.0));
        df.push(f);
        d.push(r);
    }
    let recon = uf.transpose() * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(df)) * &uf;
    let proximity = (recon - m).abs().max();
    let factorization = Factorization::new(u, d).expect("square with nonnegative diagonal");
    Ok(Rounded {
        factorization,
        proximity,
    })
}

/// Rounds every type block in parallel.
pub fn round_solution(sol: &SolverSolution, denom_bound: u64) -> Result<Vec<Rounded>, RoundError> {
    sol.matrices.par_iter().map(|m| round_psd(m, denom_bound)).collect()
}

/// A certificate for `prob` from rounded factors, claiming exactly the
/// bound they achieve.
pub fn certificate_from_factors(prob: &SdpProblem, factors: Vec<Factorization>) -> rotsys_core::Result<Certificate> {
    let mut cert = Certificate {
        class: prob.class(),
        n: prob.n(),
        config: prob.config().clone(),
        factors,
        bound: Rational::from_integer(1.into()),
    };
    let values = crate::parallel::target_values(&cert, prob)?;
    cert.bound = values.into_iter().max().expect("nonempty catalog");
    Ok(cert)
}
