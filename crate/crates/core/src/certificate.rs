//! Rational certificates `M_i = U_iᵀ D_i U_i` and their exact verification.
//!
//! A certificate proves `lim d(N4) <= A*` where
//! `A* = max_R (p(N4, R) + Σ_i <M_i, Q_iR>)`. Nonnegativity of `D_i` makes
//! every `M_i` PSD by construction. The claimed bound stored in a certificate
//! is only compared against, never reported without recomputation.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::catalog::Class;
use crate::crossing::density_to_hill_ratio;
use crate::error::{Error, Result};
use crate::flag::TypeConfig;
use crate::pair_density::PairDensityMatrix;
use crate::rational::{scale_to_integers, Rational};
use crate::sdp::SdpProblem;

/// `M = Uᵀ D U` with `U` square and `D` a nonnegative diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    u: Vec<Vec<Rational>>,
    d: Vec<Rational>,
}

impl Factorization {
    pub fn new(u: Vec<Vec<Rational>>, d: Vec<Rational>) -> Result<Self> {
        let dim = d.len();
        if u.len() != dim || u.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidCertificate(alloc::format!("U is not a {dim}x{dim} matrix")));
        }
        if let Some(k) = d.iter().position(|x| x.is_negative()) {
            return Err(Error::InvalidCertificate(alloc::format!(
                "diagonal entry {k} is negative"
            )));
        }
        Ok(Factorization { u, d })
    }

    pub fn zero(dim: usize) -> Self {
        let z = Rational::zero();
        Factorization {
            u: alloc::vec![alloc::vec![z.clone(); dim]; dim],
            d: alloc::vec![z; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn u(&self) -> &[Vec<Rational>] {
        &self.u
    }

    pub fn d(&self) -> &[Rational] {
        &self.d
    }

    /// `Uᵀ D U` as a dense rational matrix.
    pub fn to_matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        let mut m = alloc::vec![alloc::vec![Rational::zero(); n]; n];
        for (k, row) in self.u.iter().enumerate() {
            if self.d[k].is_zero() {
                continue;
            }
            for a in 0..n {
                if row[a].is_zero() {
                    continue;
                }
                let da = &self.d[k] * &row[a];
                for b in 0..n {
                    m[a][b] += &da * &row[b];
                }
            }
        }
        m
    }

    /// `<Uᵀ D U, Q> = Σ_k D_k (U Q Uᵀ)_kk`, without forming `M`.
    pub fn pairing_factorized(&self, q: &PairDensityMatrix) -> Rational {
        let mut total = Rational::zero();
        for (k, row) in self.u.iter().enumerate() {
            if self.d[k].is_zero() {
                continue;
            }
            let mut quad = Rational::zero();
            for &(a, b, _) in q.entries() {
                let (a, b) = (a as usize, b as usize);
                let term = q.get(a, b) * &row[a] * &row[b];
                quad += if a == b { term } else { &term + &term };
            }
            total += &self.d[k] * quad;
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub class: Class,
    pub n: usize,
    pub config: TypeConfig,
    pub factors: Vec<Factorization>,
    pub bound: Rational,
}

/// The outcome of a successful verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedBound {
    /// The recomputed `A*`.
    pub bound: Rational,
    /// A target attaining `A*`.
    pub witness: usize,
    /// The bound stated in the certificate, at least `bound`.
    pub claimed: Rational,
}

impl VerifiedBound {
    /// `cr(K_n)/H(n)` asymptotically at least this value.
    pub fn crossing_ratio(&self) -> Result<Rational> {
        density_to_hill_ratio(&self.bound)
    }
}

enum IntMatrix {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

/// A multiplier matrix `M = num / den` with integer `num`.
struct ScaledMatrix {
    dim: usize,
    num: IntMatrix,
    den: BigInt,
}

impl ScaledMatrix {
    fn new(f: &Factorization) -> Self {
        let dim = f.dim();
        let flat: Vec<Rational> = f.u.iter().flatten().cloned().collect();
        let (u, du) = scale_to_integers(&flat);
        let (d, dd) = scale_to_integers(&f.d);
        let den = &du * &du * &dd;
        let bits = |v: &[BigInt]| v.iter().map(|x| x.bits()).max().unwrap_or(0);
        let budget = 2 * bits(&u) + bits(&d) + (usize::BITS - dim.leading_zeros()) as u64;
        let num = if budget <= 125 {
            let u: Vec<i128> = u.iter().map(|x| x.to_i128().expect("fits")).collect();
            let d: Vec<i128> = d.iter().map(|x| x.to_i128().expect("fits")).collect();
            IntMatrix::Small(reconstruct(dim, &u, &d, 0i128))
        } else {
            IntMatrix::Big(reconstruct(dim, &u, &d, BigInt::zero()))
        };
        ScaledMatrix { dim, num, den }
    }

    /// `<M, Q>` with the off-diagonal entries counted twice.
    fn pairing(&self, q: &PairDensityMatrix) -> Rational {
        let dim = self.dim;
        let weight = |a: u32, b: u32, c: u64| if a == b { c as i128 } else { 2 * c as i128 };
        let sum = match &self.num {
            IntMatrix::Small(m) => {
                let fast = q.entries().iter().try_fold(0i128, |acc, &(a, b, c)| {
                    m[a as usize * dim + b as usize]
                        .checked_mul(weight(a, b, c))
                        .and_then(|t| acc.checked_add(t))
                });
                fast.map(BigInt::from).unwrap_or_else(|| {
                    q.entries().iter().fold(BigInt::zero(), |acc, &(a, b, c)| {
                        acc + BigInt::from(m[a as usize * dim + b as usize]) * weight(a, b, c)
                    })
                })
            }
            IntMatrix::Big(m) => q.entries().iter().fold(BigInt::zero(), |acc, &(a, b, c)| {
                acc + &m[a as usize * dim + b as usize] * weight(a, b, c)
            }),
        };
        Rational::new(sum, &self.den * BigInt::from(q.denominator()))
    }
}

/// Upper triangle of `Uᵀ D U` from integer `U` (row-major) and `D`.
fn reconstruct<T>(dim: usize, u: &[T], d: &[T], zero: T) -> Vec<T>
where
    T: Clone + core::ops::AddAssign + for<'a> core::ops::Mul<&'a T, Output = T>,
    for<'a> &'a T: core::ops::Mul<&'a T, Output = T>,
    T: PartialEq,
{
    let mut m = alloc::vec![zero.clone(); dim * dim];
    for k in 0..dim {
        if d[k] == zero {
            continue;
        }
        let row = &u[k * dim..(k + 1) * dim];
        for a in 0..dim {
            if row[a] == zero {
                continue;
            }
            let da = &d[k] * &row[a];
            for b in a..dim {
                m[a * dim + b] += da.clone() * &row[b];
            }
        }
    }
    m
}

/// The multiplier matrices of a certificate, reconstructed exactly once and
/// then paired with many targets.
pub struct Multipliers {
    mats: Vec<ScaledMatrix>,
}

impl Multipliers {
    pub fn new(factors: &[Factorization]) -> Self {
        Multipliers {
            mats: factors.iter().map(ScaledMatrix::new).collect(),
        }
    }

    /// `c_R = Σ_i <M_i, Q_iR>`.
    pub fn contribution(&self, blocks: &[PairDensityMatrix]) -> Rational {
        self.mats
            .iter()
            .zip(blocks)
            .map(|(m, q)| m.pairing(q))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    /// `p(N4, R) + c_R` for target `r` of `problem`.
    pub fn value(&self, problem: &SdpProblem, r: usize) -> Rational {
        &problem.objective()[r] + self.contribution(problem.blocks(r))
    }
}

/// Checks that a certificate fits a problem: same class, target size,
/// configuration and block dimensions.
pub fn check_compatible(cert: &Certificate, problem: &SdpProblem) -> Result<()> {
    if cert.class != problem.class() || cert.n != problem.n() {
        return Err(Error::InvalidCertificate(alloc::format!(
            "certificate is for {} systems on {} vertices, problem is {} on {}",
            cert.class,
            cert.n,
            problem.class(),
            problem.n()
        )));
    }
    if cert.config != *problem.config() {
        return Err(Error::InvalidCertificate("type configuration differs from the problem".into()));
    }
    let dims: Vec<usize> = cert.factors.iter().map(Factorization::dim).collect();
    if dims != problem.dims() {
        return Err(Error::InvalidCertificate(alloc::format!(
            "block sizes {dims:?} do not match flag counts {:?}",
            problem.dims()
        )));
    }
    if let Some((i, k)) = cert
        .factors
        .iter()
        .enumerate()
        .find_map(|(i, f)| f.d.iter().position(|x| x.is_negative()).map(|k| (i, k)))
    {
        return Err(Error::InvalidCertificate(alloc::format!(
            "type {i}: diagonal entry {k} is negative"
        )));
    }
    Ok(())
}

/// Turns the per-target values into a verdict against the claimed bound.
pub fn conclude(values: &[Rational], claimed: &Rational) -> Result<VerifiedBound> {
    let (witness, bound) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .ok_or_else(|| Error::domain("empty target catalog"))?;
    if bound > claimed {
        return Err(Error::VerificationFailed {
            witness,
            recomputed: bound.clone(),
            claimed: claimed.clone(),
        });
    }
    Ok(VerifiedBound {
        bound: bound.clone(),
        witness,
        claimed: claimed.clone(),
    })
}

/// Exact verification over integer reconstructions of the `M_i`.
pub fn verify(cert: &Certificate, problem: &SdpProblem) -> Result<VerifiedBound> {
    check_compatible(cert, problem)?;
    let mult = Multipliers::new(&cert.factors);
    let values: Vec<Rational> = (0..problem.len()).map(|r| mult.value(problem, r)).collect();
    conclude(&values, &cert.bound)
}

/// Exact verification through `Σ_k D_k (U Q Uᵀ)_kk`, never forming `M_i`.
/// Much slower; an independent route to the same numbers.
pub fn verify_factorized(cert: &Certificate, problem: &SdpProblem) -> Result<VerifiedBound> {
    check_compatible(cert, problem)?;
    let values: Vec<Rational> = (0..problem.len())
        .map(|r| {
            cert.factors
                .iter()
                .zip(problem.blocks(r))
                .fold(problem.objective()[r].clone(), |acc, (f, q)| acc + f.pairing_factorized(q))
        })
        .collect();
    conclude(&values, &cert.bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn q(dim: usize, den: u64, entries: &[(u32, u32, u64)]) -> PairDensityMatrix {
        PairDensityMatrix::from_entries(dim, den, entries.to_vec()).unwrap()
    }

    #[test]
    fn reconstruction_matches_rational_product() {
        let f = Factorization::new(
            alloc::vec![
                alloc::vec![ratio(1, 2), ratio(-1, 3)],
                alloc::vec![int(0), ratio(5, 7)],
            ],
            alloc::vec![ratio(3, 4), int(2)],
        )
        .unwrap();
        let m = f.to_matrix();
        let qm = q(2, 6, &[(0, 0, 1), (0, 1, 2), (1, 1, 3)]);
        let direct = (&m[0][0] * int(1) + &m[0][1] * int(4) + &m[1][1] * int(3)) / int(6);
        let scaled = ScaledMatrix::new(&f);
        assert_eq!(scaled.pairing(&qm), direct);
        assert_eq!(f.pairing_factorized(&qm), direct);
    }

    #[test]
    fn big_entries_take_the_bigint_path() {
        let huge = Rational::new(BigInt::from(1) << 80u32, BigInt::from(3));
        let f = Factorization::new(alloc::vec![alloc::vec![huge.clone()]], alloc::vec![int(1)]).unwrap();
        let s = ScaledMatrix::new(&f);
        assert!(matches!(s.num, IntMatrix::Big(_)));
        assert_eq!(s.pairing(&q(1, 1, &[(0, 0, 1)])), &huge * &huge);
    }

    #[test]
    fn negative_diagonal_is_rejected() {
        let err = Factorization::new(alloc::vec![alloc::vec![int(1)]], alloc::vec![ratio(-1, 1000)]);
        assert!(matches!(err, Err(Error::InvalidCertificate(_))));
        assert!(Factorization::new(alloc::vec![alloc::vec![int(1), int(0)]], alloc::vec![int(1)]).is_err());
    }

    #[test]
    fn conclude_reports_the_maximum() {
        let v = alloc::vec![ratio(1, 2), ratio(3, 4), ratio(3, 4), ratio(1, 3)];
        let ok = conclude(&v, &ratio(4, 5)).unwrap();
        assert_eq!(ok.bound, ratio(3, 4));
        assert_eq!(ok.witness, 1);
        match conclude(&v, &ratio(2, 3)) {
            Err(Error::VerificationFailed { witness, recomputed, .. }) => {
                assert_eq!(witness, 1);
                assert_eq!(recomputed, ratio(3, 4));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
