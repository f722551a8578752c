//! Exact rationals and the few helpers the rest of the crate needs on top of
//! [`num_rational::BigRational`].

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| Error::parse(alloc::format!("bad numerator in `{s}`")))?;
    let den = BigInt::from_str(den).map_err(|_| Error::parse(alloc::format!("bad denominator in `{s}`")))?;
    if den.is_zero() {
        return Err(Error::parse(alloc::format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(num, den))
}

/// `p/q` text form, `p` alone for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal expansion truncated toward zero after `digits` fractional digits.
pub fn to_decimal_truncated(r: &Rational, digits: usize) -> String {
    let neg = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (abs.numer() * &scale).div_floor(abs.denom());
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let mut out = String::new();
    if neg && !scaled.is_zero() {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if digits > 0 {
        let frac = frac_part.to_string();
        out.push('.');
        for _ in frac.len()..digits {
            out.push('0');
        }
        out.push_str(&frac);
    }
    out
}

/// Nearest `f64`; exact for dyadic rationals that fit.
pub fn to_f64(r: &Rational) -> f64 {
    // Scale so that both parts fit comfortably in f64 before dividing.
    let n_bits = r.numer().bits() as i64;
    let d_bits = r.denom().bits() as i64;
    let shift = (n_bits.max(d_bits) - 60).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    if d == 0.0 {
        // Denominator vanished under the shift: the value is huge.
        return if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    n / d
}

/// Least common multiple of the denominators, or 1 for an empty input.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Numerators over a shared denominator: `values[i] = out[i] / den`.
pub fn scale_to_integers(values: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(values.iter());
    let nums = values
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (nums, den)
}
