use num_bigint::BigInt;

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Binomial coefficient without overflow, for the large-`n` bound arithmetic.
pub fn binomial_big(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-k+1)`: the number of injections of a
/// `k`-set into an `n`-set.
pub fn falling(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial(7, 4), 35);
        assert_eq!(binomial(13, 4), 715);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial_big(100, 4), BigInt::from(3_921_225u64));
        assert_eq!(falling(7, 3), 210);
        assert_eq!(falling(2, 3), 0);
    }
}
