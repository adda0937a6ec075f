//! Small exact counting helpers.

use num_bigint::BigUint;
use num_traits::One;

/// `C(n, k)` with `C(n, 0) = 1` for every `n` (including `n = -1`) and
/// `C(n, k) = 0` whenever `k < 0` or `0 ≤ n < k` or `n < 0 < k`.
pub fn binomial(n: i64, k: i64) -> u128 {
    if k == 0 {
        return 1;
    }
    if k < 0 || n < k {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}
