//! Small exact combinatorics shared by the protocol and solver modules.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact binomial coefficient `C(n, r)`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` as a `u64`, panicking only if the value does not fit.
pub fn binomial_u64(n: u64, r: u64) -> u64 {
    binomial(n, r)
        .to_u64()
        .expect("binomial coefficient exceeds u64")
}

/// Multinomial coefficient `(Σ parts)! / ∏ parts!`.
pub fn multinomial(parts: &[u64]) -> BigUint {
    let mut total = 0u64;
    let mut acc = BigUint::one();
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// Bits needed to write any integer in `0..=max`, i.e. `⌈log₂(max+1)⌉`.
pub fn count_width(max: u64) -> u32 {
    64 - max.leading_zeros()
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1, "log of zero");
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Exact test of `k ≥ base · log₂ n`, evaluated as `2^k ≥ n^base`.
pub fn meets_log_threshold(k: u64, base: u64, n: u64) -> bool {
    if n <= 1 {
        return true;
    }
    let floor = u64::from(63 - n.leading_zeros());
    if base.saturating_mul(floor) > k {
        return false;
    }
    if base.saturating_mul(u64::from(ceil_log2(n))) <= k {
        return true;
    }
    let lhs = BigUint::one() << k;
    let rhs = BigUint::from(n).pow(u32::try_from(base).expect("threshold base too large"));
    lhs >= rhs
}

/// Smallest integer `k` with `k ≥ base · log₂ n`.
pub fn log_threshold(base: u64, n: u64) -> u64 {
    if n <= 1 {
        return 0;
    }
    let mut k = base * u64::from(63 - n.leading_zeros());
    while !meets_log_threshold(k, base, n) {
        k += 1;
    }
    k
}

/// `⌊2^(k / base)⌋`, the largest `w` with `w^base ≤ 2^k`.
pub fn floor_pow2_ratio(k: u64, base: u64) -> u64 {
    let cap = BigUint::one() << k;
    let base = u32::try_from(base).expect("ratio base too large");
    let (mut lo, mut hi) = (1u64, 2u64);
    while BigUint::from(hi).pow(base) <= cap {
        lo = hi;
        hi = hi.checked_mul(2).expect("chunk width overflow");
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if BigUint::from(mid).pow(base) <= cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}
