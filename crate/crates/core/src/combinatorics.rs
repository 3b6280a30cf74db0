//! Exact binomials and shadow sizes.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `C(top, k)` in exact arithmetic; zero when `k > top`.
pub fn binomial(top: u64, k: u64) -> BigUint {
    if k > top {
        return BigUint::zero();
    }
    let k = k.min(top - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (top - i) is always divisible by (i + 1) at this point.
        acc = acc * BigUint::from(top - i) / BigUint::from(i + 1);
    }
    acc
}

/// Size of the shadow of a two-coloring with `red_count` red vertices out of
/// `v`: the number of `n`-subsets of `[v]` it leaves monochromatic.
pub fn shadow_size(red_count: u64, v: u64, n: u64) -> BigUint {
    assert!(red_count <= v, "red_count {red_count} exceeds v {v}");
    binomial(red_count, n) + binomial(v - red_count, n)
}

/// Converts an exact ratio to the nearest representable double.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
