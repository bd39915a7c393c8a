//! Generalized binomial coefficients.
//!
//! `binom(u, k)` is the falling factorial `u(u-1)...(u-k+1)/k!` for `k >= 0` and any
//! integer `u`, and zero for `k < 0`. With this convention `binom(-1, k) = (-1)^k` and
//! Pascal's rule holds on the whole integer lattice with `k >= 1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{from_bigint, Rational};

pub fn binom(u: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if u >= 0 && k > u {
        return BigInt::zero();
    }
    // Symmetry keeps the loop short for large nonnegative u.
    let k = if u >= 0 && 2 * k > u { u - k } else { k };
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc == binom(u, i) here, so the division is exact.
        acc *= u - i;
        acc /= i + 1;
    }
    acc
}

pub fn binom_q(u: i64, k: i64) -> Rational {
    from_bigint(binom(u, k))
}

/// Machine-integer version for hot loops; panics if the value leaves `i64`.
pub fn binom_i64(u: i64, k: i64) -> i64 {
    if k < 0 || (u >= 0 && k > u) {
        return 0;
    }
    let k = if u >= 0 && 2 * k > u { u - k } else { k };
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (u - i) as i128 / (i + 1) as i128;
    }
    i64::try_from(acc).expect("binomial coefficient overflows i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(-1, 3), BigInt::from(-1));
        assert_eq!(binom(4, -1), BigInt::from(0));
        for n in -3..=3 {
            assert_eq!(binom(n, 0), BigInt::from(1));
        }
        assert_eq!(binom(3, 5), BigInt::from(0));
        assert_eq!(binom(-2, 2), BigInt::from(3));
        assert_eq!(binom(0, 0), BigInt::from(1));
    }

    #[test]
    fn negative_upper_is_signed_multiset_count() {
        // binom(-n, k) = (-1)^k binom(n+k-1, k)
        for n in 1..8i64 {
            for k in 0..8i64 {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                assert_eq!(binom(-n, k), BigInt::from(sign) * binom(n + k - 1, k));
            }
        }
    }

    #[test]
    fn pascal_rule_on_the_lattice() {
        for u in -20..=20i64 {
            for k in 1..=20i64 {
                assert_eq!(binom(u, k), binom(u - 1, k) + binom(u - 1, k - 1), "u={u} k={k}");
            }
        }
    }

    #[test]
    fn machine_version_agrees() {
        for u in -15..=30i64 {
            for k in -2..=15i64 {
                assert_eq!(BigInt::from(binom_i64(u, k)), binom(u, k));
            }
        }
    }
}
