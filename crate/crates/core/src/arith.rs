//! Small number-theoretic helpers.

use alloc::vec::Vec;

/// Möbius function.
pub fn mobius(n: u64) -> i64 {
    assert!(n > 0, "mobius is defined on positive integers");
    let mut n = n;
    let mut sign = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(3), -1);
        assert_eq!(mobius(7), -1);
        assert_eq!(mobius(9), 0);
        assert_eq!(mobius(21), 1);
        assert_eq!(mobius(30), -1);
    }

    #[test]
    fn mobius_sums_to_zero_over_divisors() {
        for n in 2..200u64 {
            let s: i64 = divisors(n).into_iter().map(mobius).sum();
            assert_eq!(s, 0, "n = {n}");
        }
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), [1]);
        assert_eq!(divisors(21), [1, 3, 7, 21]);
        assert_eq!(divisors(36), [1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert_eq!(gcd(-12, 18), 6);
        assert_eq!(gcd(0, 0), 0);
    }
}
