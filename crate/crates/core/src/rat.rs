//! Exact rational scalars and small numeric helpers.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rat = BigRational;
pub type Int = BigInt;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

pub fn factorial(n: u32) -> Int {
    let mut acc = Int::one();
    for k in 2..=n as u64 {
        acc *= Int::from(k);
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for j in 0..k {
        acc = acc * Int::from(n - j) / Int::from(j + 1);
    }
    acc
}

/// Multinomial coefficient (a_1 + ... + a_t)! / (a_1! ... a_t!).
pub fn multinomial(parts: &[u32]) -> Int {
    let mut acc = Int::one();
    let mut total = 0u32;
    for &a in parts {
        total += a;
        acc *= binomial(total, a);
    }
    acc
}

/// Exact integer quotient; panics when the division is not exact.
pub fn exact_div(r: &Rat, s: &Rat) -> Rat {
    assert!(!s.is_zero(), "division by zero");
    r / s
}

/// Asserts that a rational is an integer and returns it as i64.
pub fn rat_to_i64(r: &Rat) -> i64 {
    assert!(r.is_integer(), "expected integer, got {r}");
    let n = r.to_integer();
    let digits = n.to_string();
    digits.parse::<i64>().expect("integer out of i64 range")
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_combinatorics() {
        assert_eq!(factorial(0), Int::one());
        assert_eq!(factorial(5), Int::from(120));
        assert_eq!(binomial(5, 2), Int::from(10));
        assert_eq!(binomial(3, 5), Int::zero());
        assert_eq!(multinomial(&[2, 1, 1]), Int::from(12));
    }

    #[test]
    fn rational_helpers() {
        assert_eq!(frac(2, 4), frac(1, 2));
        assert_eq!(rat_to_i64(&rat(-7)), -7);
    }
}
