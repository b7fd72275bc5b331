//! Exact rational scalars.
//!
//! Every quantity in this crate is a `Rational` after normalization by
//! `(4*pi)^(m/2)`; no floating point appears anywhere. `num_rational`
//! keeps values in lowest terms with a positive denominator, which is
//! exactly the invariant we need.

use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;
use num_traits::{One, Signed, Zero};

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `b^e` for a signed integer exponent.
pub fn pow_i(b: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow::pow(b.clone(), e as usize)
    } else {
        num_traits::pow::pow(b.clone(), (-e) as usize).recip()
    }
}

/// `n!` as a rational.
pub fn factorial(n: u64) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

/// Binomial coefficient `C(n, k)` as a rational.
pub fn binomial(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    for j in 0..k {
        acc *= Rational::new(BigInt::from(n - j), BigInt::from(j + 1));
    }
    acc
}

/// Canonical `num/den` rendering, always with an explicit denominator.
pub fn display_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse the `num/den` rendering produced by [`display_ratio`], or a bare
/// integer.
pub fn parse_ratio(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = n.parse().ok()?;
    let den: BigInt = d.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Sign of a rational as -1, 0, or 1.
pub fn signum(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}
